#include "cbandit/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cbandit/crm_estimator.hpp"
#include "cbandit/errors.hpp"
#include "cbandit/inference.hpp"

namespace cbandit {

namespace {

struct Tally {
  explicit Tally(std::size_t k) : pulls(k, 0), wins(k, 0) {}
  void add(std::size_t a, std::uint8_t reward) {
    ++pulls[a];
    wins[a] += reward;
  }
  double mean(std::size_t a) const {
    return pulls[a] ? static_cast<double>(wins[a]) / static_cast<double>(pulls[a]) : 0.0;
  }
  std::vector<std::size_t> pulls;
  std::vector<std::size_t> wins;
};

// Smallest count over all (X_i, Paᶜ) cells, zero when some cell must be empty.
std::size_t min_cell_count(const std::vector<ObsRecord>& his, NodeId xi,
                           const std::vector<NodeId>& pa_c) {
  const std::size_t bits = 1 + pa_c.size();
  if (bits >= 63 || (std::size_t{1} << bits) > his.size()) return 0;
  std::vector<std::size_t> counts(std::size_t{1} << bits, 0);
  for (const ObsRecord& r : his) {
    std::size_t idx = r.values[xi];
    for (std::size_t j = 0; j < pa_c.size(); ++j) idx |= std::size_t{r.values[pa_c[j]]} << (j + 1);
    ++counts[idx];
  }
  return *std::min_element(counts.begin(), counts.end());
}

}  // namespace

SrmOutput srm_policy(Session& s) {
  const std::size_t horizon = s.horizon();
  if (horizon < 2) throw InvalidArgument("SRM needs a horizon of at least 2");
  const ObservationalEstimator* est = s.estimator();
  if (!est) throw StructuralError("SRM needs a graph satisfying the identifiability condition");
  const Admg& g = s.graph();
  const std::size_t arm_count = s.arms().size();

  SrmOutput out;
  const std::size_t half = horizon / 2;
  std::vector<ObsRecord> his;
  his.reserve(half);
  for (std::size_t t = 0; t < half; ++t) his.push_back(s.pull(0));
  out.estimates = est->estimate(his, horizon, s.rng());

  for (NodeId xi : g.intervenable()) {
    const auto ctx = pa_plus_and_pa_c(g, xi);
    out.k.push_back(ctx.k);
    out.q_hat.push_back(2.0 * static_cast<double>(min_cell_count(his, xi, ctx.pa_c)) /
                        static_cast<double>(horizon));
  }
  out.m_hat = compute_m(out.q_hat, out.k);
  for (std::size_t i = 0; i < out.q_hat.size(); ++i)
    if (below_inverse(out.q_hat[i], out.k[i], static_cast<double>(out.m_hat))) {
      out.q_set.push_back(1 + 2 * i);
      out.q_set.push_back(2 + 2 * i);
    }

  const std::size_t rest = horizon - half;
  if (!out.q_set.empty()) {
    const std::size_t per = rest / out.q_set.size(), extra = rest % out.q_set.size();
    for (std::size_t j = 0; j < out.q_set.size(); ++j) {
      const std::size_t a = out.q_set[j], n = per + (j < extra ? 1 : 0);
      std::size_t wins = 0;
      for (std::size_t r = 0; r < n; ++r) wins += s.pull(a).reward;
      if (n > 0) out.estimates[a] = static_cast<double>(wins) / static_cast<double>(n);
    }
  } else {
    // Nothing looks under-explored: spread the rest over every arm.
    const std::size_t per = rest / arm_count, extra = rest % arm_count;
    Tally tally(arm_count);
    for (const ObsRecord& r : his) tally.add(0, r.reward);
    for (std::size_t a = 0; a < arm_count; ++a) {
      const std::size_t n = per + (a < extra ? 1 : 0);
      for (std::size_t r = 0; r < n; ++r) tally.add(a, s.pull(a).reward);
      if (tally.pulls[a] > 0) out.estimates[a] = tally.mean(a);
    }
  }
  out.chosen_arm = argmax(out.estimates);
  out.pulls_used = s.used();
  return out;
}

std::size_t uniform_exploration_policy(Session& s) {
  const std::size_t k = s.arms().size();
  Tally tally(k);
  for (std::size_t t = 0; s.remaining() > 0; ++t) tally.add(t % k, s.pull(t % k).reward);
  std::vector<double> means(k, -std::numeric_limits<double>::infinity());
  for (std::size_t a = 0; a < k; ++a)
    if (tally.pulls[a] > 0) means[a] = tally.mean(a);
  return argmax(means);
}

std::size_t successive_rejects_policy(Session& s) {
  const std::size_t k = s.arms().size();
  const std::size_t horizon = s.horizon();
  if (horizon < k) throw InvalidArgument("successive rejects needs at least one pull per arm");
  Tally tally(k);
  std::vector<std::size_t> active(k);
  for (std::size_t a = 0; a < k; ++a) active[a] = a;

  double log_bar = 0.5;
  for (std::size_t i = 2; i <= k; ++i) log_bar += 1.0 / static_cast<double>(i);
  std::size_t prev = 0;
  for (std::size_t phase = 1; phase < k; ++phase) {
    const auto n = static_cast<std::size_t>(
        std::ceil(static_cast<double>(horizon - k) / (log_bar * static_cast<double>(k + 1 - phase))));
    for (std::size_t a : active)
      for (std::size_t r = prev; r < n && s.remaining() > 0; ++r) tally.add(a, s.pull(a).reward);
    prev = std::max(prev, n);
    // Drop the empirical worst; among ties the highest index goes.
    std::size_t worst = 0;
    for (std::size_t j = 1; j < active.size(); ++j)
      if (tally.mean(active[j]) <= tally.mean(active[worst])) worst = j;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  const std::size_t survivor = active.front();
  while (s.remaining() > 0) tally.add(survivor, s.pull(survivor).reward);
  return survivor;
}

std::size_t ucb1_policy(Session& s) {
  const std::size_t k = s.arms().size();
  Tally tally(k);
  for (std::size_t a = 0; a < k && s.remaining() > 0; ++a) tally.add(a, s.pull(a).reward);
  std::vector<double> index(k);
  while (s.remaining() > 0) {
    const double log_t = std::log(static_cast<double>(s.used()));
    for (std::size_t a = 0; a < k; ++a)
      index[a] = tally.mean(a) + std::sqrt(2.0 * log_t / static_cast<double>(tally.pulls[a]));
    const std::size_t a = argmax(index);
    tally.add(a, s.pull(a).reward);
  }
  std::size_t most = 0;
  for (std::size_t a = 1; a < k; ++a)
    if (tally.pulls[a] > tally.pulls[most]) most = a;
  return most;
}

void crm_policy(Session& s, CrmDiagnostics* diagnostics) {
  CrmEstimator est(s.graph());
  const std::size_t k = est.arm_count();
  auto play = [&](std::size_t a) {
    const ObsRecord r = s.pull(a);
    if (a == 0)
      est.observe(r);
    else
      est.intervene(a, r.reward);
  };
  for (std::size_t a = 0; a < k && s.remaining() > 0; ++a) play(a);

  double beta = 1.0;
  std::vector<double> values(k);
  while (s.remaining() > 0) {
    const std::size_t t = s.used() + 1;
    const double log_t = std::log(static_cast<double>(t));
    std::size_t a = 0;
    if (static_cast<double>(est.pulls(0)) >= beta * beta * log_t) {
      for (std::size_t b = 0; b < k; ++b) values[b] = est.ucb(b, t - 1);
      a = argmax(values);
    }
    play(a);
    for (std::size_t b = 0; b < k; ++b) values[b] = est.mean(b);
    const double best = *std::max_element(values.begin(), values.end());
    if (values[0] < best) beta = std::min(2.0 * std::sqrt(2.0) / (best - values[0]), std::sqrt(log_t));
    if (diagnostics) diagnostics->beta.push_back(beta);
  }
  if (diagnostics) {
    diagnostics->pulls.clear();
    diagnostics->truncation.clear();
    diagnostics->means.clear();
    for (std::size_t b = 0; b < k; ++b) {
      diagnostics->pulls.push_back(est.pulls(b));
      diagnostics->truncation.push_back(est.truncation(b));
      diagnostics->means.push_back(est.mean(b));
    }
  }
}

SrmRun run_srm(const BanditEnv& env, std::size_t horizon, Rng& rng) {
  Session s(env, horizon, rng);
  SrmRun run;
  run.output = srm_policy(s);
  run.trace = make_trace(env, s.history(), run.output.chosen_arm);
  return run;
}

RegretTrace run_crm(const BanditEnv& env, std::size_t horizon, Rng& rng,
                    CrmDiagnostics* diagnostics) {
  if (!env.fully_observable())
    throw StructuralError(
        "CRM requires every node of the model to be observable (no hidden or bidirected nodes)");
  CrmDiagnostics local;
  CrmDiagnostics* diag = diagnostics ? diagnostics : &local;
  Session s(env, horizon, rng);
  crm_policy(s, diag);
  return make_trace(env, s.history(), diag->means.empty() ? kNoArm : argmax(diag->means));
}

RegretTrace run_uniform_exploration(const BanditEnv& env, std::size_t horizon, Rng& rng) {
  Session s(env, horizon, rng);
  const std::size_t rec = uniform_exploration_policy(s);
  return make_trace(env, s.history(), rec);
}

RegretTrace run_successive_rejects(const BanditEnv& env, std::size_t horizon, Rng& rng) {
  Session s(env, horizon, rng);
  const std::size_t rec = successive_rejects_policy(s);
  return make_trace(env, s.history(), rec);
}

RegretTrace run_ucb1(const BanditEnv& env, std::size_t horizon, Rng& rng) {
  Session s(env, horizon, rng);
  const std::size_t rec = ucb1_policy(s);
  return make_trace(env, s.history(), rec);
}

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Srm: return "srm";
    case Algorithm::Crm: return "crm";
    case Algorithm::Ue: return "ue";
    case Algorithm::Sr: return "sr";
    case Algorithm::Ucb1: return "ucb1";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::Srm, Algorithm::Crm, Algorithm::Ue, Algorithm::Sr, Algorithm::Ucb1})
    if (algorithm_name(a) == name) return a;
  throw InvalidArgument(fmt::format("unknown algorithm '{}'", name));
}

bool is_cumulative(Algorithm a) { return a == Algorithm::Crm || a == Algorithm::Ucb1; }

RegretTrace run_algorithm(Algorithm a, const BanditEnv& env, std::size_t horizon, Rng& rng) {
  switch (a) {
    case Algorithm::Srm: return run_srm(env, horizon, rng).trace;
    case Algorithm::Crm: return run_crm(env, horizon, rng);
    case Algorithm::Ue: return run_uniform_exploration(env, horizon, rng);
    case Algorithm::Sr: return run_successive_rejects(env, horizon, rng);
    case Algorithm::Ucb1: return run_ucb1(env, horizon, rng);
  }
  throw InvalidArgument("unknown algorithm");
}

}  // namespace cbandit
