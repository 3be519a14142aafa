#include "doctest.h"
#include "oracles.hpp"

#include <memory>

#include "cbandit/algorithms.hpp"
#include "cbandit/errors.hpp"
#include "cbandit/generators.hpp"
#include "cbandit/inference.hpp"

using namespace cbandit;

namespace {

BanditEnv env_of(Cbn c) { return BanditEnv::exact(std::make_shared<const Cbn>(std::move(c))); }

// X -> Y with P(X = 1) = px and P(Y = 1 | X) = {y0, y1}.
Cbn single(double px, double y0, double y1) {
  Admg g;
  const NodeId x = g.add_node("X", false, true), y = g.add_node("Y");
  g.add_edge(x, y);
  g.set_reward(y);
  return Cbn(g, {{x, {}, {px}}, {y, {x}, {y0, y1}}});
}

// Parallel fair coins X1..Xn -> Y with P(Y = 1) = min(1, Σ lift_j X_j).
Cbn parallel(std::size_t n, const std::vector<double>& lift) {
  Admg g;
  std::vector<Cpt> cpts;
  for (std::size_t i = 0; i < n; ++i) {
    g.add_node("X" + std::to_string(i + 1), false, true);
    cpts.push_back({static_cast<NodeId>(i), {}, {0.5}});
  }
  const NodeId y = g.add_node("Y");
  std::vector<NodeId> pa;
  for (std::size_t i = 0; i < n; ++i) {
    g.add_edge(static_cast<NodeId>(i), y);
    pa.push_back(static_cast<NodeId>(i));
  }
  g.set_reward(y);
  std::vector<double> table(std::size_t{1} << n);
  for (std::size_t s = 0; s < table.size(); ++s) {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if ((s >> i) & 1) v += lift[i];
    table[s] = std::min(1.0, v);
  }
  cpts.push_back({y, pa, table});
  return Cbn(g, cpts);
}

std::vector<std::size_t> pull_counts(const RegretTrace& tr, std::size_t arms) {
  std::vector<std::size_t> out(arms, 0);
  for (auto a : tr.arms) ++out[a];
  return out;
}

}  // namespace

TEST_CASE("every algorithm spends exactly its budget and is deterministic") {
  RandomCbnParams p;
  p.observable = 6;
  const BanditEnv env = env_of(gen_random(4, p));
  for (Algorithm a : {Algorithm::Srm, Algorithm::Crm, Algorithm::Ue, Algorithm::Sr, Algorithm::Ucb1}) {
    for (std::size_t horizon : {std::size_t{40}, std::size_t{333}}) {
      Rng r1(7), r2(7);
      const RegretTrace t1 = run_algorithm(a, env, horizon, r1);
      const RegretTrace t2 = run_algorithm(a, env, horizon, r2);
      CHECK(t1.arms.size() == horizon);
      CHECK(t1.arms == t2.arms);
      CHECK(t1.recommended == t2.recommended);
      CHECK(t1.simple_regret >= 0.0);
      for (std::size_t t = 1; t < t1.cumulative.size(); ++t) CHECK(t1.cumulative[t] >= t1.cumulative[t - 1]);
    }
  }
  CHECK(parse_algorithm("ucb1") == Algorithm::Ucb1);
  CHECK_THROWS_AS(parse_algorithm("thompson"), InvalidArgument);
}

TEST_CASE("sessions refuse pulls past the budget") {
  const BanditEnv env = env_of(gen_experiment3());
  Rng rng(1);
  Session s(env, 2, rng);
  s.pull(0);
  s.pull(1);
  CHECK_THROWS_AS(s.pull(0), InvalidArgument);
  CHECK(argmax({0.1, 0.3, 0.3}) == 1);
}

TEST_CASE("SRM phases") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const FamilyInstance f = gen_family(seed, {12, 9, 1.0 / 18.0, 2, 0.3, true});
    const BanditEnv env = env_of(f.cbn);
    Rng rng(seed);
    const std::size_t horizon = 1001;
    const SrmRun run = run_srm(env, horizon, rng);
    const SrmOutput& o = run.output;
    CHECK(o.pulls_used == horizon);
    for (std::size_t t = 0; t < horizon / 2; ++t) CHECK(run.trace.arms[t] == 0);
    CHECK(o.m_hat >= 2);
    CHECK(o.m_hat <= 24);
    CHECK(o.m_hat == oracle::m_from_definition(o.q_hat, o.k));
    CHECK(o.chosen_arm == argmax(o.estimates));

    const auto counts = pull_counts(run.trace, env.arms().size());
    REQUIRE_FALSE(o.q_set.empty());
    std::size_t lo = horizon, hi = 0;
    for (std::size_t a : o.q_set) {
      CHECK(a < env.arms().size());
      lo = std::min(lo, counts[a]);
      hi = std::max(hi, counts[a]);
    }
    CHECK(hi - lo <= 1);
    for (std::size_t a = 1; a < counts.size(); ++a)
      if (std::find(o.q_set.begin(), o.q_set.end(), a) == o.q_set.end()) CHECK(counts[a] == 0);
    // Q is exactly the arms of nodes with q̂^k below 1/m̂.
    for (std::size_t i = 0; i < o.q_hat.size(); ++i) {
      const bool in_q = std::find(o.q_set.begin(), o.q_set.end(), 1 + 2 * i) != o.q_set.end();
      CHECK(in_q == (std::pow(o.q_hat[i], static_cast<double>(o.k[i])) < 1.0 / static_cast<double>(o.m_hat) - 1e-12));
    }
  }
}

TEST_CASE("SRM with an empty Q falls back to uniform exploration") {
  // Fair coins: every q̂ is near 1/2, so no node is under-explored.
  const BanditEnv env = env_of(parallel(3, {0.2, 0.3, 0.4}));
  Rng rng(3);
  const SrmRun run = run_srm(env, 800, rng);
  CHECK(run.output.q_set.empty());
  const auto counts = pull_counts(run.trace, env.arms().size());
  CHECK(counts[0] == 400 + 400 / 7 + 1);
  for (std::size_t a = 1; a < counts.size(); ++a) CHECK(counts[a] >= 400 / 7);
}

TEST_CASE("SRM regret is zero when Y is always 1") {
  const BanditEnv env = env_of(single(0.3, 1.0, 1.0));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    CHECK(run_srm(env, 100, rng).trace.simple_regret == 0.0);
  }
}

TEST_CASE("SRM regret shrinks with the horizon on a parallel graph") {
  const BanditEnv env = env_of(parallel(3, {0.2, 0.3, 0.45}));
  auto mean_regret = [&](std::size_t horizon) {
    std::vector<double> r;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      Rng rng(mix_seed(5, seed, horizon));
      r.push_back(run_srm(env, horizon, rng).trace.simple_regret);
    }
    return oracle::mean(r);
  };
  CHECK(mean_regret(5000) < mean_regret(500));
}

TEST_CASE("uniform exploration") {
  const BanditEnv env = env_of(gen_experiment3());
  Rng rng(1);
  const RegretTrace t = run_uniform_exploration(env, 5, rng);
  CHECK(pull_counts(t, 5) == std::vector<std::size_t>(5, 1));
  const RegretTrace u = run_uniform_exploration(env, 13, rng);
  CHECK(pull_counts(u, 5) == std::vector<std::size_t>{3, 3, 3, 2, 2});

  const BanditEnv det = env_of(single(0.5, 0.0, 1.0));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng r(seed);
    CHECK(run_uniform_exploration(det, 30, r).recommended == det.best_arm());
  }
}

TEST_CASE("successive rejects schedule") {
  // Deterministic distinct means, so the elimination order is known.
  const BanditEnv env = env_of(parallel(2, {0.0, 1.0}));
  // arms: a0 (1/2), do(X1=0) (1/2), do(X1=1) (1/2), do(X2=0) (0), do(X2=1) (1).
  CHECK(env.best_arm() == 4);
  const std::size_t k = 5, horizon = 400;
  double log_bar = 0.5;
  for (std::size_t i = 2; i <= k; ++i) log_bar += 1.0 / static_cast<double>(i);
  std::vector<std::size_t> want;
  std::size_t spent = 0;
  for (std::size_t phase = 1; phase < k; ++phase) {
    want.push_back(static_cast<std::size_t>(std::ceil((horizon - k) / (log_bar * static_cast<double>(k + 1 - phase)))));
    spent += want.back();
  }
  want.push_back(horizon - spent);
  Rng rng(2);
  const RegretTrace t = run_successive_rejects(env, horizon, rng);
  CHECK(t.recommended == 4);
  auto counts = pull_counts(t, k);
  CHECK(counts[4] == want.back());
  CHECK(counts[3] == want.front());
  std::sort(counts.begin(), counts.end());
  std::sort(want.begin(), want.end());
  CHECK(counts == want);

  const BanditEnv two = env_of(single(0.5, 0.0, 1.0));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng r(seed);
    CHECK(run_successive_rejects(two, 9, r).recommended == 2);
  }
  Rng r(0);
  CHECK_THROWS_AS(run_successive_rejects(env, 3, r), InvalidArgument);
}

TEST_CASE("UCB1") {
  Admg g;
  const NodeId y = g.add_node("Y");
  g.set_reward(y);
  const BanditEnv lone = env_of(Cbn(g, {{y, {}, {0.4}}}));
  Rng rng(1);
  const RegretTrace t = run_ucb1(lone, 100, rng);
  CHECK(t.cumulative.back() == 0.0);
  CHECK(pull_counts(t, 1)[0] == 100);

  // Deterministic arms 1/2, 0, 1: suboptimal pulls stay within the classic
  // 8 ln T / Δ² + 1 + π²/3 allowance.
  const BanditEnv det = env_of(single(0.5, 0.0, 1.0));
  const std::size_t horizon = 5000;
  Rng r(4);
  const RegretTrace u = run_ucb1(det, horizon, r);
  const auto counts = pull_counts(u, 3);
  const double extra = 1.0 + M_PI * M_PI / 3.0;
  CHECK(static_cast<double>(counts[0]) <= 8.0 * std::log(horizon) / 0.25 + extra);
  CHECK(static_cast<double>(counts[1]) <= 8.0 * std::log(horizon) + extra);
  CHECK(u.recommended == 2);
}

TEST_CASE("CRM concentrates on the best arm") {
  const BanditEnv env = env_of(single(0.5, 0.2, 0.8));
  Rng rng(6);
  CrmDiagnostics diag;
  const std::size_t horizon = 20000;
  const RegretTrace t = run_crm(env, horizon, rng, &diag);
  const auto counts = pull_counts(t, 3);
  CHECK(static_cast<double>(counts[2]) / horizon > 0.9);
  CHECK(t.recommended == 2);
  CHECK(diag.pulls == counts);
  REQUIRE(diag.beta.size() == horizon - 3);
  for (std::size_t j = 0; j < diag.beta.size(); ++j) {
    const double log_t = std::log(static_cast<double>(j + 4));
    CHECK(diag.beta[j] > 0.0);
    CHECK(diag.beta[j] <= std::sqrt(log_t) + 1e-12);
  }
}

TEST_CASE("CRM with equal rewards has no regret") {
  const BanditEnv env = env_of(single(0.5, 0.5, 0.5));
  Rng rng(2);
  CHECK(run_crm(env, 3000, rng).cumulative.back() == 0.0);
}

TEST_CASE("CRM refuses models with hidden variables") {
  RandomCbnParams p;
  p.confounders = 1;
  p.observable = 5;
  const BanditEnv env = env_of(gen_random(8, p));
  Rng rng(1);
  CHECK_THROWS_AS(run_crm(env, 100, rng), StructuralError);
}
