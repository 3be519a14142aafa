#include "cbandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include <fmt/format.h>

#include "cbandit/bounds.hpp"
#include "cbandit/errors.hpp"
#include "cbandit/generators.hpp"

namespace cbandit {

namespace {

constexpr std::uint64_t kGenTag = 0x67656e;  // "gen"
constexpr std::uint64_t kMcTag = 0x6d63;     // "mc"

struct Instance {
  std::shared_ptr<const Cbn> cbn;
  std::string group;
};

std::vector<Instance> build_instances(const ExperimentPlan& plan) {
  std::vector<Instance> out;
  auto add = [&](Cbn c, std::string group = {}) {
    out.push_back({std::make_shared<const Cbn>(std::move(c)), std::move(group)});
  };
  switch (plan.id) {
    case ExperimentId::Exp1:
      for (std::size_t i = 0; i < plan.instances; ++i)
        add(gen_experiment1(instance_seed(plan.base_seed, i), plan.n, plan.m, plan.eps));
      break;
    case ExperimentId::Exp2:
      // The same seed per index keeps the DAG fixed across the m sweep.
      for (std::size_t m : plan.m_values)
        for (std::size_t i = 0; i < plan.instances; ++i)
          add(gen_experiment2(instance_seed(plan.base_seed, i), plan.n, m, plan.eps),
              fmt::format("m={}", m));
      break;
    case ExperimentId::Exp3:
      for (std::size_t i = 0; i < plan.instances; ++i) add(gen_experiment3());
      break;
    case ExperimentId::Exp5:
      for (std::size_t i = 0; i < plan.instances; ++i)
        add(gen_experiment5(instance_seed(plan.base_seed, i), plan.n, plan.eps));
      break;
    case ExperimentId::TreeLb: {
      const TreeShape shape = TreeShape::complete(plan.tree_arity, plan.tree_depth);
      for (Cbn& c : gen_tree_lower_bound(shape, plan.m, plan.horizons.back())) add(std::move(c));
      break;
    }
    case ExperimentId::Custom:
      for (const auto& c : plan.models) out.push_back({c, {}});
      break;
  }
  return out;
}

std::vector<double> monte_carlo_rewards(const Cbn& cbn, std::size_t samples, std::uint64_t seed) {
  const auto arms = arm_list(cbn.visible_graph());
  std::vector<double> out;
  for (std::size_t a = 0; a < arms.size(); ++a) {
    Rng rng(mix_seed(seed, kMcTag, a));
    std::size_t wins = 0;
    for (std::size_t s = 0; s < samples; ++s) wins += sample(cbn, arms[a], rng).reward;
    out.push_back(static_cast<double>(wins) / static_cast<double>(samples));
  }
  return out;
}

InstanceStats oracle_stats(const ExperimentPlan& plan, const Instance& inst, std::size_t index) {
  const Cbn& cbn = *inst.cbn;
  const Admg& g = cbn.visible_graph();
  InstanceStats st;
  st.index = index;
  st.group = inst.group;
  st.nodes = g.size();
  st.intervenable = g.intervenable().size();
  for (const Arm& a : arm_list(g)) st.arm_names.push_back(arm_name(a, g));
  try {
    st.rewards = exact_rewards(cbn, plan.enumeration_limit);
  } catch (const EnumerationInfeasible&) {
    if (!plan.allow_mc_fallback) throw;
    st.rewards = monte_carlo_rewards(cbn, plan.mc_samples, mix_seed(plan.base_seed, kMcTag, index));
    st.monte_carlo = true;
  }
  st.best_arm = argmax(st.rewards);
  const double best = st.rewards[st.best_arm];
  st.gap0 = best - st.rewards[0];
  try {
    st.qm = exact_q_and_m(cbn, plan.enumeration_limit);
  } catch (const EnumerationInfeasible&) {
  }
  const bool observable = !cbn.graph().has_hidden() && !cbn.graph().has_bidirected();
  if (observable && !st.monte_carlo) {
    try {
      const auto nodes = g.intervenable();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::vector<NodeId> query{nodes[i]};
        const auto parents = pa(g, nodes[i]);
        query.insert(query.end(), parents.begin(), parents.end());
        const auto joint = joint_marginal(cbn, Arm::observe(), query, plan.enumeration_limit);
        for (int x = 0; x < 2; ++x) {
          CrmArmOracle arm;
          arm.gap = best - st.rewards[1 + 2 * i + static_cast<std::size_t>(x)];
          arm.domain = std::size_t{1} << parents.size();
          arm.p_min = 1.0;
          for (std::size_t z = 0; z < arm.domain; ++z)
            arm.p_min = std::min(arm.p_min, joint[(z << 1) | static_cast<std::size_t>(x)]);
          st.crm_arms.push_back(arm);
        }
      }
    } catch (const EnumerationInfeasible&) {
      st.crm_arms.clear();
    }
  }
  return st;
}

std::string experiment_label(ExperimentId id, const std::string& group) {
  return group.empty() ? std::string(experiment_name(id))
                       : fmt::format("{}/{}", experiment_name(id), group);
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

}  // namespace

std::string_view experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::Exp1: return "exp1";
    case ExperimentId::Exp2: return "exp2";
    case ExperimentId::Exp3: return "exp3";
    case ExperimentId::Exp5: return "exp5";
    case ExperimentId::TreeLb: return "tree_lb";
    case ExperimentId::Custom: return "custom";
  }
  return "?";
}

ExperimentId parse_experiment(std::string_view name) {
  for (ExperimentId id : {ExperimentId::Exp1, ExperimentId::Exp2, ExperimentId::Exp3,
                          ExperimentId::Exp5, ExperimentId::TreeLb, ExperimentId::Custom})
    if (experiment_name(id) == name) return id;
  if (name == "tree-lb") return ExperimentId::TreeLb;
  throw InvalidArgument(fmt::format("unknown experiment '{}'", name));
}

void ExperimentPlan::validate() const {
  if (runs == 0) throw InvalidArgument("runs must be positive");
  if (id != ExperimentId::Custom && id != ExperimentId::TreeLb && instances == 0)
    throw InvalidArgument("instance count must be positive");
  if (id == ExperimentId::Custom && models.empty()) throw InvalidArgument("custom plan has no models");
  if (horizons.empty()) throw InvalidArgument("no horizons");
  if (horizons.front() == 0) throw InvalidArgument("horizons must be positive");
  for (std::size_t i = 1; i < horizons.size(); ++i)
    if (horizons[i] <= horizons[i - 1]) throw InvalidArgument("horizons must be strictly increasing");
  if (algorithms.empty()) throw InvalidArgument("no algorithms");
  if (id == ExperimentId::Exp2 && m_values.empty()) throw InvalidArgument("exp2 needs m values");
  if (jobs == 0) throw InvalidArgument("jobs must be positive");
  if (mc_samples == 0) throw InvalidArgument("Monte Carlo sample count must be positive");
}

ExperimentPlan canonical_plan(ExperimentId id, std::uint64_t base_seed) {
  ExperimentPlan p;
  p.id = id;
  p.base_seed = base_seed;
  p.jobs = std::max(1u, std::thread::hardware_concurrency());
  switch (id) {
    case ExperimentId::Exp1:
      p.instances = 50;
      p.runs = 100;
      p.horizons = {500, 1000, 1500, 2000, 2500};
      p.algorithms = {Algorithm::Srm, Algorithm::Ue, Algorithm::Sr};
      break;
    case ExperimentId::Exp2:
      p.instances = 50;
      p.runs = 100;
      p.horizons = {1600};
      p.algorithms = {Algorithm::Srm, Algorithm::Ue, Algorithm::Sr};
      for (std::size_t m = 10; m <= 50; m += 2) p.m_values.push_back(m);
      break;
    case ExperimentId::Exp3:
      p.instances = 1;
      p.runs = 30;
      for (std::size_t t = 5000; t <= 50000; t += 5000) p.horizons.push_back(t);
      p.algorithms = {Algorithm::Crm, Algorithm::Ucb1};
      break;
    case ExperimentId::Exp5:
      p.instances = 12;
      p.runs = 30;
      p.n = 10;
      p.eps = 0.1;
      for (std::size_t t = 5000; t <= 50000; t += 5000) p.horizons.push_back(t);
      p.algorithms = {Algorithm::Crm, Algorithm::Ucb1};
      break;
    case ExperimentId::TreeLb:
      p.m = 4;
      p.tree_arity = 2;
      p.tree_depth = 2;
      p.instances = p.m + 1;
      p.runs = 50;
      p.horizons = {250, 500, 1000, 2000};
      p.algorithms = {Algorithm::Srm, Algorithm::Ue, Algorithm::Sr};
      break;
    case ExperimentId::Custom:
      throw InvalidArgument("custom experiments have no canonical plan");
  }
  return p;
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t instance, std::size_t run, Algorithm a,
                        std::size_t horizon) {
  return mix_seed(base, instance, run, static_cast<std::uint64_t>(a), horizon);
}

std::uint64_t instance_seed(std::uint64_t base, std::size_t instance) {
  return mix_seed(base, kGenTag, instance);
}

const CellSummary* RegretReport::pooled(std::string_view experiment, Algorithm a,
                                        std::size_t horizon) const {
  for (const CellSummary& c : cells)
    if (!c.instance && c.experiment == experiment && c.algorithm == algorithm_name(a) &&
        c.horizon == horizon)
      return &c;
  return nullptr;
}

RegretReport execute(const ExperimentPlan& plan) {
  plan.validate();
  const std::vector<Instance> instances = build_instances(plan);
  const std::size_t n_inst = instances.size(), n_runs = plan.runs;
  const std::size_t n_algo = plan.algorithms.size(), n_hor = plan.horizons.size();

  RegretReport report;
  report.plan = plan;
  report.plan.instances = plan.id == ExperimentId::Exp2 ? plan.instances : n_inst;

  std::vector<BanditEnv> envs;
  envs.reserve(n_inst);
  for (std::size_t i = 0; i < n_inst; ++i) {
    report.instances.push_back(oracle_stats(plan, instances[i], i));
    EstimatorOptions options;
    options.enumeration_limit = plan.enumeration_limit;
    envs.emplace_back(instances[i].cbn, report.instances.back().rewards, options);
  }

  report.raw.assign(n_inst, std::vector<std::vector<std::vector<double>>>(
                                n_runs, std::vector<std::vector<double>>(
                                            n_algo, std::vector<double>(n_hor, 0.0))));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= n_inst * n_runs) return;
      const std::size_t inst = cell / n_runs, run = cell % n_runs;
      try {
        for (std::size_t a = 0; a < n_algo; ++a) {
          const Algorithm algo = plan.algorithms[a];
          auto& out = report.raw[inst][run][a];
          if (is_cumulative(algo)) {
            const std::size_t t_max = plan.horizons.back();
            Rng rng(cell_seed(plan.base_seed, inst, run, algo, t_max));
            const RegretTrace tr = run_algorithm(algo, envs[inst], t_max, rng);
            for (std::size_t h = 0; h < n_hor; ++h) out[h] = tr.cumulative[plan.horizons[h] - 1];
          } else {
            for (std::size_t h = 0; h < n_hor; ++h) {
              Rng rng(cell_seed(plan.base_seed, inst, run, algo, plan.horizons[h]));
              out[h] = run_algorithm(algo, envs[inst], plan.horizons[h], rng).simple_regret;
            }
          }
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_inst * n_runs);
        return;
      }
    }
  };
  const std::size_t threads = std::min(plan.jobs, n_inst * n_runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Groups in first-appearance order.
  std::vector<std::string> groups;
  for (const Instance& inst : instances)
    if (std::find(groups.begin(), groups.end(), inst.group) == groups.end())
      groups.push_back(inst.group);

  for (const std::string& group : groups) {
    const std::string label = experiment_label(plan.id, group);
    for (std::size_t a = 0; a < n_algo; ++a)
      for (std::size_t h = 0; h < n_hor; ++h) {
        std::vector<double> pooled;
        for (std::size_t i = 0; i < n_inst; ++i) {
          if (instances[i].group != group) continue;
          std::vector<double> xs;
          for (std::size_t r = 0; r < n_runs; ++r) xs.push_back(report.raw[i][r][a][h]);
          pooled.insert(pooled.end(), xs.begin(), xs.end());
          const auto [mean, se] = mean_and_stderr(xs);
          report.cells.push_back({label, std::string(algorithm_name(plan.algorithms[a])), i,
                                  plan.horizons[h], n_runs, mean, se});
        }
        const auto [mean, se] = mean_and_stderr(pooled);
        report.cells.push_back({label, std::string(algorithm_name(plan.algorithms[a])),
                                std::nullopt, plan.horizons[h], pooled.size(), mean, se});
      }
  }
  return report;
}

void overlay_bounds(RegretReport& report) {
  const ExperimentPlan& plan = report.plan;
  std::vector<std::string> groups;
  for (const InstanceStats& st : report.instances)
    if (std::find(groups.begin(), groups.end(), st.group) == groups.end()) groups.push_back(st.group);

  for (Algorithm algo : plan.algorithms) {
    if (algo != Algorithm::Srm && algo != Algorithm::Crm) continue;
    for (const std::string& group : groups) {
      BoundSeries s;
      s.algorithm = std::string(algorithm_name(algo));
      s.group = group;
      s.horizons = plan.horizons;
      std::vector<const InstanceStats*> members;
      for (const InstanceStats& st : report.instances)
        if (st.group == group) members.push_back(&st);

      for (std::size_t t : plan.horizons) {
        double total = 0.0;
        for (const InstanceStats* st : members) {
          if (algo == Algorithm::Srm) {
            if (!st->qm) {
              s.note = "missing oracle m";
              break;
            }
            total += srm_bound(static_cast<double>(st->qm->m),
                               static_cast<double>(st->intervenable), static_cast<double>(t));
          } else {
            if (st->crm_arms.empty()) {
              s.note = "missing oracle gaps";
              break;
            }
            std::vector<CrmArmStats> arms;
            for (const CrmArmOracle& a : st->crm_arms)
              arms.push_back({a.gap, a.p_min, static_cast<double>(a.domain)});
            const CrmBound b = crm_bound(st->gap0, arms, static_cast<double>(t));
            if (b.guarded) {
              s.guarded = true;
              s.note = b.note;
              break;
            }
            total += *b.value;
          }
        }
        if (s.guarded || !s.note.empty()) break;
        s.shape.push_back(total / static_cast<double>(members.size()));
      }
      if (s.guarded || !s.note.empty()) {
        s.shape.clear();
        report.bounds.push_back(std::move(s));
        continue;
      }

      const std::string label = experiment_label(plan.id, group);
      double num = 0.0, den = 0.0;
      std::vector<const CellSummary*> cells;
      for (std::size_t h = 0; h < plan.horizons.size(); ++h) {
        const CellSummary* c = report.pooled(label, algo, plan.horizons[h]);
        cells.push_back(c);
        num += c->mean * s.shape[h];
        den += s.shape[h] * s.shape[h];
      }
      if (den > 0.0) {
        s.constant = num / den;
        s.dominated = true;
        for (std::size_t h = 0; h < cells.size(); ++h)
          if (cells[h]->mean > *s.constant * s.shape[h] + 2.0 * cells[h]->stderr_) s.dominated = false;
      } else {
        s.note = "bound is identically zero";
      }
      report.bounds.push_back(std::move(s));
    }
  }
}

}  // namespace cbandit
