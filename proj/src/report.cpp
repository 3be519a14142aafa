#include <fstream>

#include <fmt/format.h>

#include "cbandit/errors.hpp"
#include "cbandit/harness.hpp"

namespace cbandit {

using nlohmann::json;

std::string report_csv(const RegretReport& report) {
  std::string out = "experiment,algorithm,instance,horizon,runs,mean_regret,stderr\n";
  for (const CellSummary& c : report.cells)
    out += fmt::format("{},{},{},{},{},{:.10g},{:.10g}\n", c.experiment, c.algorithm,
                       c.instance ? std::to_string(*c.instance) : std::string("all"), c.horizon,
                       c.runs, c.mean, c.stderr_);
  return out;
}

json report_json(const RegretReport& report) {
  const ExperimentPlan& p = report.plan;
  json plan = {
      {"experiment", experiment_name(p.id)},
      {"instances", p.instances},
      {"runs", p.runs},
      {"horizons", p.horizons},
      {"base_seed", p.base_seed},
      {"n", p.n},
      {"m", p.m},
      {"m_values", p.m_values},
      {"eps", p.eps},
      {"tree_arity", p.tree_arity},
      {"tree_depth", p.tree_depth},
      {"allow_mc_fallback", p.allow_mc_fallback},
      {"mc_samples", p.mc_samples},
      {"enumeration_limit", p.enumeration_limit},
  };
  plan["algorithms"] = json::array();
  for (Algorithm a : p.algorithms) plan["algorithms"].push_back(algorithm_name(a));

  json instances = json::array();
  for (const InstanceStats& st : report.instances) {
    json j = {{"index", st.index},
              {"group", st.group},
              {"nodes", st.nodes},
              {"intervenable", st.intervenable},
              {"arms", st.arm_names},
              {"rewards", st.rewards},
              {"monte_carlo", st.monte_carlo},
              {"best_arm", st.best_arm},
              {"gap0", st.gap0}};
    if (st.qm) {
      j["q"] = st.qm->q;
      j["k"] = st.qm->k;
      j["m"] = st.qm->m;
    } else {
      j["m"] = nullptr;
    }
    if (!st.crm_arms.empty()) {
      json arms = json::array();
      for (const CrmArmOracle& a : st.crm_arms)
        arms.push_back({{"gap", a.gap}, {"p_min", a.p_min}, {"domain", a.domain}});
      j["crm_arms"] = std::move(arms);
    }
    instances.push_back(std::move(j));
  }

  // [instance, run, algorithm, horizon, seed]; cumulative algorithms run once
  // at the largest horizon.
  json seeds = json::array();
  for (std::size_t i = 0; i < report.raw.size(); ++i)
    for (std::size_t r = 0; r < p.runs; ++r)
      for (Algorithm a : p.algorithms) {
        if (is_cumulative(a)) {
          const std::size_t t = p.horizons.back();
          seeds.push_back({i, r, algorithm_name(a), t, cell_seed(p.base_seed, i, r, a, t)});
        } else {
          for (std::size_t t : p.horizons)
            seeds.push_back({i, r, algorithm_name(a), t, cell_seed(p.base_seed, i, r, a, t)});
        }
      }

  json bounds = json::array();
  for (const BoundSeries& b : report.bounds) {
    json j = {{"algorithm", b.algorithm}, {"group", b.group},         {"horizons", b.horizons},
              {"shape", b.shape},         {"dominated", b.dominated}, {"guarded", b.guarded},
              {"note", b.note},           {"shape_only", true}};
    j["constant"] = b.constant ? json(*b.constant) : json(nullptr);
    bounds.push_back(std::move(j));
  }

  return {{"format", "cbandit-report"},
          {"version", 1},
          {"plan", std::move(plan)},
          {"seed_scheme", "splitmix64 fold of (base, instance, run, algorithm, horizon)"},
          {"instances", std::move(instances)},
          {"seeds", std::move(seeds)},
          {"bounds", std::move(bounds)}};
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument(fmt::format("cannot write {}", path.string()));
  f << text;
  if (!f) throw InvalidArgument(fmt::format("failed writing {}", path.string()));
}

}  // namespace

void write_report(const RegretReport& report, const std::filesystem::path& stem,
                  ReportFormats formats) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  auto with = [&](const char* ext) {
    std::filesystem::path p = stem;
    p += ext;
    return p;
  };
  if (formats.csv) write_text(with(".csv"), report_csv(report));
  if (formats.json) write_text(with(".json"), report_json(report).dump(1) + "\n");
  if (formats.svg) write_text(with(".svg"), report_svg(report));
}

}  // namespace cbandit
