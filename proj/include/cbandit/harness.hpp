#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cbandit/algorithms.hpp"
#include "cbandit/cbn.hpp"
#include "cbandit/inference.hpp"

namespace cbandit {

enum class ExperimentId : std::uint8_t { Exp1, Exp2, Exp3, Exp5, TreeLb, Custom };

std::string_view experiment_name(ExperimentId id);
ExperimentId parse_experiment(std::string_view name);

struct ExperimentPlan {
  ExperimentId id = ExperimentId::Custom;
  std::size_t instances = 1;
  std::size_t runs = 1;
  std::vector<std::size_t> horizons;
  std::vector<Algorithm> algorithms;
  std::uint64_t base_seed = 0;
  std::filesystem::path output;  // report stem; empty for in-memory use

  // Generator knobs. exp2 sweeps `m_values`; the others use `m`.
  std::size_t n = 100;
  std::size_t m = 9;
  std::vector<std::size_t> m_values;
  double eps = 0.3;
  std::size_t tree_arity = 2;
  std::size_t tree_depth = 3;

  std::vector<std::shared_ptr<const Cbn>> models;  // custom only

  std::size_t jobs = 1;
  bool allow_mc_fallback = false;
  std::size_t mc_samples = 1'000'000;
  std::size_t enumeration_limit = kDefaultEnumerationLimit;

  void validate() const;
};

// Canonical protocol for an id; `tree_lb` uses the horizon for its constants.
ExperimentPlan canonical_plan(ExperimentId id, std::uint64_t base_seed);

// Seed of one (instance, run, algorithm, horizon) cell.
std::uint64_t cell_seed(std::uint64_t base, std::size_t instance, std::size_t run, Algorithm a,
                        std::size_t horizon);
// Seed used to generate instance `instance`.
std::uint64_t instance_seed(std::uint64_t base, std::size_t instance);

struct CrmArmOracle {
  double gap = 0.0;
  double p_min = 0.0;
  std::size_t domain = 1;
};

struct InstanceStats {
  std::size_t index = 0;
  std::string group;  // sweep label, e.g. "m=10"; empty without a sweep
  std::size_t nodes = 0;
  std::size_t intervenable = 0;
  std::vector<std::string> arm_names;
  std::vector<double> rewards;
  bool monte_carlo = false;  // rewards estimated by sampling
  std::size_t best_arm = 0;
  std::optional<QmResult> qm;
  std::vector<CrmArmOracle> crm_arms;  // per interventional arm, fully observable models only
  double gap0 = 0.0;
};

struct CellSummary {
  std::string experiment;  // id plus sweep label
  std::string algorithm;
  std::optional<std::size_t> instance;  // nullopt for the pooled row
  std::size_t horizon = 0;
  std::size_t runs = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct BoundSeries {
  std::string algorithm;
  std::string group;
  std::vector<std::size_t> horizons;
  std::vector<double> shape;  // unscaled formula, averaged over instances
  std::optional<double> constant;
  bool dominated = false;  // mean <= c * shape + 2 stderr at every horizon
  bool guarded = false;
  std::string note;
};

struct RegretReport {
  ExperimentPlan plan;
  std::vector<InstanceStats> instances;
  std::vector<CellSummary> cells;
  // raw[inst][run][algo][horizon]
  std::vector<std::vector<std::vector<std::vector<double>>>> raw;
  std::vector<BoundSeries> bounds;

  const CellSummary* pooled(std::string_view experiment, Algorithm a, std::size_t horizon) const;
};

RegretReport execute(const ExperimentPlan& plan);

// Appends shape-only SRM and CRM bound series with a least-squares constant.
void overlay_bounds(RegretReport& report);

std::string report_csv(const RegretReport& report);
nlohmann::json report_json(const RegretReport& report);
// Line chart of pooled means: x is the horizon, or m for a single-horizon sweep.
std::string report_svg(const RegretReport& report);

struct ReportFormats {
  bool csv = true;
  bool json = true;
  bool svg = false;
};

// Writes <stem>.csv, <stem>.json and <stem>.svg as selected.
void write_report(const RegretReport& report, const std::filesystem::path& stem,
                  ReportFormats formats = {});

}  // namespace cbandit
