#include "doctest.h"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cbandit/errors.hpp"
#include "cbandit/generators.hpp"
#include "cbandit/harness.hpp"

using namespace cbandit;
namespace fs = std::filesystem;

namespace {

ExperimentPlan small_exp1() {
  ExperimentPlan p;
  p.id = ExperimentId::Exp1;
  p.instances = 2;
  p.runs = 4;
  p.n = 20;
  p.horizons = {100, 300};
  p.algorithms = {Algorithm::Srm, Algorithm::Ue, Algorithm::Sr};
  p.base_seed = 11;
  return p;
}

ExperimentPlan small_exp3() {
  ExperimentPlan p = canonical_plan(ExperimentId::Exp3, 5);
  p.runs = 3;
  p.horizons = {200, 400, 800};
  p.jobs = 1;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("plan validation") {
  ExperimentPlan p = small_exp1();
  CHECK_NOTHROW(p.validate());
  auto rejects = [](ExperimentPlan q) { CHECK_THROWS_AS(q.validate(), InvalidArgument); };
  {
    auto q = p;
    q.runs = 0;
    rejects(q);
  }
  {
    auto q = p;
    q.horizons = {300, 100};
    rejects(q);
  }
  {
    auto q = p;
    q.horizons.clear();
    rejects(q);
  }
  {
    auto q = p;
    q.algorithms.clear();
    rejects(q);
  }
  {
    auto q = p;
    q.jobs = 0;
    rejects(q);
  }
  {
    auto q = p;
    q.id = ExperimentId::Custom;
    rejects(q);
  }
  {
    auto q = p;
    q.id = ExperimentId::Exp2;
    rejects(q);
  }
  CHECK_THROWS_AS(canonical_plan(ExperimentId::Custom, 0), InvalidArgument);
  CHECK(parse_experiment("tree-lb") == ExperimentId::TreeLb);
  CHECK_THROWS_AS(parse_experiment("exp4"), InvalidArgument);
}

TEST_CASE("canonical plans") {
  const auto e1 = canonical_plan(ExperimentId::Exp1, 1);
  CHECK(e1.horizons == std::vector<std::size_t>{500, 1000, 1500, 2000, 2500});
  CHECK(e1.n == 100);
  CHECK(e1.m == 9);
  const auto e2 = canonical_plan(ExperimentId::Exp2, 1);
  CHECK(e2.horizons == std::vector<std::size_t>{1600});
  CHECK(e2.m_values.front() == 10);
  CHECK(e2.m_values.back() == 50);
  CHECK(e2.m_values.size() == 21);
  const auto e3 = canonical_plan(ExperimentId::Exp3, 1);
  CHECK(e3.horizons.back() == 50000);
  CHECK(e3.algorithms == std::vector<Algorithm>{Algorithm::Crm, Algorithm::Ucb1});
  CHECK(canonical_plan(ExperimentId::Exp5, 1).n == 10);
}

TEST_CASE("seeds differ per coordinate") {
  const auto s = cell_seed(1, 0, 0, Algorithm::Srm, 100);
  CHECK(s == cell_seed(1, 0, 0, Algorithm::Srm, 100));
  CHECK(s != cell_seed(2, 0, 0, Algorithm::Srm, 100));
  CHECK(s != cell_seed(1, 1, 0, Algorithm::Srm, 100));
  CHECK(s != cell_seed(1, 0, 1, Algorithm::Srm, 100));
  CHECK(s != cell_seed(1, 0, 0, Algorithm::Ue, 100));
  CHECK(s != cell_seed(1, 0, 0, Algorithm::Srm, 200));
  CHECK(instance_seed(1, 0) != instance_seed(1, 1));
}

TEST_CASE("summaries are recomputable from the raw regrets") {
  const RegretReport r = execute(small_exp1());
  REQUIRE(r.raw.size() == 2);
  for (const CellSummary& c : r.cells) {
    const std::size_t a = static_cast<std::size_t>(
        std::find_if(r.plan.algorithms.begin(), r.plan.algorithms.end(),
                     [&](Algorithm x) { return algorithm_name(x) == c.algorithm; }) -
        r.plan.algorithms.begin());
    const std::size_t h = static_cast<std::size_t>(
        std::find(r.plan.horizons.begin(), r.plan.horizons.end(), c.horizon) - r.plan.horizons.begin());
    std::vector<double> xs;
    for (std::size_t i = 0; i < r.raw.size(); ++i) {
      if (c.instance && *c.instance != i) continue;
      for (const auto& run : r.raw[i]) xs.push_back(run[a][h]);
    }
    CHECK(c.runs == xs.size());
    CHECK(c.mean == doctest::Approx(oracle::mean(xs)).epsilon(1e-12));
    CHECK(c.stderr_ == doctest::Approx(oracle::stderr_of(xs)).epsilon(1e-12));
    CHECK(c.experiment == "exp1");
  }
  for (const auto& inst : r.raw)
    for (const auto& run : inst)
      for (const auto& algo : run)
        for (double v : algo) CHECK(v >= 0.0);
  CHECK(r.pooled("exp1", Algorithm::Srm, 300) != nullptr);
  CHECK(r.pooled("exp1", Algorithm::Srm, 301) == nullptr);
}

TEST_CASE("thread count does not change the results") {
  ExperimentPlan p = small_exp1();
  const std::string one = report_csv(execute(p));
  p.jobs = 3;
  CHECK(report_csv(execute(p)) == one);
  CHECK(report_json(execute(p)).dump() == report_json(execute(p)).dump());
}

TEST_CASE("cumulative algorithms are read off one long run") {
  const RegretReport r = execute(small_exp3());
  for (const auto& inst : r.raw)
    for (const auto& run : inst)
      for (const auto& algo : run)
        for (std::size_t h = 1; h < algo.size(); ++h) CHECK(algo[h] >= algo[h - 1]);
  // The run at the largest horizon reproduces the earlier checkpoints.
  const BanditEnv env = BanditEnv::exact(std::make_shared<const Cbn>(gen_experiment3()));
  Rng rng(cell_seed(5, 0, 1, Algorithm::Ucb1, 800));
  const RegretTrace t = run_ucb1(env, 800, rng);
  CHECK(r.raw[0][1][1][0] == t.cumulative[199]);
  CHECK(r.raw[0][1][1][2] == t.cumulative[799]);
}

TEST_CASE("sweep labels and instance indices") {
  ExperimentPlan p;
  p.id = ExperimentId::Exp2;
  p.instances = 2;
  p.runs = 2;
  p.n = 30;
  p.m_values = {10, 12};
  p.horizons = {200};
  p.algorithms = {Algorithm::Srm};
  const RegretReport r = execute(p);
  REQUIRE(r.instances.size() == 4);
  CHECK(r.instances[0].group == "m=10");
  CHECK(r.instances[3].group == "m=12");
  CHECK(r.instances[2].qm->m == 12);
  CHECK(r.pooled("exp2/m=12", Algorithm::Srm, 200)->runs == 4);
  const std::string csv = report_csv(r);
  CHECK(csv.rfind("experiment,algorithm,instance,horizon,runs,mean_regret,stderr\n", 0) == 0);
  CHECK(csv.find("exp2/m=12,srm,3,200,2,") != std::string::npos);
  CHECK(csv.find("exp2/m=10,srm,all,200,4,") != std::string::npos);
}

TEST_CASE("bound overlay") {
  RegretReport r = execute(small_exp1());
  overlay_bounds(r);
  REQUIRE(r.bounds.size() == 1);
  const BoundSeries& b = r.bounds[0];
  CHECK(b.algorithm == "srm");
  REQUIRE(b.constant);
  double num = 0.0, den = 0.0;
  bool dominated = true;
  for (std::size_t h = 0; h < b.horizons.size(); ++h) {
    double shape = 0.0;
    for (const auto& st : r.instances)
      shape += std::sqrt(st.qm->m / static_cast<double>(b.horizons[h]) *
                         std::log(st.intervenable * static_cast<double>(b.horizons[h]) / st.qm->m));
    shape /= static_cast<double>(r.instances.size());
    CHECK(b.shape[h] == doctest::Approx(shape).epsilon(1e-12));
    const CellSummary* c = r.pooled("exp1", Algorithm::Srm, b.horizons[h]);
    num += c->mean * shape;
    den += shape * shape;
  }
  CHECK(*b.constant == doctest::Approx(num / den).epsilon(1e-12));
  for (std::size_t h = 0; h < b.horizons.size(); ++h) {
    const CellSummary* c = r.pooled("exp1", Algorithm::Srm, b.horizons[h]);
    dominated &= c->mean <= *b.constant * b.shape[h] + 2.0 * c->stderr_;
  }
  CHECK(b.dominated == dominated);

  RegretReport crm = execute(small_exp3());
  overlay_bounds(crm);
  REQUIRE(crm.bounds.size() == 1);
  // a0 is optimal on experiment 3, so the expression has no finite value.
  CHECK(crm.instances[0].best_arm == 0);
  CHECK(crm.bounds[0].algorithm == "crm");
  CHECK(crm.bounds[0].guarded);
  CHECK_FALSE(crm.bounds[0].constant);
}

TEST_CASE("oracle statistics") {
  const RegretReport r = execute(small_exp3());
  const InstanceStats& st = r.instances[0];
  CHECK(st.nodes == 4);
  CHECK(st.rewards[0] == doctest::Approx(0.625));
  CHECK(st.gap0 == 0.0);
  REQUIRE(st.crm_arms.size() == 4);
  for (const CrmArmOracle& a : st.crm_arms) CHECK(a.gap == doctest::Approx(0.125));
  CHECK(st.arm_names.front() == "a0");
}

TEST_CASE("errors inside workers reach the caller") {
  ExperimentPlan p;
  RandomCbnParams rp;
  rp.confounders = 1;
  rp.observable = 5;
  p.models = {std::make_shared<const Cbn>(gen_random(8, rp))};
  p.horizons = {50};
  p.runs = 3;
  p.jobs = 2;
  p.algorithms = {Algorithm::Crm};
  CHECK_THROWS_AS(execute(p), StructuralError);
}

TEST_CASE("report files") {
  const fs::path dir = fs::temp_directory_path() / "cbandit_harness_test";
  fs::remove_all(dir);
  const RegretReport r = execute(small_exp1());
  write_report(r, dir / "nested" / "out", {true, true, true});
  CHECK(slurp(dir / "nested" / "out.csv") == report_csv(r));
  const auto doc = nlohmann::json::parse(slurp(dir / "nested" / "out.json"));
  CHECK(doc["format"] == "cbandit-report");
  CHECK(doc["version"] == 1);
  CHECK(doc["seeds"].size() == 2 * 4 * 3 * 2);
  const std::string svg = slurp(dir / "nested" / "out.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  fs::remove_all(dir);
}
