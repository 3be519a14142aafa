#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "cbandit/errors.hpp"
#include "cbandit/generators.hpp"
#include "cbandit/harness.hpp"
#include "cbandit/inference.hpp"
#include "cbandit/instance_io.hpp"

namespace cbandit {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::size_t limit = kDefaultEnumerationLimit;
  std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::string> formats;
  bool mc_fallback = false;
};

std::uint64_t require_seed(const CommonOptions& o, std::string_view what) {
  if (!o.seed) throw InvalidArgument(fmt::format("{} needs --seed", what));
  return *o.seed;
}

ReportFormats parse_formats(const std::vector<std::string>& names, ReportFormats defaults) {
  if (names.empty()) return defaults;
  ReportFormats f{false, false, false};
  for (const std::string& n : names) {
    if (n == "csv")
      f.csv = true;
    else if (n == "json")
      f.json = true;
    else if (n == "svg")
      f.svg = true;
    else
      throw InvalidArgument(fmt::format("unknown format '{}'", n));
  }
  return f;
}

std::vector<Algorithm> parse_algorithms(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const std::string& n : names) out.push_back(parse_algorithm(n));
  return out;
}

void print_oracle(std::ostream& out, const Cbn& cbn, std::size_t limit) {
  const Admg& g = cbn.visible_graph();
  try {
    const auto rewards = exact_rewards(cbn, limit);
    const auto arms = arm_list(g);
    const std::size_t best = argmax(rewards);
    out << fmt::format("  mu0 = {:.6f}, best arm {} = {:.6f}\n", rewards[0], arm_name(arms[best], g),
                       rewards[best]);
    out << fmt::format("  m = {}\n", exact_q_and_m(cbn, limit).m);
  } catch (const EnumerationInfeasible& e) {
    out << "  oracle: enumeration infeasible (" << e.what() << ")\n";
  }
}

// gen ------------------------------------------------------------------------

struct GenOptions {
  std::string kind;
  fs::path out;
  std::optional<std::size_t> n, m;
  std::optional<double> eps;
  std::size_t tree_m = 4, horizon = 1000, arity = 2, depth = 2;
  std::size_t observable = 6, confounders = 0, max_parents = 2;
};

int cmd_gen(const GenOptions& o, const CommonOptions& c, std::ostream& out) {
  std::vector<std::pair<fs::path, Cbn>> made;
  auto path_or = [&](const char* fallback) { return o.out.empty() ? fs::path(fallback) : o.out; };
  if (o.kind == "exp1") {
    made.emplace_back(path_or("exp1.json"),
                      gen_experiment1(require_seed(c, "gen exp1"), o.n.value_or(100), o.m.value_or(9),
                                      o.eps.value_or(0.3)));
  } else if (o.kind == "exp2") {
    if (!o.m) throw InvalidArgument("gen exp2 needs --m");
    made.emplace_back(path_or("exp2.json"), gen_experiment2(require_seed(c, "gen exp2"),
                                                            o.n.value_or(100), *o.m, o.eps.value_or(0.3)));
  } else if (o.kind == "exp3") {
    made.emplace_back(path_or("exp3.json"), gen_experiment3());
  } else if (o.kind == "exp5") {
    made.emplace_back(path_or("exp5.json"), gen_experiment5(require_seed(c, "gen exp5"),
                                                            o.n.value_or(10), o.eps.value_or(0.1)));
  } else if (o.kind == "tree-lb" || o.kind == "tree_lb") {
    const fs::path dir = path_or("tree-lb");
    auto models = gen_tree_lower_bound(TreeShape::complete(o.arity, o.depth), o.tree_m, o.horizon);
    for (std::size_t i = 0; i < models.size(); ++i)
      made.emplace_back(dir / fmt::format("C{}.json", i), std::move(models[i]));
  } else if (o.kind == "random") {
    RandomCbnParams p;
    p.observable = o.observable;
    p.confounders = o.confounders;
    p.max_parents = o.max_parents;
    made.emplace_back(path_or("random.json"), gen_random(require_seed(c, "gen random"), p));
  } else {
    throw InvalidArgument(fmt::format("unknown instance kind '{}'", o.kind));
  }
  for (auto& [path, cbn] : made) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    save_instance(cbn, path);
    out << "wrote " << path.string() << "\n";
    print_oracle(out, cbn, c.limit);
  }
  return 0;
}

// inspect --------------------------------------------------------------------

json inspect_json(const Cbn& cbn, std::size_t limit) {
  const Admg& g = cbn.visible_graph();
  auto labels = [&](const std::vector<NodeId>& v) {
    json a = json::array();
    for (NodeId x : v) a.push_back(g.label(x));
    return a;
  };
  json j;
  j["nodes"] = g.size();
  j["hidden"] = cbn.graph().size() - g.size();
  j["reward"] = g.label(g.reward());
  j["topological_order"] = labels(topological_order(g));
  j["c_components"] = json::array();
  for (const auto& comp : c_components(g)) j["c_components"].push_back(labels(comp));
  j["intervenable"] = json::array();
  for (NodeId xi : g.intervenable()) {
    const auto ctx = pa_plus_and_pa_c(g, xi);
    j["intervenable"].push_back({{"node", g.label(xi)},
                                 {"component", labels(ctx.component)},
                                 {"pa_plus", labels(ctx.pa_plus)},
                                 {"pa_c", labels(ctx.pa_c)},
                                 {"k", ctx.k}});
  }
  const auto ident = check_identifiability(g);
  j["identifiable"] = ident.identifiable;
  if (ident.witness) {
    j["witness"] = {{"intervened", g.label(ident.witness->intervened)},
                    {"child", g.label(ident.witness->child)},
                    {"path", labels(ident.witness->path)}};
  }
  try {
    const auto rewards = exact_rewards(cbn, limit);
    json r = json::object();
    const auto arms = arm_list(g);
    json names = json::array();
    for (std::size_t a = 0; a < arms.size(); ++a) names.push_back(arm_name(arms[a], g));
    j["arms"] = names;
    j["rewards"] = rewards;
    j["best_arm"] = names[argmax(rewards)];
    const QmResult qm = exact_q_and_m(cbn, limit);
    j["q"] = qm.q;
    j["k"] = qm.k;
    j["m"] = qm.m;
  } catch (const EnumerationInfeasible& e) {
    j["rewards"] = nullptr;
    j["oracle_error"] = fmt::format("enumeration infeasible: {}", e.what());
  }
  return j;
}

void print_inspect(std::ostream& out, const json& j) {
  auto list = [](const json& a) {
    std::string s;
    for (const auto& x : a) s += (s.empty() ? "" : ", ") + x.get<std::string>();
    return "{" + s + "}";
  };
  out << fmt::format("nodes: {} observable, {} hidden; reward {}\n", j["nodes"].get<std::size_t>(),
                     j["hidden"].get<std::size_t>(), j["reward"].get<std::string>());
  out << "topological order: " << list(j["topological_order"]) << "\n";
  out << "c-components:";
  for (const auto& c : j["c_components"]) out << " " << list(c);
  out << "\n";
  for (const auto& x : j["intervenable"])
    out << fmt::format("  {}: S = {}, Pa+ = {}, Pac = {}, k = {}\n", x["node"].get<std::string>(),
                       list(x["component"]), list(x["pa_plus"]), list(x["pa_c"]),
                       x["k"].get<std::size_t>());
  out << "identifiable: " << (j["identifiable"].get<bool>() ? "true" : "false") << "\n";
  if (j.contains("witness"))
    out << fmt::format("  witness: {} has child {} in its c-component via {}\n",
                       j["witness"]["intervened"].get<std::string>(),
                       j["witness"]["child"].get<std::string>(), list(j["witness"]["path"]));
  if (j["rewards"].is_null()) {
    out << "rewards: " << j["oracle_error"].get<std::string>() << "\n";
    return;
  }
  out << "rewards:\n";
  for (std::size_t a = 0; a < j["arms"].size(); ++a)
    out << fmt::format("  {:<16} {:.6f}\n", j["arms"][a].get<std::string>(),
                       j["rewards"][a].get<double>());
  out << "best arm: " << j["best_arm"].get<std::string>() << "\n";
  out << "q:";
  for (const auto& q : j["q"]) out << fmt::format(" {:.6g}", q.get<double>());
  out << "\nm: " << j["m"].get<std::size_t>() << "\n";
}

// run / experiment ------------------------------------------------------------

void print_summary(std::ostream& out, const RegretReport& report) {
  for (const CellSummary& c : report.cells)
    if (!c.instance)
      out << fmt::format("{:<12} {:<5} T={:<7} runs={:<5} regret {:.6f} +- {:.6f}\n", c.experiment,
                         c.algorithm, c.horizon, c.runs, c.mean, c.stderr_);
  for (const BoundSeries& b : report.bounds) {
    if (b.constant)
      out << fmt::format("bound {}{}: constant {:.4g}, {}\n", b.algorithm,
                         b.group.empty() ? "" : " " + b.group, *b.constant,
                         b.dominated ? "dominates" : "does not dominate");
    else
      out << fmt::format("bound {}: skipped ({})\n", b.algorithm, b.note);
  }
}

struct RunOptions {
  std::vector<fs::path> instances;
  std::vector<std::string> algos;
  std::vector<std::size_t> horizons;
  std::size_t runs = 1;
  fs::path out = "run";
};

int cmd_run(const RunOptions& o, const CommonOptions& c, std::ostream& out) {
  ExperimentPlan plan;
  plan.id = ExperimentId::Custom;
  plan.base_seed = require_seed(c, "run");
  for (const fs::path& p : o.instances) plan.models.push_back(std::make_shared<const Cbn>(load_instance(p)));
  plan.instances = plan.models.size();
  plan.algorithms = parse_algorithms(o.algos);
  plan.horizons = o.horizons;
  plan.runs = o.runs;
  plan.jobs = c.jobs;
  plan.enumeration_limit = c.limit;
  plan.allow_mc_fallback = c.mc_fallback;
  plan.output = o.out;
  for (Algorithm a : plan.algorithms)
    if (a == Algorithm::Crm)
      for (const auto& m : plan.models)
        if (m->graph().has_hidden() || m->graph().has_bidirected())
          throw StructuralError(
              "CRM requires every node of the model to be observable (no hidden or bidirected "
              "nodes)");
  RegretReport report = execute(plan);
  overlay_bounds(report);
  write_report(report, o.out, parse_formats(c.formats, {}));
  print_summary(out, report);
  return 0;
}

struct ExperimentOptions {
  std::string id;
  fs::path out = "results";
  std::optional<std::size_t> runs, instances, n, m;
  std::optional<double> eps;
  std::vector<std::size_t> horizons, m_values;
  std::vector<std::string> algos;
};

int cmd_experiment(const ExperimentOptions& o, const CommonOptions& c, std::ostream& out) {
  const ExperimentId id = parse_experiment(o.id);
  if (id == ExperimentId::Custom) throw InvalidArgument("use `run` for custom instances");
  ExperimentPlan plan = canonical_plan(id, require_seed(c, "experiment"));
  if (o.runs) plan.runs = *o.runs;
  if (o.instances) plan.instances = *o.instances;
  if (o.n) plan.n = *o.n;
  if (o.m) plan.m = *o.m;
  if (o.eps) plan.eps = *o.eps;
  if (!o.horizons.empty()) plan.horizons = o.horizons;
  if (!o.m_values.empty()) plan.m_values = o.m_values;
  if (!o.algos.empty()) plan.algorithms = parse_algorithms(o.algos);
  plan.jobs = c.jobs;
  plan.enumeration_limit = c.limit;
  plan.allow_mc_fallback = c.mc_fallback;
  plan.output = o.out / experiment_name(id);
  RegretReport report = execute(plan);
  overlay_bounds(report);
  write_report(report, plan.output, parse_formats(c.formats, {true, true, true}));
  print_summary(out, report);
  return 0;
}

void add_common(CLI::App* sub, CommonOptions& c, bool stochastic, bool reports) {
  if (stochastic) sub->add_option("--seed", c.seed, "base seed (required, no default)");
  sub->add_option("--limit", c.limit, "enumeration limit for exact oracles");
  if (reports) {
    sub->add_option("--jobs", c.jobs, "worker threads")->envname("CB_JOBS");
    sub->add_option("--format", c.formats, "output formats: csv, json, svg")->delimiter(',');
    sub->add_flag("--mc-fallback", c.mc_fallback,
                  "estimate oracle rewards by sampling when enumeration is infeasible");
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Causal bandits on causal Bayesian networks with latent confounders", "cbandit"};
  app.require_subcommand(1);

  CommonOptions common;
  GenOptions gen;
  auto* g = app.add_subcommand("gen", "generate instance files");
  g->add_option("kind", gen.kind, "exp1 | exp2 | exp3 | exp5 | tree-lb | random")->required();
  g->add_option("--out", gen.out, "output file (directory for tree-lb)");
  g->add_option("--N", gen.n, "intervenable nodes");
  g->add_option("--m", gen.m, "target m");
  g->add_option("--eps", gen.eps, "reward gap");
  g->add_option("--M", gen.tree_m, "tree-lb: number of alternatives");
  g->add_option("--T", gen.horizon, "tree-lb: horizon used for the constants");
  g->add_option("--arity", gen.arity, "tree-lb: branching factor");
  g->add_option("--depth", gen.depth, "tree-lb: depth");
  g->add_option("--observable", gen.observable, "random: observable nodes");
  g->add_option("--confounders", gen.confounders, "random: latent confounders");
  g->add_option("--max-parents", gen.max_parents, "random: parent cap");
  add_common(g, common, true, false);

  std::string inspect_path;
  bool inspect_as_json = false;
  auto* ins = app.add_subcommand("inspect", "print structure and oracle values of an instance");
  ins->add_option("instance", inspect_path)->required()->check(CLI::ExistingFile);
  ins->add_flag("--json", inspect_as_json, "print JSON");
  add_common(ins, common, false, false);

  RunOptions run;
  auto* r = app.add_subcommand("run", "run algorithms on instance files");
  r->add_option("instances", run.instances)->required()->check(CLI::ExistingFile);
  r->add_option("--algo", run.algos, "srm | crm | ue | sr | ucb1")->required()->delimiter(',');
  r->add_option("--T", run.horizons, "horizons, strictly increasing")->required()->delimiter(',');
  r->add_option("--runs", run.runs, "runs per instance")->check(CLI::PositiveNumber);
  r->add_option("--out", run.out, "report path stem");
  add_common(r, common, true, true);

  ExperimentOptions exp;
  auto* e = app.add_subcommand("experiment", "reproduce an experiment");
  e->add_option("id", exp.id, "exp1 | exp2 | exp3 | exp5 | tree_lb")->required();
  e->add_option("--out", exp.out, "output directory");
  e->add_option("--runs", exp.runs, "runs per instance");
  e->add_option("--instances", exp.instances, "instances");
  e->add_option("--N", exp.n, "intervenable nodes");
  e->add_option("--m", exp.m, "target m (exp1) or M (tree_lb)");
  e->add_option("--eps", exp.eps, "reward gap");
  e->add_option("--T", exp.horizons, "horizons")->delimiter(',');
  e->add_option("--m-values", exp.m_values, "exp2 sweep")->delimiter(',');
  e->add_option("--algo", exp.algos, "algorithms")->delimiter(',');
  add_common(e, common, true, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& ex) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }

  try {
    if (g->parsed()) return cmd_gen(gen, common, out);
    if (ins->parsed()) {
      const Cbn cbn = load_instance(inspect_path);
      const json j = inspect_json(cbn, common.limit);
      if (inspect_as_json)
        out << j.dump(1) << "\n";
      else
        print_inspect(out, j);
      return 0;
    }
    if (r->parsed()) return cmd_run(run, common, out);
    if (e->parsed()) return cmd_experiment(exp, common, out);
  } catch (const EnumerationInfeasible& ex) {
    err << "error: " << ex.what() << "\n";
    return 4;
  } catch (const InvalidArgument& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return 3;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace cbandit
