#include "doctest.h"
#include "oracles.hpp"

#include "cbandit/cbn.hpp"
#include "cbandit/errors.hpp"
#include "cbandit/generators.hpp"
#include "cbandit/inference.hpp"
#include "cbandit/instance_io.hpp"

using namespace cbandit;

namespace {

// A -> B -> Y with deterministic CPTs: A = 1, B = not A, Y = B.
Cbn deterministic_chain() {
  Admg g;
  const NodeId a = g.add_node("A", false, true), b = g.add_node("B", false, true), y = g.add_node("Y");
  g.add_edge(a, b);
  g.add_edge(b, y);
  g.set_reward(y);
  return Cbn(g, {{a, {}, {1.0}}, {b, {a}, {1.0, 0.0}}, {y, {b}, {0.0, 1.0}}});
}

}  // namespace

TEST_CASE("arm list order and names") {
  const Cbn c = gen_experiment3();
  const auto arms = arm_list(c.visible_graph());
  REQUIRE(arms.size() == 5);
  CHECK(arms[0].is_observe());
  CHECK(arms[1] == Arm::intervene(1, 0));
  CHECK(arms[2] == Arm::intervene(1, 1));
  CHECK(arms[3] == Arm::intervene(2, 0));
  CHECK(arms[4] == Arm::intervene(2, 1));
  CHECK(arm_name(arms[0], c.visible_graph()) == "a0");
  CHECK(arm_name(arms[4], c.visible_graph()) == "do(X3=1)");
}

TEST_CASE("Cbn construction rejects malformed CPTs") {
  Admg g;
  const NodeId a = g.add_node("A", false, true), y = g.add_node("Y");
  g.add_edge(a, y);
  g.set_reward(y);
  CHECK_NOTHROW(Cbn(g, {{a, {}, {0.5}}, {y, {a}, {0.1, 0.9}}}));
  CHECK_THROWS_AS(Cbn(g, {{a, {}, {0.5}}}), StructuralError);
  CHECK_THROWS_AS(Cbn(g, {{a, {}, {0.5}}, {y, {a}, {0.1}}}), StructuralError);
  CHECK_THROWS_AS(Cbn(g, {{a, {}, {1.5}}, {y, {a}, {0.1, 0.9}}}), StructuralError);
  CHECK_THROWS_AS(Cbn(g, {{a, {y}, {0.5, 0.5}}, {y, {a}, {0.1, 0.9}}}), StructuralError);

  // Hidden nodes must come last.
  Admg h;
  const NodeId u = h.add_node("U", true), b = h.add_node("B"), r = h.add_node("Y");
  h.add_edge(u, b);
  h.add_edge(u, r);
  h.set_reward(r);
  CHECK_THROWS_AS(Cbn(h, {{u, {}, {0.5}}, {b, {u}, {0.5, 0.5}}, {r, {u}, {0.5, 0.5}}}),
                  StructuralError);
}

TEST_CASE("deterministic CPTs give the unique evaluation") {
  const Cbn c = deterministic_chain();
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const ObsRecord r = sample(c, Arm::observe(), rng);
    CHECK(r.values == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(r.reward == 0);
  }
  const ObsRecord d = sample(c, Arm::intervene(1, 1), rng);
  CHECK(d.values == std::vector<std::uint8_t>{1, 1, 1});
  CHECK(d.reward == 1);
}

TEST_CASE("interventions force the target and reject non-intervenable nodes") {
  const Cbn c = gen_experiment3();
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) CHECK(sample(c, Arm::intervene(1, 1), rng).values[1] == 1);
  CHECK_THROWS_AS(sample(c, Arm::intervene(0, 1), rng), InvalidArgument);
}

TEST_CASE("experiment 3 observational reward by sampling") {
  const Cbn c = gen_experiment3();
  Rng rng(11);
  std::size_t wins = 0;
  const std::size_t n = 100000;
  for (std::size_t i = 0; i < n; ++i) wins += sample(c, Arm::observe(), rng).reward;
  CHECK(std::abs(static_cast<double>(wins) / n - 0.625) < 0.01);
}

TEST_CASE("hidden nodes are sampled but not recorded") {
  Admg g;
  const NodeId x = g.add_node("X", false, true), y = g.add_node("Y"), u = g.add_node("U", true);
  g.add_edge(u, x);
  g.add_edge(u, y);
  g.add_edge(x, y);
  g.set_reward(y);
  const Cbn c(g, {{x, {u}, {0.2, 0.8}}, {y, {x, u}, {0.1, 0.5, 0.6, 0.9}}, {u, {}, {0.5}}});
  Rng rng(3);
  const ObsRecord r = sample(c, Arm::observe(), rng);
  CHECK(r.values.size() == 2);
  CHECK(r.reward == r.values[1]);
  CHECK(c.visible_graph().has_bidirected(x, y));
}

TEST_CASE("sampling agrees with the enumeration oracle") {
  // 4 standard errors at 200k samples.
  const double tol = 4.0 * std::sqrt(0.25 / 200000.0);
  std::size_t inside = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    RandomCbnParams p;
    p.observable = 5 + seed % 4;
    p.confounders = seed % 2;
    const Cbn c = gen_random(seed, p);
    for (const Arm& arm : arm_list(c.visible_graph())) {
      Rng rng(mix_seed(seed, arm.target, arm.value));
      std::size_t wins = 0;
      for (int i = 0; i < 200000; ++i) wins += sample(c, arm, rng).reward;
      inside += std::abs(wins / 200000.0 - oracle::reward(c, arm)) < tol;
      ++total;
    }
  }
  CHECK(static_cast<double>(inside) >= 0.99 * static_cast<double>(total) - 1.0);
}

TEST_CASE("interventional joint matches the mutilated model") {
  // Chi-square sanity on 5-node models: the 32-cell joint under do().
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    RandomCbnParams p;
    p.observable = 5;
    const Cbn c = gen_random(seed + 40, p);
    const Arm arm = arm_list(c.visible_graph()).back();
    const auto joint = oracle::full_joint(c, arm);
    std::vector<double> counts(joint.size(), 0.0);
    Rng rng(seed);
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
      const ObsRecord r = sample(c, arm, rng);
      CHECK(r.values[arm.target] == arm.value);
      std::size_t s = 0;
      for (std::size_t v = 0; v < r.values.size(); ++v) s |= std::size_t{r.values[v]} << v;
      counts[s] += 1.0;
    }
    double chi2 = 0.0;
    std::size_t cells = 0;
    for (std::size_t s = 0; s < joint.size(); ++s) {
      if (joint[s] == 0.0) {
        CHECK(counts[s] == 0.0);
        continue;
      }
      const double e = joint[s] * n;
      chi2 += (counts[s] - e) * (counts[s] - e) / e;
      ++cells;
    }
    // Mean cells-1, sd sqrt(2(cells-1)); 6 sd is a generous ceiling.
    CHECK(chi2 < static_cast<double>(cells - 1) + 6.0 * std::sqrt(2.0 * static_cast<double>(cells - 1)));
  }
}

TEST_CASE("instance files round-trip bit-exactly") {
  std::vector<Cbn> models{gen_experiment3(), gen_experiment1(4, 30, 9, 0.3), gen_experiment5(2)};
  RandomCbnParams p;
  p.confounders = 2;
  models.push_back(gen_random(9, p));
  for (Cbn& c : gen_tree_lower_bound(TreeShape::complete(2, 2), 4, 500)) models.push_back(c);
  for (const Cbn& c : models) {
    const std::string text = dump_instance(c);
    const Cbn back = parse_instance(text);
    CHECK(back == c);
    CHECK(dump_instance(back) == text);
  }
}

TEST_CASE("instance parse errors") {
  CHECK_THROWS_AS(parse_instance("not json"), ParseError);
  CHECK_THROWS_AS(parse_instance("{}"), ParseError);
  CHECK_THROWS_AS(parse_instance(R"({"format":"cbandit-instance","version":99})"), ParseError);
  auto doc = instance_to_json(gen_experiment3());
  doc["cpts"][0]["table"] = {0.5, 0.5};
  CHECK_THROWS_AS(instance_from_json(doc), StructuralError);
}
