#include "doctest.h"
#include "oracles.hpp"

#include "cbandit/errors.hpp"
#include "cbandit/generators.hpp"
#include "cbandit/obs_estimation.hpp"

using namespace cbandit;

namespace {

std::vector<ObsRecord> draw(const Cbn& c, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ObsRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample(c, Arm::observe(), rng));
  return out;
}

// Loads D with the true observational conditionals of `cbn`.
void load_true_cpds(DNetwork& d, const Cbn& cbn) {
  const auto joint = oracle::full_joint(cbn, Arm::observe());
  const NodeId target_origin = d.origin[d.target];
  for (NodeId v = 0; v < d.base_size; ++v) {
    Cpt& c = d.learned_cpds[v];
    for (std::uint64_t mask = 0; mask < c.table.size(); ++mask) {
      std::uint64_t care = 0, want = 0;
      bool consistent = true;
      for (std::size_t j = 0; j < c.parent_order.size(); ++j) {
        const NodeId p = c.parent_order[j];
        const bool bit = (mask >> j) & 1;
        const NodeId orig = d.is_clone(p) ? target_origin : d.origin[p];
        if (d.is_clone(p) && bit != (d.value != 0)) consistent = false;
        care |= std::uint64_t{1} << orig;
        if (bit) want |= std::uint64_t{1} << orig;
      }
      const double pz = oracle::prob(joint, care, want);
      if (!consistent || pz == 0.0) {
        c.table[mask] = 0.5;
        continue;
      }
      const std::uint64_t own = std::uint64_t{1} << d.origin[v];
      c.table[mask] = oracle::prob(joint, care | own, want | own) / pz;
    }
  }
}

}  // namespace

TEST_CASE("effective parents") {
  Admg g;
  const NodeId p = g.add_node("P"), v = g.add_node("V");
  g.add_edge(p, v);
  CHECK(effective_parents(g, v, topological_order(g)).set == std::vector<NodeId>{p});
  CHECK(effective_parents(g, p, topological_order(g)).set.empty());

  Admg h;
  const NodeId a = h.add_node("A"), b = h.add_node("B"), u = h.add_node("U"), w = h.add_node("V");
  h.add_edge(a, u);
  h.add_edge(b, w);
  h.add_bidirected(u, w);
  const auto order = topological_order(h);
  CHECK(effective_parents(h, w, order).set == std::vector<NodeId>{a, b, u});
  CHECK(effective_parents(h, u, order).set == std::vector<NodeId>{a});
}

TEST_CASE("D construction") {
  // X -> Y only: Y leaves X's component and gets a clone.
  Admg g;
  const NodeId x = g.add_node("X", false, true), m = g.add_node("M"), y = g.add_node("Y");
  g.add_edge(x, m);
  g.add_edge(m, y);
  g.set_reward(y);
  const DNetwork d = build_D(g, x, 1);
  REQUIRE(d.graph.size() == 4);
  const NodeId clone = d.clone_of[m];
  CHECK(clone == 3);
  CHECK(d.graph.parents(clone).empty());
  CHECK(d.graph.children(clone) == std::vector<NodeId>{m});
  CHECK(d.graph.children(x).empty());
  CHECK(d.clone_of[y] == kNoNode);
  CHECK(d.fixed_nodes() == std::vector<std::pair<NodeId, std::uint8_t>>{{clone, 1}});

  // No descendants outside X's component: nothing is cloned.
  Admg lone;
  const NodeId lx = lone.add_node("X", false, true), ly = lone.add_node("Y");
  lone.add_node("Z");
  lone.add_edge(2, ly);
  lone.set_reward(ly);
  CHECK(build_D(lone, lx, 0).graph.size() == 3);

  // X -> C with X <-> C is rejected.
  Admg bad;
  const NodeId bx = bad.add_node("X", false, true), bc = bad.add_node("Y");
  bad.add_edge(bx, bc);
  bad.add_bidirected(bx, bc);
  bad.set_reward(bc);
  CHECK_THROWS_AS(build_D(bad, bx, 1), StructuralError);
}

TEST_CASE("D with the true conditionals reproduces the interventional reward") {
  std::vector<Cbn> models{gen_experiment3(), oracle::confounded_five()};
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomCbnParams p;
    p.observable = 4 + seed % 4;
    p.confounders = 1 + seed % 3;
    p.max_parents = 2;
    models.push_back(gen_random(seed + 300, p));
  }
  for (const Cbn& c : models) {
    const Admg& g = c.visible_graph();
    const ObservationalEstimator est(g);
    for (std::size_t a = 1; a < est.arms().size(); ++a) {
      DNetwork d = est.network(a);
      load_true_cpds(d, c);
      CHECK(std::abs(d_reward_exact(d) - oracle::reward(c, est.arms()[a])) < 1e-9);
    }
  }
}

TEST_CASE("smoothing arithmetic") {
  Admg g;
  const NodeId x = g.add_node("X", false, true), y = g.add_node("Y");
  g.add_edge(x, y);
  g.set_reward(y);
  DNetwork d = build_D(g, x, 1);
  learn_D(d, {});
  for (NodeId v = 0; v < 2; ++v)
    for (double t : d.learned_cpds[v].table) CHECK(t == 0.5);

  std::vector<ObsRecord> ten(10, ObsRecord{{1, 1}, 1});
  learn_D(d, ten);
  // Y conditions on the clone fixed at 1: ten matches, all Y = 1.
  const Cpt& cy = d.learned_cpds[y];
  CHECK(cy.table[1] == doctest::Approx(11.0 / 12.0));
  CHECK(cy.table[0] == 0.5);
  CHECK(d.learned_cpds[x].table[0] == doctest::Approx(11.0 / 12.0));

  // Threshold fallback applies only outside X's component.
  learn_D(d, ten, 11);
  CHECK(d.learned_cpds[y].table[1] == 0.5);
  CHECK(d.learned_cpds[x].table[0] == doctest::Approx(11.0 / 12.0));
}

TEST_CASE("learned CPDs converge on experiment 3") {
  const Cbn c = gen_experiment3();
  const auto samples = draw(c, 100000, 1);
  const ObservationalEstimator est(c.visible_graph());
  DNetwork d = est.network(2);  // do(X2 = 1)
  learn_D(d, samples);
  const auto& r = est.reduced(2);
  for (NodeId v = 0; v < d.base_size; ++v) {
    const NodeId orig = r.original[v];
    const Cpt& truth = c.cpt(orig);
    const Cpt& got = d.learned_cpds[v];
    if (truth.parent_order.size() != got.parent_order.size()) continue;
    bool same = true;
    for (std::size_t j = 0; j < got.parent_order.size(); ++j)
      same &= !d.is_clone(got.parent_order[j]) && r.original[got.parent_order[j]] == truth.parent_order[j];
    if (!same) continue;
    for (std::size_t m = 0; m < truth.table.size(); ++m)
      CHECK(std::abs(got.table[m] - truth.table[m]) < 0.02);
  }
  Rng rng(2);
  CHECK(std::abs(est.estimate_arm(2, samples, 1000, rng) - 0.5) < 0.02);
}

TEST_CASE("without back-door paths the estimate is the smoothed conditional frequency") {
  FamilyParams fp;
  fp.n = 5;
  fp.tail_count = 5;
  fp.tail_p = 0.3;
  fp.max_parents = 0;
  fp.eps = 0.2;
  const Cbn c = gen_family(4, fp).cbn;
  const auto samples = draw(c, 3000, 9);
  Rng rng(1);
  const auto est = estimate_all_rewards(c.visible_graph(), samples, 100, rng);
  std::size_t ones = 0;
  for (const auto& s : samples) ones += s.reward;
  CHECK(est[0] == doctest::Approx(static_cast<double>(ones) / samples.size()));
  for (NodeId xi = 0; xi < 5; ++xi)
    for (int x = 0; x < 2; ++x) {
      double n = 0, n1 = 0;
      for (const auto& s : samples)
        if (s.values[xi] == x) {
          ++n;
          n1 += s.reward;
        }
      CHECK(std::abs(est[1 + 2 * xi + static_cast<std::size_t>(x)] - (n1 + 1) / (n + 2)) < 1e-9);
    }
}

TEST_CASE("enumerated and sampled read-outs agree") {
  const Cbn c = oracle::confounded_five();
  const auto samples = draw(c, 20000, 4);
  const ObservationalEstimator est(c.visible_graph());
  Rng rng(5);
  for (std::size_t a = 1; a < est.arms().size(); ++a) {
    DNetwork d = est.network(a);
    learn_D(d, samples);
    const double exact = d_reward_exact(d);
    const double sampled = d_reward_sampled(d, 400000, rng);
    CHECK(std::abs(exact - sampled) < 4.0 * std::sqrt(0.25 / 400000.0));
  }
}

TEST_CASE("confounded five-node instance at 50k samples") {
  const Cbn c = oracle::confounded_five();
  const auto truth = exact_rewards(c);
  const ObservationalEstimator est(c.visible_graph());
  std::size_t good = 0;
  const std::size_t seeds = 20;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    const auto samples = draw(c, 50000, seed + 77);
    Rng rng(seed);
    const auto mu = est.estimate(samples, 1000, rng);
    bool ok = true;
    for (std::size_t a = 0; a < mu.size(); ++a) ok &= std::abs(mu[a] - truth[a]) < 0.05;
    good += ok;
  }
  CHECK(static_cast<double>(good) >= 0.95 * seeds);
}

TEST_CASE("estimates are deterministic and strictly inside (0, 1)") {
  const Cbn c = oracle::confounded_five();
  const auto samples = draw(c, 500, 3);
  Rng r1(8), r2(8);
  const ObservationalEstimator est(c.visible_graph());
  const auto a = est.estimate(samples, 500, r1);
  CHECK(a == est.estimate(samples, 500, r2));
  for (std::size_t k = 1; k < est.arms().size(); ++k) {
    DNetwork d = est.network(k);
    learn_D(d, samples);
    for (const Cpt& cpt : d.learned_cpds)
      for (double t : cpt.table) CHECK((t > 0.0 && t < 1.0));
  }
}
