#include "cbandit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "cbandit/errors.hpp"
#include "cbandit/inference.hpp"

namespace cbandit {

namespace {

// Distinct parents drawn uniformly from [0, i), count uniform in [0, max].
std::vector<NodeId> draw_parents(Rng& rng, std::size_t i, std::size_t max_parents) {
  const std::size_t cap = std::min(max_parents, i);
  const std::size_t count = rng.below(cap + 1);
  std::vector<NodeId> out;
  while (out.size() < count) {
    const auto p = static_cast<NodeId>(rng.below(i));
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Cpt constant_cpt(NodeId owner, double p) { return {owner, {}, {p}}; }

}  // namespace

FamilyInstance gen_family(std::uint64_t seed, const FamilyParams& params) {
  const std::size_t n = params.n;
  if (n == 0) throw InvalidArgument("need at least one intervenable node");
  if (params.tail_count > n) throw InvalidArgument("tail larger than the node count");
  if (!(params.tail_p > 0.0 && params.tail_p < 1.0)) throw InvalidArgument("tail_p must be in (0,1)");
  if (params.eps < 0.0 || params.eps > 0.5) throw InvalidArgument("eps must be in [0, 0.5]");
  if (params.best_from_tail && params.tail_count == 0)
    throw InvalidArgument("best arm drawn from an empty tail");

  Rng rng(seed);
  Admg g;
  std::vector<Cpt> cpts;
  const std::size_t tail_start = n - params.tail_count;
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId v = g.add_node(fmt::format("X{}", i + 1), false, true);
    for (NodeId p : draw_parents(rng, i, params.max_parents)) g.add_edge(p, v);
    cpts.push_back(constant_cpt(v, i >= tail_start ? params.tail_p : 0.5));
  }
  const NodeId y = g.add_node("Y");
  for (NodeId v = 0; v < n; ++v) g.add_edge(v, y);
  g.set_reward(y);

  const NodeId j = params.best_from_tail
                       ? static_cast<NodeId>(tail_start + rng.below(params.tail_count))
                       : static_cast<NodeId>(rng.below(n));
  const double q = j >= tail_start ? params.tail_p : 0.5;
  const double eps_low = q * params.eps / (1.0 - q);
  cpts.push_back({y, {j}, {0.5 - eps_low, 0.5 + params.eps}});
  return {Cbn(std::move(g), std::move(cpts)), j};
}

Cbn gen_experiment1(std::uint64_t seed, std::size_t n, std::size_t m_target, double eps) {
  FamilyParams p;
  p.n = n;
  p.tail_count = m_target;
  p.tail_p = 1.0 / (2.0 * static_cast<double>(m_target));
  p.eps = eps;
  return gen_family(seed, p).cbn;
}

Cbn gen_experiment2(std::uint64_t seed, std::size_t n, std::size_t m_target, double eps) {
  if (m_target < 8 || m_target > n)
    throw InvalidArgument(fmt::format("m_target {} not reachable with N={} (need 8 <= m <= N)",
                                      m_target, n));
  Cbn cbn = gen_experiment1(seed, n, m_target, eps);
  const auto qm = exact_q_and_m(cbn);
  if (qm.m != m_target)
    throw InvalidArgument(fmt::format("generated m={} differs from target {}", qm.m, m_target));
  return cbn;
}

Cbn gen_experiment3() {
  Admg g;
  const NodeId x1 = g.add_node("X1");
  const NodeId x2 = g.add_node("X2", false, true);
  const NodeId x3 = g.add_node("X3", false, true);
  const NodeId y = g.add_node("Y");
  g.add_edge(x1, x2);
  g.add_edge(x1, x3);
  g.add_edge(x2, y);
  g.add_edge(x3, y);
  g.set_reward(y);
  std::vector<Cpt> cpts{
      {x1, {}, {0.5}},
      {x2, {x1}, {0.25, 0.75}},
      {x3, {x1}, {0.25, 0.75}},
      {y, {x2, x3}, {1.0, 0.0, 0.0, 1.0}},
  };
  return Cbn(std::move(g), std::move(cpts));
}

Cbn gen_experiment5(std::uint64_t seed, std::size_t n, double eps) {
  FamilyParams p;
  p.n = n;
  p.tail_count = 0;
  p.tail_p = 0.5;
  p.max_parents = 1;
  p.eps = eps;
  p.best_from_tail = false;
  return gen_family(seed, p).cbn;
}

TreeShape TreeShape::complete(std::size_t arity, std::size_t depth) {
  if (arity < 1) throw InvalidArgument("tree arity must be positive");
  // Breadth-first positions, then reversed so the root becomes X_N.
  std::vector<std::optional<std::size_t>> bfs_parent{std::nullopt};
  std::size_t level_begin = 0, level_end = 1;
  for (std::size_t d = 0; d < depth; ++d) {
    for (std::size_t v = level_begin; v < level_end; ++v)
      for (std::size_t c = 0; c < arity; ++c) bfs_parent.push_back(v);
    level_begin = level_end;
    level_end = bfs_parent.size();
  }
  const std::size_t n = bfs_parent.size();
  TreeShape t;
  t.parent.resize(n);
  for (std::size_t b = 0; b < n; ++b)
    if (bfs_parent[b]) t.parent[n - 1 - b] = n - 1 - *bfs_parent[b];
  return t;
}

std::vector<std::vector<std::size_t>> TreeShape::children() const {
  std::vector<std::vector<std::size_t>> out(size());
  for (std::size_t i = 0; i < size(); ++i)
    if (parent[i]) out[*parent[i]].push_back(i);
  return out;
}

std::vector<std::size_t> TreeShape::leaves() const {
  const auto ch = children();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i)
    if (ch[i].empty()) out.push_back(i);
  return out;
}

void TreeShape::validate() const {
  if (size() < 4) throw InvalidArgument("tree needs at least four nodes");
  for (std::size_t i = 0; i < size(); ++i)
    if (parent[i] && (*parent[i] <= i || *parent[i] >= size()))
      throw InvalidArgument(
          fmt::format("X{} has parent index {}; nodes must be in reverse topological order", i + 1,
                      *parent[i] + 1));
  if (parent.back()) throw InvalidArgument("X_N must be a root");
}

TreeConstants tree_constants(const TreeShape& shape, std::size_t m, std::size_t horizon) {
  shape.validate();
  const std::size_t n = shape.size();
  // Depth counted in nodes from a root; parents have higher indices.
  std::vector<std::size_t> depth(n, 1);
  for (std::size_t i = n; i-- > 0;)
    if (shape.parent[i]) depth[i] = depth[*shape.parent[i]] + 1;
  TreeConstants c;
  for (std::size_t leaf : shape.leaves()) c.h = std::max(c.h, depth[leaf] + 1);
  const double h = static_cast<double>(c.h);
  const double leaves = static_cast<double>(shape.leaves().size());
  c.alpha = std::min(1.0 / (2.0 * h * leaves + std::pow(2.0, h + 1.0)),
                     1.0 / (std::pow(2.0, h) * leaves * static_cast<double>(m)));
  c.eps = std::min(0.25, std::sqrt(static_cast<double>(m) / (18.0 * static_cast<double>(horizon))));
  return c;
}

std::vector<Cbn> gen_tree_lower_bound(const TreeShape& shape, std::size_t m, std::size_t horizon) {
  shape.validate();
  const std::size_t n = shape.size();
  if (m < 1 || m > n) throw InvalidArgument(fmt::format("M={} must lie in [1, {}]", m, n));
  if (horizon < 1) throw InvalidArgument("horizon must be positive");
  const auto k = tree_constants(shape, m, horizon);
  const auto ch = shape.children();

  Admg g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(fmt::format("X{}", i + 1), false, true);
  const NodeId y = g.add_node("Y");
  g.set_reward(y);
  for (std::size_t i = 0; i < n; ++i)
    if (shape.parent[i]) g.add_edge(static_cast<NodeId>(*shape.parent[i]), static_cast<NodeId>(i));
  for (std::size_t leaf : shape.leaves()) g.add_edge(static_cast<NodeId>(leaf), y);

  std::vector<Cpt> base;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<NodeId>(i);
    if (i >= m) {
      base.push_back({v, {}, {0.5}});
    } else if (!shape.parent[i] || *shape.parent[i] >= m) {
      // A root of the T_M subgraph.
      base.push_back({v, {}, {k.alpha}});
    } else {
      base.push_back({v, {static_cast<NodeId>(*shape.parent[i])}, {k.alpha, 1.0 - k.alpha}});
    }
  }

  // Leaves of T_M in ascending order; T_M is closed under descendants so
  // leaves of T_M are leaves of T.
  std::vector<NodeId> tm_leaves;
  for (std::size_t leaf : shape.leaves())
    if (leaf < m) tm_leaves.push_back(static_cast<NodeId>(leaf));
  if (tm_leaves.size() > 24) throw InvalidArgument("T_M has too many leaves for a CPT");

  std::vector<Cbn> out;
  out.emplace_back(g, [&] {
    auto cpts = base;
    cpts.push_back({y, {}, {0.5}});
    return cpts;
  }());
  for (std::size_t i = 0; i < m; ++i) {
    // Leaves of T_M reachable from X_i.
    std::vector<bool> below(n, false);
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t v = stack.back();
      stack.pop_back();
      below[v] = true;
      for (std::size_t c : ch[v]) stack.push_back(c);
    }
    std::uint64_t target = 0;
    for (std::size_t j = 0; j < tm_leaves.size(); ++j)
      if (below[tm_leaves[j]]) target |= std::uint64_t{1} << j;
    std::vector<double> table(std::size_t{1} << tm_leaves.size(), 0.5);
    table[target] = 0.5 + k.eps;
    auto cpts = base;
    cpts.push_back({y, tm_leaves, std::move(table)});
    out.emplace_back(g, std::move(cpts));
  }
  return out;
}

Cbn gen_random(std::uint64_t seed, const RandomCbnParams& params) {
  const std::size_t n = params.observable;
  if (n < 2) throw InvalidArgument("need at least two observable nodes");
  if (!(params.p_low >= 0.0 && params.p_low <= params.p_high && params.p_high <= 1.0))
    throw InvalidArgument("CPT entry range must satisfy 0 <= low <= high <= 1");
  Rng rng(seed);
  std::vector<std::vector<NodeId>> parents(n);
  for (std::size_t i = 0; i < n; ++i) parents[i] = draw_parents(rng, i, params.max_parents);
  const auto y = static_cast<NodeId>(n - 1);

  auto build = [&](const std::vector<std::pair<NodeId, NodeId>>& confounders) {
    Admg g;
    for (std::size_t i = 0; i + 1 < n; ++i) g.add_node(fmt::format("V{}", i), false, true);
    g.add_node("Y");
    g.set_reward(y);
    for (std::size_t i = 0; i < n; ++i)
      for (NodeId p : parents[i]) g.add_edge(p, static_cast<NodeId>(i));
    for (std::size_t c = 0; c < confounders.size(); ++c) {
      const NodeId u = g.add_node(fmt::format("U{}", c), true, false);
      g.add_edge(u, confounders[c].first);
      g.add_edge(u, confounders[c].second);
    }
    return g;
  };

  std::vector<std::pair<NodeId, NodeId>> confounders;
  std::set<std::pair<NodeId, NodeId>> tried;
  const std::size_t pairs = n * (n - 1) / 2;
  for (std::size_t attempt = 0; confounders.size() < params.confounders && tried.size() < pairs &&
                                attempt < 50 * (params.confounders + 1);
       ++attempt) {
    auto a = static_cast<NodeId>(rng.below(n));
    auto b = static_cast<NodeId>(rng.below(n));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (!tried.insert({a, b}).second) continue;
    auto candidate = confounders;
    candidate.emplace_back(a, b);
    if (params.identifiable && !check_identifiability(latent_projection(build(candidate))))
      continue;
    confounders = std::move(candidate);
  }

  Admg g = build(confounders);
  std::vector<Cpt> cpts;
  for (NodeId v = 0; v < g.size(); ++v) {
    Cpt c{v, g.parents(v), {}};
    c.table.resize(std::size_t{1} << c.parent_order.size());
    for (double& p : c.table) p = params.p_low + (params.p_high - params.p_low) * rng.uniform();
    cpts.push_back(std::move(c));
  }
  return Cbn(std::move(g), std::move(cpts));
}

}  // namespace cbandit
