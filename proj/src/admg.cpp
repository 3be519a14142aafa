#include "cbandit/admg.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <queue>
#include <set>

#include <fmt/format.h>

#include "cbandit/errors.hpp"

namespace cbandit {

namespace {

bool insert_sorted(std::vector<NodeId>& v, NodeId x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it != v.end() && *it == x) return false;
  v.insert(it, x);
  return true;
}

bool contains_sorted(const std::vector<NodeId>& v, NodeId x) {
  return std::binary_search(v.begin(), v.end(), x);
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

}  // namespace

void Admg::check(NodeId v) const {
  if (v >= nodes_.size()) throw StructuralError(fmt::format("node {} out of range", v));
}

NodeId Admg::add_node(std::string label, bool hidden, bool intervenable) {
  const auto id = static_cast<NodeId>(nodes_.size());
  nodes_.push_back({std::move(label), hidden, intervenable});
  parents_.emplace_back();
  children_.emplace_back();
  siblings_.emplace_back();
  return id;
}

void Admg::add_edge(NodeId parent, NodeId child) {
  check(parent);
  check(child);
  if (parent == child) throw StructuralError(fmt::format("self-loop on {}", label(parent)));
  insert_sorted(parents_[child], parent);
  insert_sorted(children_[parent], child);
}

void Admg::add_bidirected(NodeId a, NodeId b) {
  check(a);
  check(b);
  if (a == b) throw StructuralError(fmt::format("bidirected self-loop on {}", label(a)));
  insert_sorted(siblings_[a], b);
  insert_sorted(siblings_[b], a);
}

void Admg::set_reward(NodeId y) {
  check(y);
  reward_ = y;
}

void Admg::set_intervenable(NodeId v, bool on) {
  check(v);
  nodes_[v].intervenable = on;
}

void Admg::validate() const {
  if (reward_ == kNoNode) throw StructuralError("reward node not set");
  if (reward_ >= nodes_.size()) throw StructuralError("reward node out of range");
  if (nodes_[reward_].hidden) throw StructuralError("reward node must be observable");
  if (nodes_[reward_].intervenable) throw StructuralError("reward node must not be intervenable");
  std::set<std::string_view> labels;
  for (NodeId v = 0; v < nodes_.size(); ++v) {
    const auto& n = nodes_[v];
    if (n.label.empty()) throw StructuralError(fmt::format("node {} has an empty label", v));
    if (!labels.insert(n.label).second)
      throw StructuralError(fmt::format("duplicate label '{}'", n.label));
    if (n.hidden && n.intervenable)
      throw StructuralError(fmt::format("hidden node {} cannot be intervenable", n.label));
    if (n.hidden && !siblings_[v].empty())
      throw StructuralError(fmt::format("hidden node {} has a bidirected edge", n.label));
  }
  topological_order(*this);
}

bool Admg::has_hidden() const {
  return std::any_of(nodes_.begin(), nodes_.end(), [](const NodeInfo& n) { return n.hidden; });
}

bool Admg::has_bidirected() const {
  return std::any_of(siblings_.begin(), siblings_.end(), [](const auto& s) { return !s.empty(); });
}

bool Admg::has_edge(NodeId parent, NodeId child) const {
  return contains_sorted(children_.at(parent), child);
}

bool Admg::has_bidirected(NodeId a, NodeId b) const { return contains_sorted(siblings_.at(a), b); }

std::vector<NodeId> Admg::intervenable() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].intervenable) out.push_back(v);
  return out;
}

std::vector<NodeId> Admg::observable() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < nodes_.size(); ++v)
    if (!nodes_[v].hidden) out.push_back(v);
  return out;
}

std::vector<std::pair<NodeId, NodeId>> Admg::directed_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId p = 0; p < nodes_.size(); ++p)
    for (NodeId c : children_[p]) out.emplace_back(p, c);
  return out;
}

std::vector<std::pair<NodeId, NodeId>> Admg::bidirected_edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (NodeId a = 0; a < nodes_.size(); ++a)
    for (NodeId b : siblings_[a])
      if (a < b) out.emplace_back(a, b);
  return out;
}

std::optional<NodeId> Admg::find(std::string_view label) const {
  for (NodeId v = 0; v < nodes_.size(); ++v)
    if (nodes_[v].label == label) return v;
  return std::nullopt;
}

std::vector<NodeId> topological_order(const Admg& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> indegree(n);
  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> ready;
  for (NodeId v = 0; v < n; ++v) {
    indegree[v] = g.parents(v).size();
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<NodeId> order;
  order.reserve(n);
  while (!ready.empty()) {
    const NodeId v = ready.top();
    ready.pop();
    order.push_back(v);
    for (NodeId c : g.children(v))
      if (--indegree[c] == 0) ready.push(c);
  }
  if (order.size() != n) {
    for (NodeId v = 0; v < n; ++v)
      if (indegree[v] > 0)
        throw StructuralError(fmt::format("directed cycle through {}", g.label(v)));
  }
  return order;
}

std::vector<std::vector<NodeId>> c_components(const Admg& g) {
  if (g.has_hidden()) throw StructuralError("c-components need a projected graph");
  UnionFind uf(g.size());
  for (auto [a, b] : g.bidirected_edges()) uf.unite(a, b);
  std::vector<std::vector<NodeId>> by_root(g.size());
  for (NodeId v = 0; v < g.size(); ++v) by_root[uf.find(v)].push_back(v);
  std::vector<std::vector<NodeId>> out;
  for (auto& c : by_root)
    if (!c.empty()) out.push_back(std::move(c));
  return out;
}

std::vector<NodeId> pa(const Admg& g, NodeId v) {
  std::vector<NodeId> out;
  for (NodeId p : g.parents(v))
    if (!g.is_hidden(p)) out.push_back(p);
  return out;
}

ComponentContext pa_plus_and_pa_c(const Admg& g, NodeId xi) {
  if (xi >= g.size() || !g.is_intervenable(xi))
    throw StructuralError(fmt::format("node {} is not intervenable", xi));
  ComponentContext ctx;
  std::vector<bool> seen(g.size(), false);
  std::deque<NodeId> queue{xi};
  seen[xi] = true;
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    ctx.component.push_back(v);
    for (NodeId s : g.siblings(v))
      if (!seen[s]) {
        seen[s] = true;
        queue.push_back(s);
      }
  }
  std::sort(ctx.component.begin(), ctx.component.end());
  ctx.k = ctx.component.size();
  ctx.pa_plus = ctx.component;
  for (NodeId v : ctx.component)
    for (NodeId p : pa(g, v)) insert_sorted(ctx.pa_plus, p);
  for (NodeId v : ctx.pa_plus)
    if (v != xi) ctx.pa_c.push_back(v);
  return ctx;
}

Admg latent_projection(const Admg& g) {
  std::vector<NodeId> local(g.size(), kNoNode);
  Admg out;
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto& info = g.node(v);
    if (info.hidden) {
      if (!g.parents(v).empty())
        throw SemiMarkovViolation(fmt::format("hidden node {} has parents", info.label));
      if (g.children(v).size() > 2)
        throw SemiMarkovViolation(
            fmt::format("hidden node {} has {} children", info.label, g.children(v).size()));
      continue;
    }
    local[v] = out.add_node(info.label, false, info.intervenable);
  }
  for (auto [p, c] : g.directed_edges())
    if (local[p] != kNoNode && local[c] != kNoNode) out.add_edge(local[p], local[c]);
  for (auto [a, b] : g.bidirected_edges()) {
    if (local[a] == kNoNode || local[b] == kNoNode)
      throw SemiMarkovViolation("bidirected edge touches a hidden node");
    out.add_bidirected(local[a], local[b]);
  }
  for (NodeId v = 0; v < g.size(); ++v) {
    if (!g.is_hidden(v) || g.children(v).size() != 2) continue;
    const auto& ch = g.children(v);
    if (local[ch[0]] == kNoNode || local[ch[1]] == kNoNode)
      throw SemiMarkovViolation(fmt::format("hidden node {} has a hidden child", g.label(v)));
    out.add_bidirected(local[ch[0]], local[ch[1]]);
  }
  if (g.reward() != kNoNode) {
    if (local[g.reward()] == kNoNode) throw StructuralError("reward node must be observable");
    out.set_reward(local[g.reward()]);
  }
  return out;
}

IdentifiabilityResult check_identifiability(const Admg& g) {
  if (g.has_hidden()) throw StructuralError("identifiability check needs a projected graph");
  for (NodeId x : g.intervenable()) {
    if (g.children(x).empty() || g.siblings(x).empty()) continue;
    std::vector<NodeId> prev(g.size(), kNoNode);
    prev[x] = x;
    std::deque<NodeId> queue{x};
    while (!queue.empty()) {
      const NodeId v = queue.front();
      queue.pop_front();
      for (NodeId s : g.siblings(v))
        if (prev[s] == kNoNode) {
          prev[s] = v;
          queue.push_back(s);
        }
    }
    for (NodeId c : g.children(x)) {
      if (prev[c] == kNoNode) continue;
      IdentifiabilityWitness w{x, c, {}};
      for (NodeId v = c; v != x; v = prev[v]) w.path.push_back(v);
      w.path.push_back(x);
      std::reverse(w.path.begin(), w.path.end());
      return {false, std::move(w)};
    }
  }
  return {true, std::nullopt};
}

NodeId ReducedGraph::local(NodeId original_id) const {
  auto it = std::lower_bound(original.begin(), original.end(), original_id);
  if (it == original.end() || *it != original_id)
    throw StructuralError(fmt::format("node {} is not in the reduced graph", original_id));
  return static_cast<NodeId>(it - original.begin());
}

ReducedGraph reduce_graph(const Admg& g, NodeId xi) {
  if (g.has_hidden()) throw StructuralError("graph reduction needs a projected graph");
  const auto ctx = pa_plus_and_pa_c(g, xi);
  const NodeId y = g.reward();
  if (y == kNoNode) throw StructuralError("reward node not set");

  std::vector<bool> in_w(g.size(), false);
  in_w[y] = true;
  for (NodeId v : ctx.pa_plus) in_w[v] = true;

  ReducedGraph out;
  for (NodeId v = 0; v < g.size(); ++v)
    if (in_w[v]) out.original.push_back(v);
  std::vector<NodeId> local(g.size(), kNoNode);
  for (NodeId j = 0; j < out.original.size(); ++j) {
    const NodeId v = out.original[j];
    local[v] = j;
    out.graph.add_node(g.label(v), false, v == xi);
  }
  out.graph.set_reward(local[y]);

  // W-nodes reachable from `start` along directed paths whose intermediate
  // nodes all lie outside W.
  std::vector<NodeId> stamp(g.size(), kNoNode);
  NodeId visit = 0;
  auto reach = [&](NodeId start) {
    std::vector<NodeId> hits;
    std::vector<NodeId> stack(g.children(start).begin(), g.children(start).end());
    ++visit;
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      if (stamp[v] == visit) continue;
      stamp[v] = visit;
      if (in_w[v]) {
        hits.push_back(local[v]);
        continue;
      }
      for (NodeId c : g.children(v)) stack.push_back(c);
    }
    return hits;
  };
  auto connect_all = [&](const std::vector<NodeId>& nodes) {
    for (std::size_t a = 0; a < nodes.size(); ++a)
      for (std::size_t b = a + 1; b < nodes.size(); ++b)
        if (nodes[a] != nodes[b]) out.graph.add_bidirected(nodes[a], nodes[b]);
  };

  for (NodeId v : out.original)
    for (NodeId t : reach(v)) out.graph.add_edge(local[v], t);

  // Every marginalized node is a latent common cause of what it reaches.
  for (NodeId v = 0; v < g.size(); ++v)
    if (!in_w[v]) connect_all(reach(v));

  // Every bidirected edge is a latent common cause of its endpoints.
  for (auto [a, b] : g.bidirected_edges()) {
    std::vector<NodeId> hits;
    for (NodeId e : {a, b}) {
      if (in_w[e]) {
        hits.push_back(local[e]);
      } else {
        auto r = reach(e);
        hits.insert(hits.end(), r.begin(), r.end());
      }
    }
    connect_all(hits);
  }
  return out;
}

std::string describe(const Admg& g, const std::vector<NodeId>& nodes) {
  std::string s = "{";
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    if (j) s += ", ";
    s += g.label(nodes[j]);
  }
  return s + "}";
}

}  // namespace cbandit
