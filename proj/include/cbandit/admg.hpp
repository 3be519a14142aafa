#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cbandit {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

struct NodeInfo {
  std::string label;
  bool hidden = false;
  bool intervenable = false;

  bool operator==(const NodeInfo&) const = default;
};

// Acyclic directed mixed graph. Directed edges are causal, bidirected edges
// stand for a latent common cause. Adjacency lists are kept sorted.
class Admg {
 public:
  Admg() = default;

  NodeId add_node(std::string label, bool hidden = false, bool intervenable = false);
  void add_edge(NodeId parent, NodeId child);
  void add_bidirected(NodeId a, NodeId b);
  void set_reward(NodeId y);
  void set_intervenable(NodeId v, bool on);

  // Throws StructuralError describing the first violated invariant.
  void validate() const;

  std::size_t size() const { return nodes_.size(); }
  const NodeInfo& node(NodeId v) const { return nodes_.at(v); }
  const std::string& label(NodeId v) const { return nodes_.at(v).label; }
  bool is_hidden(NodeId v) const { return nodes_.at(v).hidden; }
  bool is_intervenable(NodeId v) const { return nodes_.at(v).intervenable; }
  bool has_hidden() const;
  bool has_bidirected() const;
  NodeId reward() const { return reward_; }

  const std::vector<NodeId>& parents(NodeId v) const { return parents_.at(v); }
  const std::vector<NodeId>& children(NodeId v) const { return children_.at(v); }
  const std::vector<NodeId>& siblings(NodeId v) const { return siblings_.at(v); }
  bool has_edge(NodeId parent, NodeId child) const;
  bool has_bidirected(NodeId a, NodeId b) const;

  std::vector<NodeId> intervenable() const;
  std::vector<NodeId> observable() const;
  std::vector<std::pair<NodeId, NodeId>> directed_edges() const;
  // Each pair listed once with first < second.
  std::vector<std::pair<NodeId, NodeId>> bidirected_edges() const;
  std::optional<NodeId> find(std::string_view label) const;

  bool operator==(const Admg&) const = default;

 private:
  void check(NodeId v) const;

  std::vector<NodeInfo> nodes_;
  std::vector<std::vector<NodeId>> parents_;
  std::vector<std::vector<NodeId>> children_;
  std::vector<std::vector<NodeId>> siblings_;
  NodeId reward_ = kNoNode;
};

// Kahn's algorithm, smallest ready index first.
std::vector<NodeId> topological_order(const Admg& g);

// Classes of the bidirected-connectivity relation, each sorted, ordered by
// their smallest member. Requires a projected graph.
std::vector<std::vector<NodeId>> c_components(const Admg& g);

// Observable directed parents.
std::vector<NodeId> pa(const Admg& g, NodeId v);

struct ComponentContext {
  std::vector<NodeId> component;  // S_i
  std::vector<NodeId> pa_plus;    // S_i with its members' parents
  std::vector<NodeId> pa_c;       // pa_plus without X_i
  std::size_t k = 0;              // |S_i|
};

ComponentContext pa_plus_and_pa_c(const Admg& g, NodeId xi);

// Replaces every hidden node with the bidirected edge it induces. Observable
// nodes keep their relative order and are renumbered densely.
Admg latent_projection(const Admg& g);

struct IdentifiabilityWitness {
  NodeId intervened = kNoNode;
  NodeId child = kNoNode;
  std::vector<NodeId> path;  // bidirected path from intervened to child
};

struct IdentifiabilityResult {
  bool identifiable = true;
  std::optional<IdentifiabilityWitness> witness;

  explicit operator bool() const { return identifiable; }
};

IdentifiabilityResult check_identifiability(const Admg& g);

// H_i over W = {Y, X_i} ∪ Paᶜ(X_i) with everything else marginalized. Only
// X_i stays intervenable.
struct ReducedGraph {
  Admg graph;
  std::vector<NodeId> original;  // local id -> id in the source graph

  NodeId local(NodeId original_id) const;
};

ReducedGraph reduce_graph(const Admg& g, NodeId xi);

std::string describe(const Admg& g, const std::vector<NodeId>& nodes);

}  // namespace cbandit
