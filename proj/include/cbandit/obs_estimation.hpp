#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cbandit/admg.hpp"
#include "cbandit/cbn.hpp"
#include "cbandit/inference.hpp"
#include "cbandit/rng.hpp"

namespace cbandit {

struct EffectiveParents {
  NodeId node = kNoNode;
  std::vector<NodeId> set;  // ascending
};

// Tian convention: members of v's c-component up to v in `order`, together
// with their parents, minus v itself.
EffectiveParents effective_parents(const Admg& h, NodeId v, const std::vector<NodeId>& order);

// Network whose joint, summed over the original X_i, simulates do(X_i = x) on
// H_i. Ids 0..|H|-1 are the nodes of H; clones of X_i follow. The original
// X_i only feeds members of its own c-component; every other node that
// conditions on X_i reads its private clone, fixed at x.
struct DNetwork {
  Admg graph;
  NodeId target = kNoNode;
  std::uint8_t value = 0;
  std::size_t base_size = 0;                 // number of H nodes
  std::vector<NodeId> origin;                // H node -> index into ObsRecord::values
  std::vector<NodeId> clone_of;              // H node -> its clone, or kNoNode
  std::vector<bool> in_target_component;     // per H node
  std::vector<NodeId> order;                 // H nodes, topological in D
  std::vector<Cpt> learned_cpds;             // per H node, over its D parents

  bool is_clone(NodeId v) const { return v >= base_size; }
  bool conditions_on_clone(NodeId v) const { return clone_of[v] != kNoNode; }
  std::vector<std::pair<NodeId, std::uint8_t>> fixed_nodes() const;
};

// `origin` maps H nodes to record indices; empty means the identity.
DNetwork build_D(const Admg& h, NodeId xi, int x, std::vector<NodeId> origin = {});

// Smoothed counts (N_v + 1) / (N + 2). Nodes outside the target component
// fall back to 1/2 when fewer than `threshold` samples match.
void learn_D(DNetwork& d, std::span<const ObsRecord> samples, std::size_t threshold = 0);

// P_D(Y = 1) by enumeration.
double d_reward_exact(const DNetwork& d);
// P_D(Y = 1) from `draws` ancestral samples.
double d_reward_sampled(const DNetwork& d, std::size_t draws, Rng& rng);

struct EstimatorOptions {
  std::size_t threshold = 0;
  std::size_t enumeration_limit = kDefaultEnumerationLimit;
};

// Precomputed reductions and D skeletons for every interventional arm of a
// projected, identifiable graph. estimate() only learns and reads off Y.
class ObservationalEstimator {
 public:
  explicit ObservationalEstimator(const Admg& g, EstimatorOptions options = {});

  const std::vector<Arm>& arms() const { return arms_; }
  const Admg& graph() const { return graph_; }
  // Skeleton for arm index a >= 1 in arms().
  const DNetwork& network(std::size_t a) const { return networks_.at(a - 1); }
  const ReducedGraph& reduced(std::size_t a) const { return reduced_.at((a - 1) / 2); }

  // One estimate per arm. a0 is the plain reward mean (1/2 with no samples).
  std::vector<double> estimate(std::span<const ObsRecord> samples, std::size_t sample_budget,
                               Rng& rng) const;
  double estimate_arm(std::size_t a, std::span<const ObsRecord> samples, std::size_t sample_budget,
                      Rng& rng) const;

 private:
  Admg graph_;
  EstimatorOptions options_;
  std::vector<Arm> arms_;
  std::vector<ReducedGraph> reduced_;
  std::vector<DNetwork> networks_;
};

std::vector<double> estimate_all_rewards(const Admg& g, std::span<const ObsRecord> samples,
                                         std::size_t sample_budget, Rng& rng,
                                         EstimatorOptions options = {});

}  // namespace cbandit
