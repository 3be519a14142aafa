#pragma once

#include <cstddef>
#include <vector>

#include "cbandit/cbn.hpp"

namespace cbandit {

inline constexpr std::size_t kDefaultEnumerationLimit = 22;
inline constexpr double kProbabilityTolerance = 1e-12;

// Ancestral closure of `query` through the parents each CPT actually depends
// on. Under do(X) the closure stops at X. Returned in topological order.
std::vector<NodeId> relevant_nodes(const Cbn& cbn, const Arm& arm, const std::vector<NodeId>& query);

// Exact joint of `query` under `arm`; entry bit j is the value of query[j].
// Throws EnumerationInfeasible when more than `limit` free nodes are relevant.
std::vector<double> joint_marginal(const Cbn& cbn, const Arm& arm, const std::vector<NodeId>& query,
                                   std::size_t limit = kDefaultEnumerationLimit);

double exact_reward(const Cbn& cbn, const Arm& arm, std::size_t limit = kDefaultEnumerationLimit);

// One value per arm of arm_list(cbn.visible_graph()).
std::vector<double> exact_rewards(const Cbn& cbn, std::size_t limit = kDefaultEnumerationLimit);

struct QmResult {
  std::vector<NodeId> nodes;  // intervenable nodes, ascending
  std::vector<double> q;
  std::vector<std::size_t> k;
  std::size_t m = 2;
};

QmResult exact_q_and_m(const Cbn& cbn, std::size_t limit = kDefaultEnumerationLimit);

// q^k < 1/τ, with ties within kProbabilityTolerance counted as not below.
bool below_inverse(double q, std::size_t k, double tau);

// min{τ in [2, 2N] : |{i : q_i^k_i < 1/τ}| <= τ}, or 2N if none qualifies.
std::size_t compute_m(const std::vector<double>& q, const std::vector<std::size_t>& k);

// Σ_z P(Y=1 | X_i=x, Pa(X_i)=z) P(Pa(X_i)=z) on a fully observable model.
double backdoor_reward(const Cbn& cbn, NodeId xi, int x,
                       std::size_t limit = kDefaultEnumerationLimit);

}  // namespace cbandit
