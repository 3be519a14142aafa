#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cbandit/cbn.hpp"

namespace cbandit {

// Random DAG on X_1..X_N followed by Y, every X_i a parent of Y. The last
// `tail_count` nodes have P(X=1 | Pa) = tail_p, the rest 0.5. A node j drawn
// from the tail (or from all nodes when best_from_tail is false) drives Y:
// P(Y=1 | X_j=1) = 0.5 + eps and P(Y=1 | X_j=0) = 0.5 - eps', with
// eps' = q eps / (1 - q) and q = P(X_j=1), so the observational arm stays at
// 0.5.
struct FamilyParams {
  std::size_t n = 100;
  std::size_t tail_count = 9;
  double tail_p = 1.0 / 18.0;
  std::size_t max_parents = 2;
  double eps = 0.3;
  bool best_from_tail = true;
};

struct FamilyInstance {
  Cbn cbn;
  NodeId driver;  // X_j
};

FamilyInstance gen_family(std::uint64_t seed, const FamilyParams& params);

Cbn gen_experiment1(std::uint64_t seed, std::size_t n = 100, std::size_t m_target = 9,
                    double eps = 0.3);

// Tail of m_target nodes at 1/(2 m_target); the resulting m is verified
// exactly and InvalidArgument is thrown when it misses the target.
Cbn gen_experiment2(std::uint64_t seed, std::size_t n, std::size_t m_target, double eps = 0.3);

Cbn gen_experiment3();

Cbn gen_experiment5(std::uint64_t seed, std::size_t n = 10, double eps = 0.1);

// Tree over X_1..X_N listed in reverse topological order: parent[i] is the
// parent of X_{i+1} as a 0-based index greater than i, or nullopt for a root.
struct TreeShape {
  std::vector<std::optional<std::size_t>> parent;

  static TreeShape complete(std::size_t arity, std::size_t depth);
  std::size_t size() const { return parent.size(); }
  std::vector<std::vector<std::size_t>> children() const;
  std::vector<std::size_t> leaves() const;  // ascending
  void validate() const;
};

struct TreeConstants {
  std::size_t h = 0;  // nodes on the longest root-to-Y path, Y included
  double alpha = 0.0;
  double eps = 0.0;
};

TreeConstants tree_constants(const TreeShape& shape, std::size_t m, std::size_t horizon);

// C_0..C_M. In C_i (i >= 1) Y is 0.5 + eps exactly when every leaf of T_M
// below X_i is 1 and every other leaf of T_M is 0.
std::vector<Cbn> gen_tree_lower_bound(const TreeShape& shape, std::size_t m, std::size_t horizon);

// Small random models for tests and the CLI. Y is the last observable node.
// Confounders become hidden nodes appended after the observables; with
// identifiable set, a confounder that would break identifiability is skipped.
struct RandomCbnParams {
  std::size_t observable = 6;
  std::size_t max_parents = 2;
  std::size_t confounders = 0;
  bool identifiable = true;
  double p_low = 0.1;
  double p_high = 0.9;
};

Cbn gen_random(std::uint64_t seed, const RandomCbnParams& params);

}  // namespace cbandit
