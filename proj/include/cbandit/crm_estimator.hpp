#pragma once

#include <cstdint>
#include <vector>

#include "cbandit/admg.hpp"
#include "cbandit/cbn.hpp"

namespace cbandit {

// Reward estimates for the cumulative-regret algorithm on a fully observable
// graph. Observational rounds alternate between an odd stream, which fills
// per-(i, x, z) reward cells, and an even stream, which estimates P(Pa = z)
// block by block. Arm indices follow arm_list().
class CrmEstimator {
 public:
  explicit CrmEstimator(const Admg& g);

  void observe(const ObsRecord& record);
  void intervene(std::size_t arm, std::uint8_t reward);

  std::size_t arm_count() const { return 1 + 2 * nodes_.size(); }
  std::size_t pulls(std::size_t arm) const { return pulls_.at(arm); }
  std::size_t odd_count() const { return (pulls_[0] + 1) / 2; }
  std::size_t even_count() const { return pulls_[0] / 2; }

  // C for arm (i, x); zero for a0.
  std::size_t truncation(std::size_t arm) const;
  std::size_t effective_count(std::size_t arm) const { return pulls_.at(arm) + truncation(arm); }
  std::size_t domain(std::size_t arm) const;
  // Untruncated odd-stream rewards of cell z for arm (i, x).
  const std::vector<std::uint8_t>& cell(std::size_t arm, std::size_t z) const;

  // Empirical mean; 0 for an arm with no data.
  double mean(std::size_t arm) const;
  // mean + sqrt(2 ln t / (N + C)); +inf for an arm with no data.
  double ucb(std::size_t arm, std::size_t t) const;

 private:
  struct Cache {
    std::size_t c = 0;
    std::size_t block = 0;
    double fixed_sum = 0.0;  // Σ Y_c over all blocks but the last
  };
  struct Node {
    NodeId id = kNoNode;
    std::vector<NodeId> parents;
    std::size_t domain = 1;
    std::vector<std::vector<std::uint8_t>> cells[2];  // per z, odd-stream rewards
    std::vector<std::uint32_t> cell_total[2];         // per z
    std::vector<std::vector<std::uint32_t>> prefix;   // per z, counts over the even stream
    mutable Cache cache[2];
  };

  std::size_t parent_value(const Node& n, const ObsRecord& r) const;
  double observational_sum(const Node& n, int x, std::size_t c) const;
  double block_term(const Node& n, int x, std::size_t c, std::size_t begin, std::size_t end) const;

  std::vector<Node> nodes_;
  std::vector<std::size_t> pulls_;
  std::vector<std::uint32_t> wins_;
};

}  // namespace cbandit
