#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "cbandit/cbn.hpp"
#include "cbandit/obs_estimation.hpp"
#include "cbandit/rng.hpp"

namespace cbandit {

// A bandit instance: the hidden model, the graph an algorithm may inspect,
// and oracle rewards used only for scoring. Immutable and shareable.
class BanditEnv {
 public:
  // `rewards` holds one oracle value per arm of arm_list(visible graph).
  BanditEnv(std::shared_ptr<const Cbn> cbn, std::vector<double> rewards,
            EstimatorOptions options = {});
  // Oracle rewards by exact enumeration.
  static BanditEnv exact(std::shared_ptr<const Cbn> cbn,
                         std::size_t enumeration_limit = kDefaultEnumerationLimit);

  const Admg& visible_graph() const { return cbn_->visible_graph(); }
  const std::vector<Arm>& arms() const { return arms_; }
  const std::vector<double>& rewards() const { return rewards_; }
  std::size_t best_arm() const { return best_arm_; }
  double best_reward() const { return rewards_[best_arm_]; }
  bool identifiable() const { return estimator_ != nullptr; }
  bool fully_observable() const;
  // Null when the visible graph is not identifiable.
  const ObservationalEstimator* estimator() const { return estimator_.get(); }

  ObsRecord pull(std::size_t arm, Rng& rng) const;

 private:
  std::shared_ptr<const Cbn> cbn_;
  std::vector<Arm> arms_;
  std::vector<double> rewards_;
  std::size_t best_arm_ = 0;
  std::shared_ptr<const ObservationalEstimator> estimator_;
};

// What an algorithm sees during one run: the graph, the arm list, the
// budget and pull outcomes. The model behind the pulls is not reachable.
class Session {
 public:
  Session(const BanditEnv& env, std::size_t horizon, Rng& rng);

  const Admg& graph() const { return env_.visible_graph(); }
  const std::vector<Arm>& arms() const { return env_.arms(); }
  const ObservationalEstimator* estimator() const { return env_.estimator(); }
  std::size_t horizon() const { return horizon_; }
  std::size_t used() const { return history_.size(); }
  std::size_t remaining() const { return horizon_ - history_.size(); }
  Rng& rng() { return rng_; }

  // Throws InvalidArgument once the budget is spent.
  ObsRecord pull(std::size_t arm);
  const std::vector<std::uint32_t>& history() const { return history_; }

 private:
  const BanditEnv& env_;
  std::size_t horizon_;
  Rng& rng_;
  std::vector<std::uint32_t> history_;
};

inline constexpr std::size_t kNoArm = static_cast<std::size_t>(-1);

struct RegretTrace {
  std::vector<std::uint32_t> arms;
  std::vector<double> instantaneous;
  std::vector<double> cumulative;
  std::size_t recommended = kNoArm;
  double simple_regret = 0.0;  // gap of `recommended`
};

RegretTrace make_trace(const BanditEnv& env, const std::vector<std::uint32_t>& pulls,
                       std::size_t recommended);

// Lowest index among the maxima.
std::size_t argmax(const std::vector<double>& values);

}  // namespace cbandit
