#include "cbandit/bandit_env.hpp"

#include <fmt/format.h>

#include "cbandit/errors.hpp"
#include "cbandit/inference.hpp"

namespace cbandit {

std::size_t argmax(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t a = 1; a < values.size(); ++a)
    if (values[a] > values[best]) best = a;
  return best;
}

BanditEnv::BanditEnv(std::shared_ptr<const Cbn> cbn, std::vector<double> rewards,
                     EstimatorOptions options)
    : cbn_(std::move(cbn)), arms_(arm_list(cbn_->visible_graph())), rewards_(std::move(rewards)) {
  if (rewards_.size() != arms_.size())
    throw InvalidArgument(
        fmt::format("{} oracle rewards for {} arms", rewards_.size(), arms_.size()));
  best_arm_ = argmax(rewards_);
  if (check_identifiability(visible_graph()))
    estimator_ = std::make_shared<const ObservationalEstimator>(visible_graph(), options);
}

BanditEnv BanditEnv::exact(std::shared_ptr<const Cbn> cbn, std::size_t enumeration_limit) {
  auto rewards = exact_rewards(*cbn, enumeration_limit);
  EstimatorOptions options;
  options.enumeration_limit = enumeration_limit;
  return BanditEnv(std::move(cbn), std::move(rewards), options);
}

bool BanditEnv::fully_observable() const {
  return !cbn_->graph().has_hidden() && !cbn_->graph().has_bidirected();
}

ObsRecord BanditEnv::pull(std::size_t arm, Rng& rng) const {
  return sample(*cbn_, arms_.at(arm), rng);
}

Session::Session(const BanditEnv& env, std::size_t horizon, Rng& rng)
    : env_(env), horizon_(horizon), rng_(rng) {
  history_.reserve(horizon);
}

ObsRecord Session::pull(std::size_t arm) {
  if (history_.size() >= horizon_) throw InvalidArgument("pull budget exhausted");
  if (arm >= env_.arms().size()) throw InvalidArgument(fmt::format("no arm {}", arm));
  history_.push_back(static_cast<std::uint32_t>(arm));
  return env_.pull(arm, rng_);
}

RegretTrace make_trace(const BanditEnv& env, const std::vector<std::uint32_t>& pulls,
                       std::size_t recommended) {
  RegretTrace tr;
  tr.arms = pulls;
  tr.instantaneous.reserve(pulls.size());
  tr.cumulative.reserve(pulls.size());
  const double best = env.best_reward();
  double total = 0.0;
  for (std::uint32_t a : pulls) {
    const double r = best - env.rewards()[a];
    total += r;
    tr.instantaneous.push_back(r);
    tr.cumulative.push_back(total);
  }
  tr.recommended = recommended;
  if (recommended != kNoArm) tr.simple_regret = best - env.rewards().at(recommended);
  return tr;
}

}  // namespace cbandit
