#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cbandit/bandit_env.hpp"

namespace cbandit {

struct SrmOutput {
  std::size_t chosen_arm = 0;
  std::vector<double> estimates;  // per arm, after re-estimation
  std::vector<double> q_hat;      // per intervenable node
  std::vector<std::size_t> k;     // per intervenable node
  std::size_t m_hat = 2;
  std::vector<std::size_t> q_set;  // arm indices
  std::size_t pulls_used = 0;
};

struct CrmDiagnostics {
  std::vector<double> beta;          // value after each round
  std::vector<std::size_t> pulls;    // final N per arm
  std::vector<std::size_t> truncation;  // final C per arm
  std::vector<double> means;         // final estimates
};

// Policies only see the session. Each pulls exactly session.horizon() arms.
SrmOutput srm_policy(Session& s);
void crm_policy(Session& s, CrmDiagnostics* diagnostics = nullptr);
std::size_t uniform_exploration_policy(Session& s);
std::size_t successive_rejects_policy(Session& s);
std::size_t ucb1_policy(Session& s);

struct SrmRun {
  SrmOutput output;
  RegretTrace trace;
};

SrmRun run_srm(const BanditEnv& env, std::size_t horizon, Rng& rng);
// Recommends the arm with the highest final estimate.
RegretTrace run_crm(const BanditEnv& env, std::size_t horizon, Rng& rng,
                    CrmDiagnostics* diagnostics = nullptr);
RegretTrace run_uniform_exploration(const BanditEnv& env, std::size_t horizon, Rng& rng);
RegretTrace run_successive_rejects(const BanditEnv& env, std::size_t horizon, Rng& rng);
// Recommends the most pulled arm.
RegretTrace run_ucb1(const BanditEnv& env, std::size_t horizon, Rng& rng);

enum class Algorithm : std::uint8_t { Srm, Crm, Ue, Sr, Ucb1 };

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
// Simple regret for SRM, UE and SR; cumulative regret for CRM and UCB1.
bool is_cumulative(Algorithm a);
RegretTrace run_algorithm(Algorithm a, const BanditEnv& env, std::size_t horizon, Rng& rng);

}  // namespace cbandit
