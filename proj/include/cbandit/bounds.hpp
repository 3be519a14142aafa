#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cbandit {

// sqrt((m / T) ln(N T / m)), constant 1.
double srm_bound(double m, double n, double horizon);

struct CrmArmStats {
  double gap = 0.0;     // Δ_{i,x}
  double p_min = 0.0;   // min_z P(X_i = x, Pa(X_i) = z)
  double domain = 1.0;  // number of parent assignments Z_i
};

struct CrmBound {
  std::optional<double> value;
  bool guarded = false;  // Δ0 = 0 with some positive gap: formula undefined
  std::string note;
};

// Order-of-magnitude expression for the cumulative regret when a0 is not
// optimal. `gap0` is Δ0; `arms` covers every interventional arm.
CrmBound crm_bound(double gap0, const std::vector<CrmArmStats>& arms, double horizon);

}  // namespace cbandit
