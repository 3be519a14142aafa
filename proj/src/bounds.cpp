#include "cbandit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cbandit/errors.hpp"

namespace cbandit {

double srm_bound(double m, double n, double horizon) {
  if (m <= 0.0 || n <= 0.0 || horizon <= 0.0) throw InvalidArgument("bound parameters must be positive");
  return std::sqrt(m / horizon * std::log(n * horizon / m));
}

CrmBound crm_bound(double gap0, const std::vector<CrmArmStats>& arms, double horizon) {
  if (horizon <= 1.0) throw InvalidArgument("horizon must exceed 1");
  const bool any_gap = std::any_of(arms.begin(), arms.end(), [](const CrmArmStats& a) { return a.gap > 0.0; });
  if (gap0 <= 0.0) {
    if (!any_gap) return {0.0, false, "all gaps are zero"};
    return {std::nullopt, true, "observational arm is optimal; the bound is a constant"};
  }
  const double log_t = std::log(horizon);
  const double tail = std::numbers::pi * std::numbers::pi / 3.0;
  double total = 58.0 * log_t / gap0 + gap0 + gap0 * tail;
  for (const CrmArmStats& a : arms) {
    if (a.gap <= 0.0) continue;
    const double eta =
        std::max(0.0, 1.0 - a.domain * std::pow(horizon, -a.p_min * a.p_min / 4.0));
    const double inner = 1.0 / (a.gap * a.gap) - a.p_min * eta / (36.0 * gap0 * gap0);
    total += a.gap * std::max(0.0, 1.0 + 8.0 * log_t * inner);
    total += a.gap * tail;
  }
  return {total, false, ""};
}

}  // namespace cbandit
