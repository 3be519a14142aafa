#include "cbandit/crm_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cbandit/errors.hpp"

namespace cbandit {

namespace {
constexpr std::size_t kMaxParents = 10;
}

CrmEstimator::CrmEstimator(const Admg& g) {
  if (g.has_hidden() || g.has_bidirected())
    throw StructuralError("the cumulative-regret estimator needs a fully observable graph");
  for (NodeId v : g.intervenable()) {
    Node n;
    n.id = v;
    n.parents = g.parents(v);
    if (n.parents.size() > kMaxParents)
      throw InvalidArgument(fmt::format("{} has too many parents for the estimator", g.label(v)));
    n.domain = std::size_t{1} << n.parents.size();
    for (int x = 0; x < 2; ++x) {
      n.cells[x].resize(n.domain);
      n.cell_total[x].assign(n.domain, 0);
    }
    n.prefix.assign(n.domain, std::vector<std::uint32_t>{0});
    nodes_.push_back(std::move(n));
  }
  pulls_.assign(arm_count(), 0);
  wins_.assign(arm_count(), 0);
}

std::size_t CrmEstimator::parent_value(const Node& n, const ObsRecord& r) const {
  std::size_t z = 0;
  for (std::size_t j = 0; j < n.parents.size(); ++j) z |= std::size_t{r.values[n.parents[j]]} << j;
  return z;
}

void CrmEstimator::observe(const ObsRecord& record) {
  const bool odd = pulls_[0] % 2 == 0;
  ++pulls_[0];
  wins_[0] += record.reward;
  for (Node& n : nodes_) {
    const std::size_t z = parent_value(n, record);
    if (odd) {
      const int x = record.values[n.id];
      n.cells[x][z].push_back(record.reward);
      n.cell_total[x][z] += record.reward;
    } else {
      for (std::size_t k = 0; k < n.domain; ++k) n.prefix[k].push_back(n.prefix[k].back() + (k == z));
    }
  }
}

void CrmEstimator::intervene(std::size_t arm, std::uint8_t reward) {
  if (arm == 0 || arm >= arm_count()) throw InvalidArgument(fmt::format("no interventional arm {}", arm));
  ++pulls_[arm];
  wins_[arm] += reward;
}

std::size_t CrmEstimator::truncation(std::size_t arm) const {
  if (arm == 0) return 0;
  const Node& n = nodes_.at((arm - 1) / 2);
  const int x = static_cast<int>((arm - 1) % 2);
  std::size_t c = std::numeric_limits<std::size_t>::max();
  for (const auto& cell : n.cells[x]) c = std::min(c, cell.size());
  return c;
}

std::size_t CrmEstimator::domain(std::size_t arm) const {
  if (arm == 0) return 1;
  return nodes_.at((arm - 1) / 2).domain;
}

const std::vector<std::uint8_t>& CrmEstimator::cell(std::size_t arm, std::size_t z) const {
  if (arm == 0) throw InvalidArgument("a0 has no cells");
  return nodes_.at((arm - 1) / 2).cells[(arm - 1) % 2].at(z);
}

double CrmEstimator::block_term(const Node& n, int x, std::size_t c, std::size_t begin,
                                std::size_t end) const {
  if (end <= begin) return 0.0;
  double acc = 0.0;
  for (std::size_t z = 0; z < n.domain; ++z)
    if (n.cells[x][z][c]) acc += n.prefix[z][end] - n.prefix[z][begin];
  return acc / static_cast<double>(end - begin);
}

double CrmEstimator::observational_sum(const Node& n, int x, std::size_t c) const {
  if (c == 0) return 0.0;
  if (n.domain == 1) return n.cell_total[x][0];
  const std::size_t even = n.prefix[0].size() - 1;
  const std::size_t block = even / c;
  Cache& cache = n.cache[x];
  if (cache.c != c || cache.block != block) {
    cache.c = c;
    cache.block = block;
    cache.fixed_sum = 0.0;
    for (std::size_t k = 0; k + 1 < c; ++k)
      cache.fixed_sum += block_term(n, x, k, k * block, (k + 1) * block);
  }
  return cache.fixed_sum + block_term(n, x, c - 1, (c - 1) * block, even);
}

double CrmEstimator::mean(std::size_t arm) const {
  if (arm == 0) return pulls_[0] ? static_cast<double>(wins_[0]) / static_cast<double>(pulls_[0]) : 0.0;
  const Node& n = nodes_.at((arm - 1) / 2);
  const int x = static_cast<int>((arm - 1) % 2);
  const std::size_t c = truncation(arm);
  const std::size_t denom = pulls_[arm] + c;
  if (denom == 0) return 0.0;
  return (wins_[arm] + observational_sum(n, x, c)) / static_cast<double>(denom);
}

double CrmEstimator::ucb(std::size_t arm, std::size_t t) const {
  const std::size_t count = arm == 0 ? pulls_[0] : effective_count(arm);
  if (count == 0) return std::numeric_limits<double>::infinity();
  return mean(arm) + std::sqrt(2.0 * std::log(static_cast<double>(t)) / static_cast<double>(count));
}

}  // namespace cbandit
