#include "cbandit/obs_estimation.hpp"

#include <algorithm>
#include <deque>

#include <fmt/format.h>

#include "cbandit/errors.hpp"

namespace cbandit {

namespace {

std::vector<NodeId> component_of(const Admg& h, NodeId v) {
  std::vector<bool> seen(h.size(), false);
  std::vector<NodeId> out;
  std::deque<NodeId> queue{v};
  seen[v] = true;
  while (!queue.empty()) {
    const NodeId u = queue.front();
    queue.pop_front();
    out.push_back(u);
    for (NodeId s : h.siblings(u))
      if (!seen[s]) {
        seen[s] = true;
        queue.push_back(s);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::uint64_t parent_mask(const Cpt& c, const std::vector<std::uint8_t>& values) {
  std::uint64_t mask = 0;
  for (std::size_t j = 0; j < c.parent_order.size(); ++j)
    mask |= std::uint64_t{values[c.parent_order[j]]} << j;
  return mask;
}

}  // namespace

EffectiveParents effective_parents(const Admg& h, NodeId v, const std::vector<NodeId>& order) {
  std::vector<std::size_t> pos(h.size());
  for (std::size_t j = 0; j < order.size(); ++j) pos[order[j]] = j;
  EffectiveParents out{v, {}};
  std::vector<bool> in(h.size(), false);
  for (NodeId u : component_of(h, v)) {
    if (pos[u] > pos[v]) continue;
    in[u] = true;
    for (NodeId p : pa(h, u)) in[p] = true;
  }
  in[v] = false;
  for (NodeId u = 0; u < h.size(); ++u)
    if (in[u]) out.set.push_back(u);
  return out;
}

std::vector<std::pair<NodeId, std::uint8_t>> DNetwork::fixed_nodes() const {
  std::vector<std::pair<NodeId, std::uint8_t>> out;
  for (NodeId v = static_cast<NodeId>(base_size); v < graph.size(); ++v) out.emplace_back(v, value);
  return out;
}

DNetwork build_D(const Admg& h, NodeId xi, int x, std::vector<NodeId> origin) {
  if (h.has_hidden()) throw StructuralError("D construction needs a projected graph");
  if (xi >= h.size()) throw InvalidArgument(fmt::format("node {} out of range", xi));
  const auto target_component = component_of(h, xi);
  for (NodeId c : h.children(xi))
    if (std::binary_search(target_component.begin(), target_component.end(), c))
      throw StructuralError(fmt::format("effect of {} is not identifiable: {} shares its c-component",
                                        h.label(xi), h.label(c)));

  DNetwork d;
  d.target = xi;
  d.value = x ? 1 : 0;
  d.base_size = h.size();
  if (origin.empty()) {
    origin.resize(h.size());
    for (NodeId v = 0; v < h.size(); ++v) origin[v] = v;
  }
  if (origin.size() != h.size()) throw InvalidArgument("origin map has the wrong size");
  d.origin = std::move(origin);
  d.clone_of.assign(h.size(), kNoNode);
  d.in_target_component.assign(h.size(), false);
  for (NodeId v : target_component) d.in_target_component[v] = true;
  d.order = topological_order(h);
  d.learned_cpds.resize(h.size());

  for (NodeId v = 0; v < h.size(); ++v) d.graph.add_node(h.label(v), false, v == xi);
  d.graph.set_reward(h.reward());

  for (NodeId v : d.order) {
    auto z = effective_parents(h, v, d.order).set;
    if (!d.in_target_component[v]) {
      auto it = std::find(z.begin(), z.end(), xi);
      if (it != z.end()) {
        const NodeId clone = d.graph.add_node(fmt::format("{}'{}", h.label(xi), h.label(v)));
        d.clone_of[v] = clone;
        z.erase(it);
        z.push_back(clone);
      }
    }
    for (NodeId p : z) d.graph.add_edge(p, v);
    d.learned_cpds[v] = Cpt{v, z, std::vector<double>(std::size_t{1} << z.size(), 0.5)};
  }
  return d;
}

void learn_D(DNetwork& d, std::span<const ObsRecord> samples, std::size_t threshold) {
  const std::size_t target_slot = d.origin[d.target];
  std::vector<std::uint32_t> n_all, n_one;
  std::vector<std::size_t> slots;
  for (NodeId v : d.order) {
    Cpt& c = d.learned_cpds[v];
    const std::size_t k = c.parent_order.size();
    const bool via_clone = d.conditions_on_clone(v);
    std::uint64_t clone_bits = 0;
    slots.assign(k, 0);
    for (std::size_t j = 0; j < k; ++j) {
      const NodeId p = c.parent_order[j];
      if (d.is_clone(p))
        clone_bits |= std::uint64_t{d.value} << j;
      else
        slots[j] = d.origin[p];
    }
    const std::size_t own = d.origin[v];
    n_all.assign(c.table.size(), 0);
    n_one.assign(c.table.size(), 0);
    for (const ObsRecord& s : samples) {
      if (via_clone && s.values[target_slot] != d.value) continue;
      std::uint64_t mask = clone_bits;
      for (std::size_t j = 0; j < k; ++j)
        if (!d.is_clone(c.parent_order[j])) mask |= std::uint64_t{s.values[slots[j]]} << j;
      ++n_all[mask];
      n_one[mask] += s.values[own];
    }
    std::uint64_t clone_mask = 0;
    for (std::size_t j = 0; j < k; ++j)
      if (d.is_clone(c.parent_order[j])) clone_mask |= std::uint64_t{1} << j;
    for (std::uint64_t m = 0; m < c.table.size(); ++m) {
      if ((m & clone_mask) != clone_bits) {
        c.table[m] = 0.5;  // clone never takes this value
      } else if (d.in_target_component[v] || n_all[m] >= threshold) {
        c.table[m] = (n_one[m] + 1.0) / (n_all[m] + 2.0);
      } else {
        c.table[m] = 0.5;
      }
    }
  }
}

double d_reward_exact(const DNetwork& d) {
  std::vector<std::uint8_t> values(d.graph.size(), 0);
  for (auto [v, val] : d.fixed_nodes()) values[v] = val;
  const NodeId y = d.graph.reward();
  double total = 0.0;
  auto run = [&](auto&& self, std::size_t pos, double weight) -> void {
    if (pos == d.order.size()) {
      if (values[y]) total += weight;
      return;
    }
    const NodeId v = d.order[pos];
    const Cpt& c = d.learned_cpds[v];
    const double p1 = c.table[parent_mask(c, values)];
    values[v] = 0;
    self(self, pos + 1, weight * (1.0 - p1));
    values[v] = 1;
    self(self, pos + 1, weight * p1);
    values[v] = 0;
  };
  run(run, 0, 1.0);
  return total;
}

double d_reward_sampled(const DNetwork& d, std::size_t draws, Rng& rng) {
  if (draws == 0) throw InvalidArgument("sampling D needs a positive budget");
  std::vector<std::uint8_t> values(d.graph.size(), 0);
  for (auto [v, val] : d.fixed_nodes()) values[v] = val;
  const NodeId y = d.graph.reward();
  std::size_t ones = 0;
  for (std::size_t s = 0; s < draws; ++s) {
    for (NodeId v : d.order) {
      const Cpt& c = d.learned_cpds[v];
      values[v] = rng.bernoulli(c.table[parent_mask(c, values)]) ? 1 : 0;
    }
    ones += values[y];
  }
  return static_cast<double>(ones) / static_cast<double>(draws);
}

ObservationalEstimator::ObservationalEstimator(const Admg& g, EstimatorOptions options)
    : graph_(g), options_(options), arms_(arm_list(g)) {
  if (g.has_hidden()) throw StructuralError("estimator needs the projected graph");
  for (NodeId xi : g.intervenable()) {
    reduced_.push_back(reduce_graph(g, xi));
    const ReducedGraph& r = reduced_.back();
    for (int x = 0; x < 2; ++x) networks_.push_back(build_D(r.graph, r.local(xi), x, r.original));
  }
}

double ObservationalEstimator::estimate_arm(std::size_t a, std::span<const ObsRecord> samples,
                                            std::size_t sample_budget, Rng& rng) const {
  if (a == 0) {
    if (samples.empty()) return 0.5;
    std::size_t ones = 0;
    for (const ObsRecord& s : samples) ones += s.reward;
    return static_cast<double>(ones) / static_cast<double>(samples.size());
  }
  DNetwork d = network(a);
  learn_D(d, samples, options_.threshold);
  if (d.base_size <= options_.enumeration_limit) return d_reward_exact(d);
  return d_reward_sampled(d, sample_budget, rng);
}

std::vector<double> ObservationalEstimator::estimate(std::span<const ObsRecord> samples,
                                                     std::size_t sample_budget, Rng& rng) const {
  std::vector<double> out(arms_.size());
  for (std::size_t a = 0; a < arms_.size(); ++a) out[a] = estimate_arm(a, samples, sample_budget, rng);
  return out;
}

std::vector<double> estimate_all_rewards(const Admg& g, std::span<const ObsRecord> samples,
                                         std::size_t sample_budget, Rng& rng,
                                         EstimatorOptions options) {
  return ObservationalEstimator(g, options).estimate(samples, sample_budget, rng);
}

}  // namespace cbandit
