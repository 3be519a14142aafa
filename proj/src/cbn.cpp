#include "cbandit/cbn.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cbandit/errors.hpp"

namespace cbandit {

namespace {
constexpr std::size_t kMaxCptParents = 24;
}

bool Cpt::depends_on(std::size_t j) const {
  const std::uint64_t bit = std::uint64_t{1} << j;
  for (std::uint64_t m = 0; m < table.size(); ++m)
    if (!(m & bit) && table[m] != table[m | bit]) return true;
  return false;
}

std::vector<Arm> arm_list(const Admg& g) {
  std::vector<Arm> arms{Arm::observe()};
  for (NodeId v : g.intervenable()) {
    arms.push_back(Arm::intervene(v, 0));
    arms.push_back(Arm::intervene(v, 1));
  }
  return arms;
}

std::string arm_name(const Arm& arm, const Admg& g) {
  if (arm.is_observe()) return "a0";
  return fmt::format("do({}={})", g.label(arm.target), arm.value);
}

Cbn::Cbn(Admg graph, std::vector<Cpt> cpts) : graph_(std::move(graph)), cpts_(std::move(cpts)) {
  graph_.validate();
  const std::size_t n = graph_.size();
  bool seen_hidden = false;
  for (NodeId v = 0; v < n; ++v) {
    if (graph_.is_hidden(v)) {
      seen_hidden = true;
    } else {
      if (seen_hidden)
        throw StructuralError("hidden nodes must have higher ids than every observable node");
      ++observable_count_;
    }
  }
  if (cpts_.size() != n)
    throw StructuralError(fmt::format("expected {} CPTs, got {}", n, cpts_.size()));
  for (NodeId v = 0; v < n; ++v) {
    const Cpt& c = cpts_[v];
    if (c.owner != v) throw StructuralError(fmt::format("CPT {} has owner {}", v, c.owner));
    const auto& parents = graph_.parents(v);
    if (c.parent_order.size() > kMaxCptParents)
      throw StructuralError(fmt::format("CPT of {} has too many parents", graph_.label(v)));
    for (std::size_t j = 0; j < c.parent_order.size(); ++j) {
      if (j > 0 && c.parent_order[j] <= c.parent_order[j - 1])
        throw StructuralError(fmt::format("CPT of {} has unsorted parents", graph_.label(v)));
      if (!std::binary_search(parents.begin(), parents.end(), c.parent_order[j]))
        throw StructuralError(
            fmt::format("CPT of {} lists a non-parent {}", graph_.label(v), c.parent_order[j]));
    }
    if (c.table.size() != (std::size_t{1} << c.parent_order.size()))
      throw StructuralError(fmt::format("CPT of {} has {} entries, expected {}", graph_.label(v),
                                        c.table.size(), std::size_t{1} << c.parent_order.size()));
    for (double p : c.table)
      if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw StructuralError(fmt::format("CPT of {} has entry {}", graph_.label(v), p));
  }
  visible_ = latent_projection(graph_);
  order_ = topological_order(graph_);
}

void sample_into(const Cbn& cbn, const Arm& arm, Rng& rng, std::vector<std::uint8_t>& values) {
  if (!arm.is_observe() &&
      (arm.target >= cbn.graph().size() || !cbn.graph().is_intervenable(arm.target)))
    throw InvalidArgument("arm targets a node that is not intervenable");
  values.assign(cbn.graph().size(), 0);
  for (NodeId v : cbn.order()) {
    if (!arm.is_observe() && arm.target == v) {
      values[v] = arm.value;
      continue;
    }
    const Cpt& c = cbn.cpt(v);
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < c.parent_order.size(); ++j)
      mask |= std::uint64_t{values[c.parent_order[j]]} << j;
    values[v] = rng.bernoulli(c.table[mask]) ? 1 : 0;
  }
}

ObsRecord sample(const Cbn& cbn, const Arm& arm, Rng& rng) {
  std::vector<std::uint8_t> all;
  sample_into(cbn, arm, rng, all);
  all.resize(cbn.observable_count());
  ObsRecord r;
  r.reward = all[cbn.reward()];
  r.values = std::move(all);
  return r;
}

}  // namespace cbandit
