#include "cbandit/inference.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "cbandit/errors.hpp"

namespace cbandit {

namespace {

bool fixed_by(const Arm& arm, NodeId v) { return !arm.is_observe() && arm.target == v; }

void check_arm(const Cbn& cbn, const Arm& arm) {
  if (!arm.is_observe() &&
      (arm.target >= cbn.graph().size() || !cbn.graph().is_intervenable(arm.target)))
    throw InvalidArgument("arm targets a node that is not intervenable");
}

struct Enumerator {
  const Cbn& cbn;
  const Arm& arm;
  const std::vector<NodeId>& nodes;
  const std::vector<NodeId>& query;
  std::vector<double>& out;
  std::vector<std::uint8_t> values;

  void run(std::size_t pos, double weight) {
    if (pos == nodes.size()) {
      std::size_t idx = 0;
      for (std::size_t j = 0; j < query.size(); ++j) idx |= std::size_t{values[query[j]]} << j;
      out[idx] += weight;
      return;
    }
    const NodeId v = nodes[pos];
    if (fixed_by(arm, v)) {
      values[v] = arm.value;
      run(pos + 1, weight);
      return;
    }
    const Cpt& c = cbn.cpt(v);
    std::uint64_t mask = 0;
    for (std::size_t j = 0; j < c.parent_order.size(); ++j)
      mask |= std::uint64_t{values[c.parent_order[j]]} << j;
    const double p1 = c.table[mask];
    if (p1 < 1.0) {
      values[v] = 0;
      run(pos + 1, weight * (1.0 - p1));
    }
    if (p1 > 0.0) {
      values[v] = 1;
      run(pos + 1, weight * p1);
    }
    values[v] = 0;
  }
};

}  // namespace

std::vector<NodeId> relevant_nodes(const Cbn& cbn, const Arm& arm, const std::vector<NodeId>& query) {
  check_arm(cbn, arm);
  const std::size_t n = cbn.graph().size();
  std::vector<bool> in(n, false);
  std::vector<NodeId> stack;
  for (NodeId q : query) {
    if (q >= n) throw InvalidArgument(fmt::format("query node {} out of range", q));
    if (!in[q]) {
      in[q] = true;
      stack.push_back(q);
    }
  }
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    if (fixed_by(arm, v)) continue;
    const Cpt& c = cbn.cpt(v);
    for (std::size_t j = 0; j < c.parent_order.size(); ++j) {
      const NodeId p = c.parent_order[j];
      if (!in[p] && c.depends_on(j)) {
        in[p] = true;
        stack.push_back(p);
      }
    }
  }
  std::vector<NodeId> out;
  for (NodeId v : cbn.order())
    if (in[v]) out.push_back(v);
  return out;
}

std::vector<double> joint_marginal(const Cbn& cbn, const Arm& arm, const std::vector<NodeId>& query,
                                   std::size_t limit) {
  const auto nodes = relevant_nodes(cbn, arm, query);
  const auto free_count = static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [&](NodeId v) { return !fixed_by(arm, v); }));
  if (free_count > limit)
    throw EnumerationInfeasible(
        fmt::format("{} relevant nodes exceed the enumeration limit of {}", free_count, limit));
  if (query.size() > 30) throw EnumerationInfeasible("query too large");
  std::vector<double> out(std::size_t{1} << query.size(), 0.0);
  Enumerator e{cbn, arm, nodes, query, out, std::vector<std::uint8_t>(cbn.graph().size(), 0)};
  e.run(0, 1.0);
  return out;
}

double exact_reward(const Cbn& cbn, const Arm& arm, std::size_t limit) {
  return joint_marginal(cbn, arm, {cbn.reward()}, limit)[1];
}

std::vector<double> exact_rewards(const Cbn& cbn, std::size_t limit) {
  std::vector<double> out;
  for (const Arm& a : arm_list(cbn.visible_graph())) out.push_back(exact_reward(cbn, a, limit));
  return out;
}

bool below_inverse(double q, std::size_t k, double tau) {
  return std::pow(q, static_cast<double>(k)) < 1.0 / tau - kProbabilityTolerance;
}

std::size_t compute_m(const std::vector<double>& q, const std::vector<std::size_t>& k) {
  const std::size_t n = q.size();
  if (k.size() != n) throw InvalidArgument("q and k differ in length");
  const std::size_t top = std::max<std::size_t>(2, 2 * n);
  for (std::size_t tau = 2; tau <= top; ++tau) {
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (below_inverse(q[i], k[i], static_cast<double>(tau))) ++count;
    if (count <= tau) return tau;
  }
  return top;
}

QmResult exact_q_and_m(const Cbn& cbn, std::size_t limit) {
  const Admg& g = cbn.visible_graph();
  QmResult r;
  r.nodes = g.intervenable();
  for (NodeId xi : r.nodes) {
    const auto ctx = pa_plus_and_pa_c(g, xi);
    std::vector<NodeId> query{xi};
    query.insert(query.end(), ctx.pa_c.begin(), ctx.pa_c.end());
    const auto joint = joint_marginal(cbn, Arm::observe(), query, limit);
    r.q.push_back(*std::min_element(joint.begin(), joint.end()));
    r.k.push_back(ctx.k);
  }
  r.m = compute_m(r.q, r.k);
  return r;
}

double backdoor_reward(const Cbn& cbn, NodeId xi, int x, std::size_t limit) {
  const Admg& g = cbn.graph();
  if (g.has_hidden() || g.has_bidirected())
    throw StructuralError("backdoor adjustment needs a fully observable graph");
  if (xi >= g.size() || !g.is_intervenable(xi))
    throw InvalidArgument(fmt::format("node {} is not intervenable", xi));
  const NodeId y = cbn.reward();
  const auto& z = g.parents(xi);
  // Bit 0 is X_i, bits 1..|z| are the parents, Y gets its own bit unless it
  // is one of the parents.
  std::vector<NodeId> query{xi};
  query.insert(query.end(), z.begin(), z.end());
  auto y_pos = static_cast<std::size_t>(std::find(query.begin(), query.end(), y) - query.begin());
  if (y_pos == query.size()) query.push_back(y);
  const auto joint = joint_marginal(cbn, Arm::observe(), query, limit);

  const std::size_t xv = x ? 1 : 0;
  const std::size_t y_bit = std::size_t{1} << y_pos;
  const bool y_separate = y_pos == z.size() + 1;
  double total = 0.0;
  for (std::size_t zm = 0; zm < (std::size_t{1} << z.size()); ++zm) {
    const std::size_t base = zm << 1;
    double p_z = joint[base] + joint[base | 1];
    double p_x = joint[base | xv];
    double p_xy = (base & y_bit) ? p_x : 0.0;
    if (y_separate) {
      p_z += joint[base | y_bit] + joint[base | 1 | y_bit];
      p_xy = joint[base | xv | y_bit];
      p_x += p_xy;
    }
    if (p_x <= 0.0)
      throw PositivityViolation(fmt::format("P({}={}, Pa({})={}) is zero", g.label(xi), x,
                                            g.label(xi), describe(g, z) + "#" + std::to_string(zm)));
    total += p_xy / p_x * p_z;
  }
  return total;
}

}  // namespace cbandit
