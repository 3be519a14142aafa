#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cbandit/admg.hpp"
#include "cbandit/rng.hpp"

namespace cbandit {

// P(owner = 1 | parents). Bit j of the table index (least significant first)
// is the value of parent_order[j]. parent_order is a sorted subset of the
// owner's graph parents; parents left out have no influence on the owner.
struct Cpt {
  NodeId owner = kNoNode;
  std::vector<NodeId> parent_order;
  std::vector<double> table;

  double p_one(std::uint64_t mask) const { return table[mask]; }
  // Whether the table changes when bit j flips.
  bool depends_on(std::size_t j) const;

  bool operator==(const Cpt&) const = default;
};

enum class ArmKind : std::uint8_t { Observe, Do };

struct Arm {
  ArmKind kind = ArmKind::Observe;
  NodeId target = kNoNode;
  std::uint8_t value = 0;

  static Arm observe() { return {}; }
  static Arm intervene(NodeId target, int value) {
    return {ArmKind::Do, target, static_cast<std::uint8_t>(value != 0)};
  }
  bool is_observe() const { return kind == ArmKind::Observe; }

  bool operator==(const Arm&) const = default;
};

// a0 first, then do(X=0), do(X=1) for each intervenable X in index order.
std::vector<Arm> arm_list(const Admg& g);
std::string arm_name(const Arm& arm, const Admg& g);

struct ObsRecord {
  std::vector<std::uint8_t> values;  // indexed by observable node id
  std::uint8_t reward = 0;
};

// Ground-truth model. Hidden nodes must carry the highest ids so observable
// ids agree with the ids in the latent projection.
class Cbn {
 public:
  Cbn(Admg graph, std::vector<Cpt> cpts);

  const Admg& graph() const { return graph_; }
  const Admg& visible_graph() const { return visible_; }
  const Cpt& cpt(NodeId v) const { return cpts_.at(v); }
  const std::vector<Cpt>& cpts() const { return cpts_; }
  NodeId reward() const { return graph_.reward(); }
  const std::vector<NodeId>& order() const { return order_; }
  std::size_t observable_count() const { return observable_count_; }

  bool operator==(const Cbn& o) const { return graph_ == o.graph_ && cpts_ == o.cpts_; }

 private:
  Admg graph_;
  Admg visible_;
  std::vector<Cpt> cpts_;
  std::vector<NodeId> order_;
  std::size_t observable_count_ = 0;
};

// Ancestral sampling of one round under `arm`.
ObsRecord sample(const Cbn& cbn, const Arm& arm, Rng& rng);

// Same, writing every node (hidden included) into `values`.
void sample_into(const Cbn& cbn, const Arm& arm, Rng& rng, std::vector<std::uint8_t>& values);

}  // namespace cbandit
