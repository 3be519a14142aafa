#include "cbandit/instance_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "cbandit/errors.hpp"

namespace cbandit {

using nlohmann::json;

json instance_to_json(const Cbn& cbn) {
  const Admg& g = cbn.graph();
  json nodes = json::array();
  for (NodeId v = 0; v < g.size(); ++v) {
    const auto& info = g.node(v);
    nodes.push_back({{"index", v},
                     {"label", info.label},
                     {"hidden", info.hidden},
                     {"intervenable", info.intervenable},
                     {"reward", v == g.reward()}});
  }
  json edges = json::array();
  for (auto [p, c] : g.directed_edges()) edges.push_back({p, c});
  json bidirected = json::array();
  for (auto [a, b] : g.bidirected_edges()) bidirected.push_back({a, b});
  json cpts = json::array();
  for (const Cpt& c : cbn.cpts())
    cpts.push_back({{"node", c.owner}, {"parent_order", c.parent_order}, {"table", c.table}});
  return {{"format", kInstanceFormat}, {"version", kInstanceVersion}, {"nodes", nodes},
          {"edges", edges},            {"bidirected", bidirected},    {"cpts", cpts}};
}

namespace {

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(fmt::format("missing field '{}'", key));
  return obj.at(key);
}

NodeId node_id(const json& v, std::size_t n) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() >= n)
    throw ParseError(fmt::format("bad node reference {}", v.dump()));
  return v.get<NodeId>();
}

std::pair<NodeId, NodeId> pair_of(const json& e, std::size_t n) {
  if (!e.is_array() || e.size() != 2) throw ParseError(fmt::format("bad edge {}", e.dump()));
  return {node_id(e[0], n), node_id(e[1], n)};
}

}  // namespace

Cbn instance_from_json(const json& doc) {
  try {
    if (field(doc, "format") != kInstanceFormat) throw ParseError("unknown instance format");
    if (field(doc, "version") != kInstanceVersion) throw ParseError("unsupported instance version");
    const json& nodes = field(doc, "nodes");
    if (!nodes.is_array()) throw ParseError("'nodes' must be an array");
    Admg g;
    bool have_reward = false;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const json& n = nodes[i];
      if (field(n, "index") != i) throw ParseError(fmt::format("node {} listed out of order", i));
      const NodeId v = g.add_node(field(n, "label").get<std::string>(),
                                  field(n, "hidden").get<bool>(),
                                  field(n, "intervenable").get<bool>());
      if (field(n, "reward").get<bool>()) {
        if (have_reward) throw ParseError("more than one reward node");
        g.set_reward(v);
        have_reward = true;
      }
    }
    if (!have_reward) throw ParseError("no reward node");
    for (const json& e : field(doc, "edges")) {
      auto [p, c] = pair_of(e, g.size());
      g.add_edge(p, c);
    }
    for (const json& e : field(doc, "bidirected")) {
      auto [a, b] = pair_of(e, g.size());
      g.add_bidirected(a, b);
    }
    std::vector<Cpt> cpts;
    for (const json& c : field(doc, "cpts")) {
      Cpt cpt;
      cpt.owner = node_id(field(c, "node"), g.size());
      for (const json& p : field(c, "parent_order")) cpt.parent_order.push_back(node_id(p, g.size()));
      cpt.table = field(c, "table").get<std::vector<double>>();
      cpts.push_back(std::move(cpt));
    }
    return Cbn(std::move(g), std::move(cpts));
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

std::string dump_instance(const Cbn& cbn) { return instance_to_json(cbn).dump(1) + "\n"; }

Cbn parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  return instance_from_json(doc);
}

void save_instance(const Cbn& cbn, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << dump_instance(cbn);
  if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

Cbn load_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

}  // namespace cbandit
