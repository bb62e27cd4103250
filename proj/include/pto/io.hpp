#pragma once

// JSON documents: path-trees, random-graph dumps and metrics records.

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pto/path_tree.hpp"
#include "pto/planner.hpp"
#include "pto/rrg.hpp"
#include "pto/scenario.hpp"

namespace pto {

inline constexpr int kDocumentFormat = 1;

class DocumentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Extra fields recorded with a tree: where it came from.
struct Provenance {
  std::string scenario_hash;
  std::uint64_t seed = 0;
  nlohmann::json params = nlohmann::json::object();
};

inline nlohmann::json path_tree_to_json(const PathTree& t, const Provenance& prov) {
  using nlohmann::json;
  json doc;
  doc["format"] = kDocumentFormat;
  doc["type"] = "path_tree";
  doc["algorithm"] = t.algorithm;
  doc["scenario_hash"] = prov.scenario_hash;
  doc["seed"] = prov.seed;
  doc["params"] = prov.params;
  doc["expected_cost"] = t.expected_cost;
  doc["prior"] = t.prior;

  // Support mask <-> belief id table, in id order.
  std::map<BeliefId, std::uint64_t> beliefs;
  for (const PathTreeNode& n : t.nodes) beliefs.emplace(n.belief, n.support.mask());
  json reg = json::array();
  for (const auto& [id, mask] : beliefs) reg.push_back({{"id", id}, {"support", mask}});
  doc["beliefs"] = reg;

  json nodes = json::array();
  json edges = json::array();
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const PathTreeNode& n = t.nodes[i];
    json nj;
    nj["id"] = i;
    nj["config"] = json::array({n.config.x, n.config.y});
    nj["belief"] = n.belief;
    nj["support"] = n.support.mask();
    nj["kind"] = to_string(n.kind);
    if (n.observed_factor) nj["observed_factor"] = *n.observed_factor;
    if (n.kind == TreeNodeKind::Leaf) nj["goal_worlds"] = n.goal_worlds.mask();
    nodes.push_back(nj);
    if (n.parent >= 0) {
      json ej;
      ej["parent"] = n.parent;
      ej["child"] = i;
      ej["cost"] = n.cost_from_parent;
      ej["probability"] = n.probability;
      if (n.outcome) ej["outcome"] = n.outcome->mask();
      edges.push_back(ej);
    }
  }
  doc["nodes"] = nodes;
  doc["edges"] = edges;
  return doc;
}

inline PathTree path_tree_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", 0) != kDocumentFormat || doc.value("type", "") != "path_tree")
      throw DocumentError("not a format-1 path-tree document");
    PathTree t;
    t.algorithm = doc.at("algorithm").get<std::string>();
    t.expected_cost = doc.at("expected_cost").get<double>();
    t.prior = doc.at("prior").get<std::vector<double>>();
    const auto& nodes = doc.at("nodes");
    t.nodes.resize(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const auto& nj = nodes[i];
      if (nj.at("id").get<std::size_t>() != i) throw DocumentError("node ids must be dense and ordered");
      PathTreeNode& n = t.nodes[i];
      n.config = {nj.at("config").at(0).get<double>(), nj.at("config").at(1).get<double>()};
      n.belief = nj.at("belief").get<BeliefId>();
      n.support = WorldSet(nj.at("support").get<std::uint64_t>());
      const std::string kind = nj.at("kind").get<std::string>();
      if (kind == "motion") {
        n.kind = TreeNodeKind::Motion;
      } else if (kind == "branching") {
        n.kind = TreeNodeKind::Branching;
      } else if (kind == "leaf") {
        n.kind = TreeNodeKind::Leaf;
      } else {
        throw DocumentError("unknown node kind '" + kind + "'");
      }
      if (nj.contains("observed_factor")) n.observed_factor = nj.at("observed_factor").get<std::uint32_t>();
      if (nj.contains("goal_worlds")) n.goal_worlds = WorldSet(nj.at("goal_worlds").get<std::uint64_t>());
    }
    for (const auto& ej : doc.at("edges")) {
      const auto p = ej.at("parent").get<std::int32_t>();
      const auto c = ej.at("child").get<std::size_t>();
      if (p < 0 || static_cast<std::size_t>(p) >= c || c >= t.nodes.size())
        throw DocumentError("edge must point from an earlier node to a later one");
      PathTreeNode& n = t.nodes[c];
      n.parent = p;
      n.cost_from_parent = ej.at("cost").get<double>();
      n.probability = ej.at("probability").get<double>();
      if (ej.contains("outcome")) n.outcome = WorldSet(ej.at("outcome").get<std::uint64_t>());
      t.nodes[static_cast<std::size_t>(p)].children.push_back(static_cast<std::uint32_t>(c));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("malformed path-tree document: ") + e.what());
  }
}

inline nlohmann::json graph_to_json(const RRGraph& g, const std::string& scenario_hash) {
  using nlohmann::json;
  json doc;
  doc["format"] = kDocumentFormat;
  doc["type"] = "rrg";
  doc["scenario_hash"] = scenario_hash;
  doc["root"] = g.root;
  doc["hypotheses"] = g.hypotheses;
  json nodes = json::array();
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const RrgNode& n = g.nodes[i];
    nodes.push_back({{"id", i},
                     {"x", n.config.x},
                     {"y", n.config.y},
                     {"goal", n.goal_worlds.mask()},
                     {"valid", n.valid_worlds.mask()}});
  }
  json edges = json::array();
  for (const RrgEdge& e : g.edges) edges.push_back({{"u", e.u}, {"v", e.v}, {"worlds", e.worlds.mask()}, {"cost", e.cost}});
  doc["nodes"] = nodes;
  doc["edges"] = edges;
  return doc;
}

inline RRGraph graph_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", 0) != kDocumentFormat || doc.value("type", "") != "rrg")
      throw DocumentError("not a format-1 graph document");
    RRGraph g;
    g.hypotheses = doc.at("hypotheses").get<std::size_t>();
    for (const auto& nj : doc.at("nodes"))
      g.add_node({{nj.at("x").get<double>(), nj.at("y").get<double>()},
                  WorldSet(nj.at("goal").get<std::uint64_t>()),
                  WorldSet(nj.at("valid").get<std::uint64_t>())});
    for (const auto& ej : doc.at("edges")) {
      const auto u = ej.at("u").get<NodeId>();
      const auto v = ej.at("v").get<NodeId>();
      if (u >= g.nodes.size() || v >= g.nodes.size()) throw DocumentError("edge endpoint out of range");
      g.add_edge(u, v, WorldSet(ej.at("worlds").get<std::uint64_t>()));
    }
    g.root = doc.at("root").get<NodeId>();
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw DocumentError(std::string("malformed graph document: ") + e.what());
  }
}

/// One metrics record. Wall times are omitted when `timings` is false so
/// that records are reproducible.
inline nlohmann::json metrics_to_json(const PlanMetrics& m, const Provenance& prov, bool timings) {
  using nlohmann::json;
  json r;
  r["format"] = kDocumentFormat;
  r["type"] = "metrics";
  r["algorithm"] = "pto";
  r["scenario_hash"] = prov.scenario_hash;
  r["seed"] = prov.seed;
  r["iterations"] = m.iterations;
  r["complete_at"] = m.complete_at;
  r["rrg_nodes"] = m.rrg_nodes;
  r["rrg_edges"] = m.rrg_edges;
  r["beliefs"] = m.beliefs;
  r["belief_nodes"] = m.belief_nodes;
  r["action_edges"] = m.action_edges;
  r["observation_edges"] = m.observation_edges;
  r["branching_nodes"] = m.branching_nodes;
  r["rebuilds"] = m.rebuilds;
  r["collision_checks"] = m.collision_checks;
  r["unrefined_cost"] = m.unrefined_cost;
  r["cost"] = m.cost;
  if (timings) {
    r["time_ms"] = {{"random_graph", m.times.rrg_ms},
                    {"belief_expansion", m.times.belief_ms},
                    {"policy_extraction", m.times.policy_ms},
                    {"partial_shortcut", m.times.refine_ms}};
  }
  return r;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DocumentError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw DocumentError("'" + path + "': " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DocumentError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DocumentError("write failed for '" + path + "'");
}

}  // namespace pto
