#pragma once

// Layered belief graph: the random graph replicated over every reachable
// belief (action edges inside a layer) plus directed observation edges that
// move between layers at configurations where a factor is observable.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "pto/belief.hpp"
#include "pto/rrg.hpp"

namespace pto {

struct BeliefNode {
  NodeId rrg_node = 0;
  BeliefId belief = 0;
  Config config;
  WorldSet support;
  WorldSet goal_worlds;
};

/// Goal holds in every world still considered possible.
inline bool is_final(const BeliefNode& n) { return !n.support.empty() && n.support.subset_of(n.goal_worlds); }

struct ActionArc {
  std::uint32_t to = 0;
  double cost = 0.0;
};

struct ObservationChild {
  std::uint32_t node = 0;
  double probability = 0.0;
  WorldSet outcome;
};

/// Every outcome of observing one factor at one belief-node.
struct ObservationGroup {
  std::uint32_t factor = 0;
  std::vector<ObservationChild> children;
};

/// Belief-nodes with two kinds of action arcs: explicit arcs added one by
/// one, and layered arcs implied by a random graph. A layered arc joins
/// (u, b) and (v, b) for every random-graph edge (u, v) whose worlds contain
/// the support of b; it is enumerated on demand instead of stored.
class BeliefGraph {
 public:
  std::uint32_t add_node(const BeliefNode& n) {
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    nodes_.push_back(n);
    actions_.emplace_back();
    observations_.emplace_back();
    observation_parents_.emplace_back();
    return id;
  }

  /// Undirected motion edge inside one layer.
  void add_action_edge(std::uint32_t u, std::uint32_t v, double cost) {
    actions_[u].push_back({v, cost});
    actions_[v].push_back({u, cost});
    ++action_edges_;
  }

  /// Binds the random graph whose edges are replicated into every layer.
  /// Nodes must already be sorted by (rrg_node, belief) and `g` must
  /// outlive this graph.
  void set_layers(const RRGraph& g) {
    rrg_ = &g;
    first_.assign(g.nodes.size() + 1, 0);
    for (const BeliefNode& n : nodes_) ++first_[n.rrg_node + 1];
    for (std::size_t i = 1; i < first_.size(); ++i) first_[i] += first_[i - 1];
    beliefs_ = 0;
    for (const BeliefNode& n : nodes_) beliefs_ = std::max<std::size_t>(beliefs_, n.belief + 1);
    table_.clear();
    if (g.nodes.size() * beliefs_ <= kMaxTable) {
      table_.assign(g.nodes.size() * beliefs_, kAbsent);
      for (std::uint32_t i = 0; i < nodes_.size(); ++i) table_[nodes_[i].rrg_node * beliefs_ + nodes_[i].belief] = i;
    }
    layered_edges_ = 0;
    for (const RrgEdge& e : g.edges) {
      for (std::uint32_t k = first_[e.u]; k < first_[e.u + 1]; ++k)
        if (nodes_[k].support.subset_of(e.worlds)) ++layered_edges_;
    }
  }

  /// Belief-node for (rrg node, belief) in layered mode.
  std::optional<std::uint32_t> find(NodeId n, BeliefId b) const {
    if (!rrg_ || n + 1 >= first_.size()) return std::nullopt;
    if (!table_.empty()) {
      if (b >= beliefs_) return std::nullopt;
      const std::uint32_t id = table_[n * beliefs_ + b];
      if (id == kAbsent) return std::nullopt;
      return id;
    }
    const auto lo = nodes_.begin() + first_[n];
    const auto hi = nodes_.begin() + first_[n + 1];
    const auto it = std::lower_bound(lo, hi, b, [](const BeliefNode& x, BeliefId v) { return x.belief < v; });
    if (it == hi || it->belief != b) return std::nullopt;
    return static_cast<std::uint32_t>(it - nodes_.begin());
  }

  /// Calls f(to, cost) for every action arc leaving node i.
  template <typename F>
  void for_each_action(std::uint32_t i, F&& f) const {
    for (const ActionArc& a : actions_[i]) f(a.to, a.cost);
    if (!rrg_) return;
    const BeliefNode& n = nodes_[i];
    for (std::uint32_t eid : rrg_->adjacency[n.rrg_node]) {
      const RrgEdge& e = rrg_->edges[eid];
      if (!n.support.subset_of(e.worlds)) continue;
      const auto to = find(rrg_->other(e, n.rrg_node), n.belief);
      if (to) f(*to, e.cost);
    }
  }

  void add_observation_group(std::uint32_t u, ObservationGroup g) {
    const auto gi = static_cast<std::uint32_t>(observations_[u].size());
    for (const ObservationChild& c : g.children) observation_parents_[c.node].push_back({u, gi});
    observation_edges_ += g.children.size();
    observations_[u].push_back(std::move(g));
  }

  std::size_t size() const { return nodes_.size(); }
  const BeliefNode& node(std::uint32_t i) const { return nodes_[i]; }
  const std::vector<BeliefNode>& nodes() const { return nodes_; }
  const std::vector<ObservationGroup>& observations(std::uint32_t i) const { return observations_[i]; }
  /// (parent node, group index) pairs whose group contains node i.
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& observation_parents(std::uint32_t i) const {
    return observation_parents_[i];
  }
  std::size_t action_edge_count() const { return action_edges_ + layered_edges_; }
  std::size_t observation_edge_count() const { return observation_edges_; }

  std::uint32_t root = 0;

 private:
  std::vector<BeliefNode> nodes_;
  std::vector<std::vector<ActionArc>> actions_;
  std::vector<std::vector<ObservationGroup>> observations_;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> observation_parents_;
  std::size_t action_edges_ = 0;
  static constexpr std::size_t kMaxTable = std::size_t{1} << 26;
  static constexpr std::uint32_t kAbsent = 0xffffffffU;
  const RRGraph* rrg_ = nullptr;
  std::vector<std::uint32_t> first_;
  // Dense (rrg node, belief) -> id table when small enough.
  std::size_t beliefs_ = 0;
  std::vector<std::uint32_t> table_;
  std::size_t layered_edges_ = 0;
  std::size_t observation_edges_ = 0;
};

/// Reachable beliefs whose support lies inside `edge_worlds`, ascending id.
inline std::vector<BeliefId> beliefs_compatible(WorldSet edge_worlds, const BeliefRegistry& registry) {
  std::vector<BeliefId> out;
  for (const BeliefState& b : registry.beliefs())
    if (b.support.subset_of(edge_worlds)) out.push_back(b.id);
  return out;
}

struct BeliefGraphBuild {
  BeliefGraph graph;
  /// Visible-factor mask per random-graph node.
  std::vector<std::uint64_t> visibility;
};

/// Expands a random graph into the belief graph. The registry is closed
/// under observation of every factor visible from some node. Belief-nodes
/// are numbered in (rrg_node, belief) order. The result refers to `g`.
inline BeliefGraphBuild build_belief_graph(const Scenario& sc, const RRGraph& g, BeliefRegistry& registry) {
  BeliefGraphBuild out;
  out.visibility.resize(g.nodes.size());
  std::uint64_t observable = 0;
  for (NodeId i = 0; i < g.nodes.size(); ++i) {
    out.visibility[i] = visible_factors(sc, g.nodes[i].config);
    observable |= out.visibility[i];
  }
  enumerate_reachable(sc, registry, observable);

  const auto key = [](NodeId n, BeliefId b) { return (std::uint64_t{n} << 32) | b; };
  std::unordered_set<std::uint64_t> keys;
  std::unordered_map<std::uint64_t, std::vector<BeliefId>> compat_cache;
  const auto compatible = [&](WorldSet w) -> const std::vector<BeliefId>& {
    auto it = compat_cache.find(w.mask());
    if (it == compat_cache.end()) it = compat_cache.emplace(w.mask(), beliefs_compatible(w, registry)).first;
    return it->second;
  };

  // Layers: replicate each edge into compatible beliefs.
  for (const RrgEdge& e : g.edges) {
    for (BeliefId b : compatible(e.worlds)) {
      keys.insert(key(e.u, b));
      keys.insert(key(e.v, b));
    }
  }
  keys.insert(key(g.root, registry.root()));

  // Observation transitions, closed over newly created nodes.
  std::vector<std::uint64_t> work(keys.begin(), keys.end());
  while (!work.empty()) {
    const std::uint64_t k = work.back();
    work.pop_back();
    const auto n = static_cast<NodeId>(k >> 32);
    const auto b = static_cast<BeliefId>(k & 0xffffffffU);
    if (out.visibility[n] == 0) continue;
    for (const FactorObservation& obs : observe_visible(sc, registry, b, out.visibility[n]))
      for (const ObservationOutcome& o : obs.outcomes)
        if (keys.insert(key(n, o.child)).second) work.push_back(key(n, o.child));
  }

  std::vector<std::uint64_t> sorted(keys.begin(), keys.end());
  std::sort(sorted.begin(), sorted.end());
  std::unordered_map<std::uint64_t, std::uint32_t> id_of;
  id_of.reserve(sorted.size());
  BeliefGraph& bg = out.graph;
  for (std::uint64_t k : sorted) {
    const auto n = static_cast<NodeId>(k >> 32);
    const auto b = static_cast<BeliefId>(k & 0xffffffffU);
    id_of.emplace(k, bg.add_node({n, b, g.nodes[n].config, registry[b].support, g.nodes[n].goal_worlds}));
  }
  bg.root = id_of.at(key(g.root, registry.root()));

  bg.set_layers(g);

  for (std::uint32_t u = 0; u < bg.size(); ++u) {
    const BeliefNode& bn = bg.node(u);
    if (out.visibility[bn.rrg_node] == 0) continue;
    for (const FactorObservation& obs : observe_visible(sc, registry, bn.belief, out.visibility[bn.rrg_node])) {
      ObservationGroup grp{static_cast<std::uint32_t>(obs.factor), {}};
      for (const ObservationOutcome& o : obs.outcomes)
        grp.children.push_back({id_of.at(key(bn.rrg_node, o.child)), o.probability, o.consistent});
      bg.add_observation_group(u, std::move(grp));
    }
  }
  return out;
}

}  // namespace pto
