#pragma once

// Executes a path-tree in a known ground-truth world.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "pto/path_tree.hpp"
#include "pto/scenario.hpp"

namespace pto {

struct WorldExecution {
  std::size_t world = 0;
  double prior = 0.0;
  double cost = 0.0;
  bool reached_goal = false;
  /// False if some executed motion collides in this world when re-checked
  /// at a finer resolution than planning uses.
  bool safe = true;
  std::size_t branchings = 0;
  std::vector<std::uint32_t> visited;
  std::optional<std::string> violation;
};

struct SimulationReport {
  std::vector<WorldExecution> worlds;
  /// Prior-weighted executed cost over the simulated worlds.
  double weighted_cost = 0.0;
  bool all_reached = true;
  bool all_safe = true;
};

inline WorldExecution simulate_world(const PathTree& t, const Scenario& sc, std::size_t s,
                                     double check_resolution = kSegmentResolution / 10.0) {
  WorldExecution ex;
  ex.world = s;
  ex.prior = s < t.prior.size() ? t.prior[s] : 0.0;
  if (t.nodes.empty()) {
    ex.violation = "empty tree";
    return ex;
  }
  const WorldSet self = WorldSet::single(s);
  std::uint32_t cur = 0;
  ex.visited.push_back(cur);
  while (t.nodes[cur].kind != TreeNodeKind::Leaf) {
    const PathTreeNode& n = t.nodes[cur];
    std::optional<std::uint32_t> next;
    if (n.kind == TreeNodeKind::Branching) {
      ++ex.branchings;
      for (std::uint32_t c : n.children)
        if (t.nodes[c].outcome && t.nodes[c].outcome->contains(s)) next = c;
    } else if (!n.children.empty()) {
      next = n.children.front();
    }
    if (!next) {
      ex.violation = "no outcome at node " + std::to_string(cur) + " contains world " + std::to_string(s);
      return ex;
    }
    const PathTreeNode& c = t.nodes[*next];
    if (n.kind != TreeNodeKind::Branching) {
      if (!self.subset_of(transition_check_sampled(sc, n.config, c.config, check_resolution))) ex.safe = false;
    }
    ex.cost += c.cost_from_parent;
    cur = *next;
    ex.visited.push_back(cur);
  }
  ex.reached_goal = goal_check(sc, t.nodes[cur].config).contains(s);
  return ex;
}

/// Simulates every listed world (all hypotheses when `worlds` is empty).
inline SimulationReport simulate(const PathTree& t, const Scenario& sc, std::vector<std::size_t> worlds = {}) {
  if (worlds.empty())
    for (std::size_t s = 0; s < sc.hypothesis_count(); ++s) worlds.push_back(s);
  SimulationReport rep;
  for (std::size_t s : worlds) {
    WorldExecution ex = simulate_world(t, sc, s);
    if (ex.prior > 0.0) {
      rep.all_reached = rep.all_reached && ex.reached_goal && !ex.violation;
      rep.all_safe = rep.all_safe && ex.safe;
    }
    rep.weighted_cost += ex.prior * ex.cost;
    rep.worlds.push_back(std::move(ex));
  }
  return rep;
}

}  // namespace pto
