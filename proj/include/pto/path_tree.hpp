#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pto/belief.hpp"
#include "pto/geometry.hpp"
#include "pto/scenario.hpp"
#include "pto/world_set.hpp"

namespace pto {

enum class TreeNodeKind { Motion, Branching, Leaf };

inline const char* to_string(TreeNodeKind k) {
  switch (k) {
    case TreeNodeKind::Motion: return "motion";
    case TreeNodeKind::Branching: return "branching";
    case TreeNodeKind::Leaf: return "leaf";
  }
  return "?";
}

/// One node of a path-tree. The edge from the parent is either a motion
/// (cost > 0 or zero-length, probability 1) or an observation outcome
/// (same configuration, zero cost, branching probability, outcome set).
struct PathTreeNode {
  Config config;
  BeliefId belief = 0;
  WorldSet support;
  TreeNodeKind kind = TreeNodeKind::Motion;
  std::int32_t parent = -1;
  std::vector<std::uint32_t> children;
  double cost_from_parent = 0.0;
  double probability = 1.0;
  /// Set on children of a branching node.
  std::optional<WorldSet> outcome;
  /// Branching nodes: the observed factor.
  std::optional<std::uint32_t> observed_factor;
  /// Leaves: worlds in which the goal holds.
  WorldSet goal_worlds;
};

struct PathTree {
  std::vector<PathTreeNode> nodes;
  double expected_cost = 0.0;
  /// Initial belief over hypotheses.
  std::vector<double> prior;
  std::string algorithm = "pto";

  bool empty() const { return nodes.empty(); }

  std::uint32_t add(PathTreeNode n) {
    const auto id = static_cast<std::uint32_t>(nodes.size());
    if (n.parent >= 0) nodes[static_cast<std::size_t>(n.parent)].children.push_back(id);
    nodes.push_back(std::move(n));
    return id;
  }

  std::size_t branching_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.kind == TreeNodeKind::Branching;
    return c;
  }

  std::vector<Config> branching_configs() const {
    std::vector<Config> out;
    for (const auto& n : nodes)
      if (n.kind == TreeNodeKind::Branching) out.push_back(n.config);
    return out;
  }
};

/// Sum over edges of motion cost times the probability of reaching the
/// child (product of branching probabilities from the root).
inline double path_tree_expected_cost(const PathTree& t) {
  if (t.nodes.empty()) return 0.0;
  std::vector<double> reach(t.nodes.size(), 0.0);
  reach[0] = 1.0;
  double total = 0.0;
  // Parents always precede children in storage order.
  for (std::size_t i = 1; i < t.nodes.size(); ++i) {
    const PathTreeNode& n = t.nodes[i];
    reach[i] = reach[static_cast<std::size_t>(n.parent)] * n.probability;
    total += n.cost_from_parent * reach[i];
  }
  return total;
}

/// Checks the structural and semantic invariants of a path-tree against a
/// scenario; returns a description of the first violation.
inline std::optional<std::string> validate_path_tree(const PathTree& t, const Scenario& sc) {
  if (t.nodes.empty()) return "empty tree";
  const std::size_t h = sc.hypothesis_count();
  if (t.prior.size() != h) return "prior size does not match hypothesis count";
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const PathTreeNode& n = t.nodes[i];
    if (i == 0 && n.parent != -1) return "root has a parent";
    if (i > 0 && (n.parent < 0 || static_cast<std::size_t>(n.parent) >= i)) return "parent must precede child";
    if (i > 0) {
      const PathTreeNode& p = t.nodes[static_cast<std::size_t>(n.parent)];
      if (!n.support.subset_of(p.support)) return "belief support grows along a branch";
      if (p.kind == TreeNodeKind::Branching) {
        if (!n.outcome || n.config != p.config) return "branching child must be an outcome at the same configuration";
        if (n.support != (p.support & *n.outcome)) return "outcome child support mismatch";
      } else {
        if (n.support != p.support) return "motion changes belief support";
        if (!n.support.subset_of(transition_check(sc, p.config, n.config)))
          return "motion " + std::to_string(n.parent) + "->" + std::to_string(i) + " invalid in a supported world";
      }
    }
    switch (n.kind) {
      case TreeNodeKind::Leaf:
        if (!n.children.empty()) return "leaf with children";
        if (!n.support.subset_of(goal_check(sc, n.config))) return "leaf outside the goal in a supported world";
        break;
      case TreeNodeKind::Motion:
        if (n.children.size() != 1) return "motion node must have exactly one child";
        break;
      case TreeNodeKind::Branching: {
        if (n.children.size() < 2) return "branching node needs at least two outcomes";
        WorldSet uni;
        for (std::uint32_t c : n.children) {
          const WorldSet cs = t.nodes[c].support;
          if (uni.intersects(cs)) return "branching outcomes overlap";
          uni |= cs;
        }
        if (uni != n.support) return "branching outcomes do not partition the support";
        break;
      }
    }
  }
  // Every world of positive prior reaches a goal leaf on its own branch.
  for (std::size_t s = 0; s < h; ++s) {
    if (!(t.prior[s] > 0.0)) continue;
    std::uint32_t cur = 0;
    if (!t.nodes[0].support.contains(s)) return "root support misses a world of positive prior";
    while (t.nodes[cur].kind != TreeNodeKind::Leaf) {
      const PathTreeNode& n = t.nodes[cur];
      std::optional<std::uint32_t> next;
      for (std::uint32_t c : n.children)
        if (t.nodes[c].support.contains(s)) next = c;
      if (!next) return "no branch consistent with world " + std::to_string(s);
      cur = *next;
    }
    if (!goal_check(sc, t.nodes[cur].config).contains(s)) return "world " + std::to_string(s) + " misses the goal";
  }
  return std::nullopt;
}

}  // namespace pto
