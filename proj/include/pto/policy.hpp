#pragma once

// Expected cost-to-goal over a belief graph and optimal path-tree
// extraction. Action edges relax like Dijkstra; an observation group
// relaxes its parent with the probability-weighted sum of its children.

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "pto/belief_graph.hpp"
#include "pto/path_tree.hpp"

namespace pto {

/// Expected cost-to-goal per belief-node; nullopt means unreachable.
using CostMap = std::vector<std::optional<double>>;

class PlanningError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Value of an observation group, or nullopt if some child is unreachable.
inline std::optional<double> group_value(const ObservationGroup& g, const CostMap& c) {
  double sum = 0.0;
  for (const ObservationChild& ch : g.children) {
    if (!c[ch.node]) return std::nullopt;
    sum += ch.probability * *c[ch.node];
  }
  return sum;
}

inline CostMap compute_expected_cost_to_goal(const BeliefGraph& bg) {
  CostMap cost(bg.size());
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (std::uint32_t i = 0; i < bg.size(); ++i) {
    if (is_final(bg.node(i))) {
      cost[i] = 0.0;
      queue.push({0.0, i});
    }
  }
  const auto relax = [&](std::uint32_t u, double c) {
    if (!cost[u] || c < *cost[u]) {
      cost[u] = c;
      queue.push({c, u});
    }
  };
  while (!queue.empty()) {
    const auto [c, v] = queue.top();
    queue.pop();
    if (c > *cost[v]) continue;  // stale
    bg.for_each_action(v, [&](std::uint32_t to, double w) { relax(to, w + c); });
    for (const auto& [u, gi] : bg.observation_parents(v))
      if (const auto gv = group_value(bg.observations(u)[gi], cost)) relax(u, *gv);
  }
  return cost;
}

/// Largest deviation from the Bellman equation over reachable nodes.
inline double bellman_residual(const BeliefGraph& bg, const CostMap& cost) {
  double worst = 0.0;
  for (std::uint32_t u = 0; u < bg.size(); ++u) {
    if (!cost[u]) continue;
    double best = is_final(bg.node(u)) ? 0.0 : std::numeric_limits<double>::infinity();
    bg.for_each_action(u, [&](std::uint32_t to, double w) {
      if (cost[to]) best = std::min(best, w + *cost[to]);
    });
    for (const ObservationGroup& g : bg.observations(u))
      if (const auto gv = group_value(g, cost)) best = std::min(best, *gv);
    worst = std::max(worst, std::abs(best - *cost[u]));
  }
  return worst;
}

/// The option a node's value comes from.
struct PolicyChoice {
  enum class Kind { Final, Action, Observation } kind = Kind::Final;
  std::uint32_t target = 0;  // action: next node; observation: group index
  double edge_cost = 0.0;    // action only
};

/// Minimizing option at `u`; ties prefer actions, then lowest id / index.
inline PolicyChoice best_choice(const BeliefGraph& bg, const CostMap& cost, std::uint32_t u) {
  if (is_final(bg.node(u))) return {};
  std::optional<PolicyChoice> best;
  double best_v = std::numeric_limits<double>::infinity();
  bg.for_each_action(u, [&](std::uint32_t to, double w) {
    if (!cost[to]) return;
    const double v = w + *cost[to];
    if (v < best_v || (v == best_v && best && to < best->target)) {
      best_v = v;
      best = PolicyChoice{PolicyChoice::Kind::Action, to, w};
    }
  });
  const auto& groups = bg.observations(u);
  for (std::uint32_t gi = 0; gi < groups.size(); ++gi) {
    const auto gv = group_value(groups[gi], cost);
    if (gv && *gv < best_v) {
      best_v = *gv;
      best = PolicyChoice{PolicyChoice::Kind::Observation, gi, 0.0};
    }
  }
  if (!best) throw PlanningError("node has no finite option");
  return *best;
}

/// Builds the optimal path-tree rooted at `root` by recursively following
/// the minimizing option (all outcomes at an observation). Tree nodes are
/// stored parents-first.
inline PathTree extract_path_tree(const BeliefGraph& bg, const CostMap& cost, std::uint32_t root,
                                  const std::vector<double>& prior) {
  if (!cost[root]) throw PlanningError("no complete path-tree: root cost-to-goal is infinite");
  PathTree tree;
  tree.prior = prior;
  struct Frame {
    std::uint32_t node;
    std::int32_t parent;
    double cost_from_parent;
    double probability;
    std::optional<WorldSet> outcome;
    std::vector<std::uint32_t> path;  // belief-nodes on the current branch
  };
  std::vector<Frame> stack;
  stack.push_back({root, -1, 0.0, 1.0, std::nullopt, {}});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (std::find(f.path.begin(), f.path.end(), f.node) != f.path.end())
      throw PlanningError("cycle while extracting path-tree");
    f.path.push_back(f.node);
    const BeliefNode& bn = bg.node(f.node);
    PathTreeNode tn;
    tn.config = bn.config;
    tn.belief = bn.belief;
    tn.support = bn.support;
    tn.parent = f.parent;
    tn.cost_from_parent = f.cost_from_parent;
    tn.probability = f.probability;
    tn.outcome = f.outcome;
    const PolicyChoice choice = best_choice(bg, cost, f.node);
    switch (choice.kind) {
      case PolicyChoice::Kind::Final: {
        tn.kind = TreeNodeKind::Leaf;
        tn.goal_worlds = bn.goal_worlds;
        tree.add(std::move(tn));
        break;
      }
      case PolicyChoice::Kind::Action: {
        tn.kind = TreeNodeKind::Motion;
        const auto id = static_cast<std::int32_t>(tree.add(std::move(tn)));
        stack.push_back({choice.target, id, choice.edge_cost, 1.0, std::nullopt,
                         std::move(f.path)});
        break;
      }
      case PolicyChoice::Kind::Observation: {
        const ObservationGroup& g = bg.observations(f.node)[choice.target];
        tn.kind = TreeNodeKind::Branching;
        tn.observed_factor = g.factor;
        const auto id = static_cast<std::int32_t>(tree.add(std::move(tn)));
        // Reverse push so outcomes are emitted in group order.
        for (auto it = g.children.rbegin(); it != g.children.rend(); ++it)
          stack.push_back({it->node, id, 0.0, it->probability, it->outcome, f.path});
        break;
      }
    }
  }
  tree.expected_cost = path_tree_expected_cost(tree);
  return tree;
}

}  // namespace pto
