#pragma once

// Single-query RRT* restricted to motions valid in every world of a fixed
// world set. Used by the branch-and-bound baseline for each path piece.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "pto/rrg.hpp"

namespace pto {

struct RrtStarParams {
  std::size_t iterations = 1000;
  std::optional<double> steer_eta;
  std::optional<double> gamma;
  double goal_bias = 0.05;
  std::uint64_t seed = 0;
};

struct RrtStarResult {
  bool success = false;
  std::vector<Config> path;
  double cost = 0.0;
  std::size_t tree_size = 0;
};

/// Plans from `from` to any configuration accepted by `is_goal`; goal-biased
/// samples are drawn from `sample_region`. Every motion on the returned path
/// is valid in all worlds of `world_filter`.
template <typename GoalTest>
RrtStarResult rrt_star_plan(Oracle& oracle, Config from, const GoalRegion& sample_region, GoalTest&& is_goal,
                            WorldSet world_filter, const RrtStarParams& params) {
  const Scenario& sc = oracle.scenario();
  RrgParams rp;
  rp.steer_eta = params.steer_eta;
  rp.gamma = params.gamma;
  rp.goal_bias = params.goal_bias;
  rp.max_iterations = params.iterations;
  rp = resolve_params(sc, rp);
  const double eta = *rp.steer_eta;
  const double gamma = *rp.gamma;

  RrtStarResult result;
  if (!world_filter.subset_of(oracle.state_check(from))) return result;

  struct Node {
    Config config;
    std::int32_t parent;
    double cost;
    std::vector<std::uint32_t> children;
  };
  std::vector<Node> tree{{from, -1, 0.0, {}}};
  NodeIndex index(sc.bounds, eta);
  index.insert(from);
  std::vector<std::uint32_t> goals;
  if (is_goal(from)) goals.push_back(0);

  Sampler sampler(params.seed);
  const auto any = [](NodeId) { return true; };
  const auto valid = [&](Config a, Config b) { return world_filter.subset_of(oracle.transition_check(a, b)); };

  for (std::size_t it = 0; it < params.iterations; ++it) {
    Config q_rand;
    if (params.goal_bias > 0.0 && sampler.uniform() < params.goal_bias) {
      q_rand = sample_region.sample(sampler.engine());
    } else {
      const double x = sc.bounds.min.x + sampler.uniform() * sc.bounds.width();
      const double y = sc.bounds.min.y + sampler.uniform() * sc.bounds.height();
      q_rand = {x, y};
    }
    const NodeId q_near = *index.nearest(q_rand, any);
    const Config q_new = steer(tree[q_near].config, q_rand, eta);
    if (!world_filter.subset_of(oracle.state_check(q_new))) continue;

    const double r = near_radius(tree.size(), gamma, eta);
    std::vector<NodeId> near = index.within(q_new, r, any);
    if (!std::binary_search(near.begin(), near.end(), q_near))
      near.insert(std::lower_bound(near.begin(), near.end(), q_near), q_near);

    std::vector<char> ok(near.size(), 0);
    std::optional<NodeId> parent;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < near.size(); ++i) {
      ok[i] = valid(tree[near[i]].config, q_new);
      if (!ok[i]) continue;
      const double c = tree[near[i]].cost + distance(tree[near[i]].config, q_new);
      if (c < best) {
        best = c;
        parent = near[i];
      }
    }
    if (!parent) continue;
    const auto id = static_cast<std::uint32_t>(tree.size());
    tree.push_back({q_new, static_cast<std::int32_t>(*parent), best, {}});
    tree[*parent].children.push_back(id);
    index.insert(q_new);
    if (is_goal(q_new)) goals.push_back(id);

    // Rewire neighbors through the new node.
    for (std::size_t i = 0; i < near.size(); ++i) {
      const NodeId n = near[i];
      if (!ok[i] || static_cast<std::int32_t>(n) == tree[id].parent) continue;
      const double c = tree[id].cost + distance(q_new, tree[n].config);
      if (!(c < tree[n].cost)) continue;
      auto& siblings = tree[static_cast<std::size_t>(tree[n].parent)].children;
      siblings.erase(std::find(siblings.begin(), siblings.end(), n));
      tree[n].parent = static_cast<std::int32_t>(id);
      tree[id].children.push_back(n);
      const double delta = tree[n].cost - c;
      std::vector<std::uint32_t> stack{n};
      while (!stack.empty()) {
        const std::uint32_t k = stack.back();
        stack.pop_back();
        tree[k].cost -= delta;
        for (std::uint32_t ch : tree[k].children) stack.push_back(ch);
      }
    }
  }

  result.tree_size = tree.size();
  if (goals.empty()) return result;
  std::uint32_t best_goal = goals.front();
  for (std::uint32_t g : goals)
    if (tree[g].cost < tree[best_goal].cost) best_goal = g;
  for (std::int32_t k = static_cast<std::int32_t>(best_goal); k >= 0; k = tree[static_cast<std::size_t>(k)].parent)
    result.path.push_back(tree[static_cast<std::size_t>(k)].config);
  std::reverse(result.path.begin(), result.path.end());
  result.cost = path_length(result.path);
  result.success = true;
  return result;
}

/// Plans to a goal region.
inline RrtStarResult rrt_star_plan(Oracle& oracle, Config from, const GoalRegion& to, WorldSet world_filter,
                                   const RrtStarParams& params) {
  return rrt_star_plan(oracle, from, to, [&](Config q) { return to.contains(q); }, world_filter, params);
}

}  // namespace pto
