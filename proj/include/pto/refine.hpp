#pragma once

// Piecewise partial-shortcut smoothing. Path pieces between branchings are
// smoothed independently; branching configurations never move.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "pto/path_tree.hpp"
#include "pto/scenario.hpp"

namespace pto {

inline constexpr std::size_t kDefaultRefineIterations = 200;

namespace detail {

struct PathPoint {
  Config point;
  std::size_t segment;  // index of the segment [segment, segment + 1]
};

inline PathPoint point_at(const std::vector<Config>& path, const std::vector<double>& cumulative, double t) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), t);
  std::size_t seg = it == cumulative.begin() ? 0 : static_cast<std::size_t>(it - cumulative.begin()) - 1;
  seg = std::min(seg, path.size() - 2);
  const double len = cumulative[seg + 1] - cumulative[seg];
  const double u = len > 0.0 ? std::clamp((t - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
  return {lerp(path[seg], path[seg + 1], u), seg};
}

}  // namespace detail

/// Partial shortcut over one piece. Each round picks two points along the
/// path and a nonempty subset of coordinates, re-interpolates those
/// coordinates linearly between the two points and keeps the result iff
/// every new segment is valid in all worlds of `validity` and the length
/// strictly decreases. Endpoints never move.
template <typename Check, typename Rng>
std::vector<Config> partial_shortcut(std::vector<Config> path, WorldSet validity, std::size_t iterations, Rng& rng,
                                     Check&& check) {
  constexpr double kMinGain = 1e-9;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<unsigned> dims_pick(1, (1U << kDim) - 1);
  for (std::size_t it = 0; it < iterations; ++it) {
    if (path.size() < 3) break;
    std::vector<double> cum(path.size(), 0.0);
    for (std::size_t i = 1; i < path.size(); ++i) cum[i] = cum[i - 1] + distance(path[i - 1], path[i]);
    const double total = cum.back();
    double t1 = unit(rng) * total;
    double t2 = unit(rng) * total;
    const unsigned dims = dims_pick(rng);
    if (t1 > t2) std::swap(t1, t2);
    const detail::PathPoint a = detail::point_at(path, cum, t1);
    const detail::PathPoint b = detail::point_at(path, cum, t2);
    if (a.segment == b.segment) continue;

    std::vector<Config> middle;
    middle.push_back(a.point);
    const bool all = dims == (1U << kDim) - 1;
    if (!all) {
      for (std::size_t j = a.segment + 1; j <= b.segment; ++j) {
        Config q = path[j];
        const double s = (cum[j] - t1) / (t2 - t1);
        const Config line = lerp(a.point, b.point, s);
        for (std::size_t d = 0; d < kDim; ++d)
          if ((dims >> d) & 1U) q[d] = line[d];
        middle.push_back(q);
      }
    }
    middle.push_back(b.point);

    const double old_len = t2 - t1;
    const double new_len = path_length(middle);
    if (!(new_len < old_len - kMinGain)) continue;
    bool ok = true;
    for (std::size_t i = 1; i < middle.size() && ok; ++i) ok = validity.subset_of(check(middle[i - 1], middle[i]));
    if (!ok) continue;

    std::vector<Config> next(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(a.segment) + 1);
    for (const Config& q : middle)
      if (next.back() != q) next.push_back(q);
    for (std::size_t j = b.segment + 1; j < path.size(); ++j)
      if (next.back() != path[j]) next.push_back(path[j]);
    path = std::move(next);
  }
  return path;
}

template <typename Rng>
std::vector<Config> partial_shortcut(const Scenario& sc, std::vector<Config> path, WorldSet validity,
                                     std::size_t iterations, Rng& rng) {
  return partial_shortcut(std::move(path), validity, iterations, rng,
                          [&](Config p, Config q) { return transition_check(sc, p, q); });
}

/// Smooths every maximal branch-free piece of the tree. Piece i uses a
/// generator seeded from (seed, i) in depth-first piece order.
inline PathTree refine_tree(const PathTree& tree, const Scenario& sc, std::size_t iterations, std::uint64_t seed) {
  if (tree.nodes.empty()) return tree;
  PathTree out;
  out.prior = tree.prior;
  out.algorithm = tree.algorithm;
  std::size_t piece_index = 0;

  struct Pending {
    std::uint32_t old_start;
    std::int32_t new_parent;
  };
  std::vector<Pending> stack{{0, -1}};
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    // Collect the piece: motion nodes up to the next branching node or leaf.
    std::vector<std::uint32_t> chain{p.old_start};
    while (tree.nodes[chain.back()].kind == TreeNodeKind::Motion) chain.push_back(tree.nodes[chain.back()].children[0]);
    const PathTreeNode& first = tree.nodes[chain.front()];
    const PathTreeNode& last = tree.nodes[chain.back()];

    std::vector<Config> configs;
    for (std::uint32_t id : chain) configs.push_back(tree.nodes[id].config);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(piece_index)};
    std::mt19937_64 rng(seq);
    ++piece_index;
    if (configs.size() >= 3) configs = partial_shortcut(sc, std::move(configs), first.support, iterations, rng);
    if (configs.size() < 2 && chain.size() >= 2) configs = {first.config, last.config};

    std::int32_t parent = p.new_parent;
    for (std::size_t i = 0; i < configs.size(); ++i) {
      const bool is_first = i == 0;
      const bool is_last = i + 1 == configs.size();
      PathTreeNode n;
      if (is_first) {
        n = first;
      } else if (is_last) {
        n = last;
      } else {
        n.belief = first.belief;
        n.support = first.support;
        n.kind = TreeNodeKind::Motion;
      }
      n.config = configs[i];
      n.children.clear();
      n.parent = parent;
      if (is_first) {
        n.cost_from_parent = first.cost_from_parent;
      } else {
        n.cost_from_parent = distance(configs[i - 1], configs[i]);
        n.probability = 1.0;
        n.outcome.reset();
      }
      if (is_first && !is_last) n.kind = TreeNodeKind::Motion;
      if (is_last) n.kind = last.kind;
      parent = static_cast<std::int32_t>(out.add(std::move(n)));
    }
    if (last.kind == TreeNodeKind::Branching) {
      for (auto it = last.children.rbegin(); it != last.children.rend(); ++it) stack.push_back({*it, parent});
    }
  }
  out.expected_cost = path_tree_expected_cost(out);
  return out;
}

}  // namespace pto
