#pragma once

// Comparison baseline for exclusive-location scenarios: depth-first
// branch-and-bound over the order in which locations are visited. Each
// search node plans two pieces with RRT* (to a viewpoint of the location,
// then from there to the fetch goal) and the best complete order becomes a
// path-tree.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "pto/belief.hpp"
#include "pto/path_tree.hpp"
#include "pto/rrt_star.hpp"

namespace pto {

struct BaselineParams {
  RrtStarParams rrt;
  /// Boundary samples per observation zone when choosing a viewpoint.
  std::size_t viewpoint_samples = 36;
  /// Viewpoints sit this far inside the zone boundary.
  double viewpoint_margin = 0.2;
  /// Radius of the arrival region around a viewpoint.
  double viewpoint_tolerance = 0.15;
};

struct BaselineResult {
  bool success = false;
  PathTree tree;
  std::uint64_t collision_checks = 0;
  std::size_t search_nodes = 0;
  std::size_t pieces_planned = 0;
  std::size_t pruned = 0;
};

/// Viewpoint for `factor` when starting from `from`: `from` itself if the
/// factor is already visible, else the boundary sample of the zone (shrunk
/// by `margin`) closest to `from` that is valid in `worlds` and sees the
/// factor.
inline std::optional<Config> choose_viewpoint(Oracle& oracle, std::size_t factor, Config from, WorldSet worlds,
                                              std::size_t samples, double margin) {
  const Scenario& sc = oracle.scenario();
  if (visible(sc, from, factor) && worlds.subset_of(oracle.state_check(from))) return from;
  const Disc& zone = sc.factors[factor].zone;
  const double r = std::max(zone.radius - margin, 0.5 * zone.radius);
  std::optional<Config> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double a = 2.0 * M_PI * static_cast<double>(i) / static_cast<double>(samples);
    const Config q{zone.center.x + r * std::cos(a), zone.center.y + r * std::sin(a)};
    if (!visible(sc, q, factor) || !worlds.subset_of(oracle.state_check(q))) continue;
    const double d = distance(from, q);
    if (d < best_d) {
      best_d = d;
      best = q;
    }
  }
  return best;
}

namespace detail {

struct BaselineStep {
  std::size_t location = 0;
  WorldSet support;  // before observing
  double probability = 1.0;  // object at `location` given support
  std::vector<Config> observe;
  std::vector<Config> fetch;
};

class BranchAndBound {
 public:
  BranchAndBound(const Scenario& sc, const BaselineParams& params)
      : sc_(sc), params_(params), oracle_(sc), prior_(sc.prior()) {}

  BaselineResult run() {
    BaselineResult res;
    std::vector<BaselineStep> steps;
    search(sc_.start, sc_.all_worlds(), 1.0, 0.0, steps);
    res.collision_checks = oracle_.collision_checks();
    res.search_nodes = search_nodes_;
    res.pieces_planned = pieces_planned_;
    res.pruned = pruned_;
    if (!best_) return res;
    res.tree = assemble(*best_);
    res.success = true;
    return res;
  }

 private:
  // Pieces are memoized on (kind, start, location, world filter); identical
  // subproblems recur across visit orders. The RRT* seed depends only on
  // the key so results do not depend on search order. Observation pieces
  // are planned valid in every world, which is no stronger than validity
  // under the remaining support here since locations carry no geometry.
  using PieceKey = std::tuple<int, std::uint64_t, std::uint64_t, std::size_t, std::uint64_t>;

  static PieceKey key(int kind, Config x, std::size_t loc, WorldSet worlds) {
    return {kind, std::bit_cast<std::uint64_t>(x.x), std::bit_cast<std::uint64_t>(x.y), loc, worlds.mask()};
  }

  RrtStarParams piece_params(const PieceKey& k) const {
    std::uint64_t h = params_.rrt.seed;
    for (std::uint64_t v : {std::uint64_t(std::get<0>(k)), std::get<1>(k), std::get<2>(k), std::uint64_t(std::get<3>(k)),
                            std::get<4>(k)}) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    RrtStarParams p = params_.rrt;
    p.seed = h;
    return p;
  }

  const std::optional<Config>& viewpoint(Config x, std::size_t loc, WorldSet remaining) {
    const auto k = key(0, x, loc, remaining);
    auto it = viewpoints_.find(k);
    if (it == viewpoints_.end())
      it = viewpoints_.emplace(k, choose_viewpoint(oracle_, loc, x, remaining, params_.viewpoint_samples,
                                                   params_.viewpoint_margin))
               .first;
    return it->second;
  }

  const std::optional<std::vector<Config>>& observe_piece(Config x, Config vp, std::size_t loc, WorldSet remaining) {
    const auto k = key(1, x, loc, remaining);
    auto it = pieces_.find(k);
    if (it != pieces_.end()) return it->second;
    std::optional<std::vector<Config>> path;
    if (vp == x) {
      path = std::vector<Config>{x};
    } else {
      ++pieces_planned_;
      const GoalRegion arrive = Disc{vp, params_.viewpoint_tolerance};
      const auto sees = [&](Config q) { return arrive.contains(q) && visible(sc_, q, loc); };
      RrtStarResult r = rrt_star_plan(oracle_, x, arrive, sees, remaining, piece_params(k));
      if (r.success) {
        // Finish exactly at the viewpoint when the last step allows it.
        if (r.path.back() != vp && remaining.subset_of(oracle_.transition_check(r.path.back(), vp)))
          r.path.push_back(vp);
        path = std::move(r.path);
      }
    }
    return pieces_.emplace(k, std::move(path)).first->second;
  }

  const std::optional<std::vector<Config>>& fetch_piece(Config x, std::size_t loc) {
    const auto k = key(2, x, loc, WorldSet::single(loc));
    auto it = pieces_.find(k);
    if (it != pieces_.end()) return it->second;
    const GoalRegion* region = nullptr;
    for (const GoalSpec& g : sc_.goals)
      if (!region && g.worlds.contains(loc)) region = &g.region;
    ++pieces_planned_;
    const auto fetched = [&](Config q) { return goal_check(sc_, q).contains(loc); };
    RrtStarResult r = rrt_star_plan(oracle_, x, *region, fetched, WorldSet::single(loc), piece_params(k));
    std::optional<std::vector<Config>> path;
    if (r.success) path = std::move(r.path);
    return pieces_.emplace(k, std::move(path)).first->second;
  }

  double mass(WorldSet w) const {
    double m = 0.0;
    w.for_each([&](std::size_t s) { m += prior_[s]; });
    return m;
  }

  void search(Config x, WorldSet remaining, double reach, double partial, std::vector<BaselineStep>& steps) {
    ++search_nodes_;
    struct Child {
      BaselineStep step;
      double partial;
    };
    std::vector<Child> children;
    for (std::size_t loc : remaining.members()) {
      const std::optional<Config> vp = viewpoint(x, loc, sc_.all_worlds());
      if (!vp) continue;
      const auto& obs = observe_piece(x, *vp, loc, sc_.all_worlds());
      if (!obs) continue;
      const auto& fetch = fetch_piece(obs->back(), loc);
      if (!fetch) continue;
      BaselineStep st;
      st.location = loc;
      st.support = remaining;
      st.probability = prior_[loc] / mass(remaining);
      st.observe = *obs;
      st.fetch = *fetch;
      const double c = partial + reach * (path_length(st.observe) + st.probability * path_length(st.fetch));
      children.push_back({std::move(st), c});
    }
    std::stable_sort(children.begin(), children.end(),
                     [](const Child& a, const Child& b) { return a.partial < b.partial; });
    for (Child& ch : children) {
      if (ch.partial >= best_cost_) {
        ++pruned_;
        continue;
      }
      const WorldSet rest = remaining.minus(WorldSet::single(ch.step.location));
      const double p = ch.step.probability;
      const Config next = ch.step.observe.back();
      steps.push_back(std::move(ch.step));
      if (rest.empty()) {
        best_cost_ = ch.partial;
        best_ = steps;
      } else {
        search(next, rest, reach * (1.0 - p), ch.partial, steps);
      }
      steps.pop_back();
    }
  }

  PathTree assemble(const std::vector<BaselineStep>& steps) {
    BeliefRegistry registry(prior_);
    PathTree tree;
    tree.prior = prior_;
    tree.algorithm = "bnb-rrtstar";
    PathTreeNode root;
    root.config = sc_.start;
    root.support = sc_.all_worlds();
    root.belief = registry.intern(root.support);
    std::uint32_t cur = tree.add(root);

    const auto extend = [&](std::uint32_t from, const std::vector<Config>& path) {
      std::uint32_t at = from;
      for (std::size_t i = 1; i < path.size(); ++i) {
        PathTreeNode n;
        n.config = path[i];
        n.support = tree.nodes[at].support;
        n.belief = tree.nodes[at].belief;
        n.parent = static_cast<std::int32_t>(at);
        n.cost_from_parent = distance(path[i - 1], path[i]);
        at = tree.add(n);
      }
      return at;
    };
    const auto make_leaf = [&](std::uint32_t id) {
      tree.nodes[id].kind = TreeNodeKind::Leaf;
      tree.nodes[id].goal_worlds = goal_check(sc_, tree.nodes[id].config);
    };

    for (const BaselineStep& st : steps) {
      cur = extend(cur, st.observe);
      if (st.support.count() == 1) {
        make_leaf(extend(cur, st.fetch));
        break;
      }
      PathTreeNode& b = tree.nodes[cur];
      b.kind = TreeNodeKind::Branching;
      b.observed_factor = static_cast<std::uint32_t>(st.location);
      const WorldSet present = WorldSet::single(st.location);
      const Config at = b.config;
      const auto outcome = [&](WorldSet o, double p) {
        PathTreeNode n;
        n.config = at;
        n.support = st.support & o;
        n.belief = registry.intern(n.support);
        n.parent = static_cast<std::int32_t>(cur);
        n.probability = p;
        n.outcome = o;
        return tree.add(n);
      };
      const std::uint32_t found = outcome(present, st.probability);
      const std::uint32_t missing = outcome(sc_.all_worlds().minus(present), 1.0 - st.probability);
      make_leaf(extend(found, st.fetch));
      cur = missing;
    }
    tree.expected_cost = path_tree_expected_cost(tree);
    return tree;
  }

  const Scenario& sc_;
  BaselineParams params_;
  Oracle oracle_;
  std::vector<double> prior_;
  std::optional<std::vector<BaselineStep>> best_;
  double best_cost_ = std::numeric_limits<double>::infinity();
  std::size_t search_nodes_ = 0;
  std::size_t pieces_planned_ = 0;
  std::map<PieceKey, std::optional<Config>> viewpoints_;
  std::map<PieceKey, std::optional<std::vector<Config>>> pieces_;
  std::size_t pruned_ = 0;
};

}  // namespace detail

/// Branch-and-bound over visit orders with per-piece RRT*.
inline BaselineResult bnb_tamp_plan(const Scenario& sc, const BaselineParams& params) {
  if (sc.mode != ScenarioMode::ExclusiveLocations)
    throw std::invalid_argument("the baseline requires an exclusive-location scenario");
  return detail::BranchAndBound(sc, params).run();
}

}  // namespace pto
