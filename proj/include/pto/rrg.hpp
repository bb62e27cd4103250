#pragma once

// World-annotated rapidly-exploring random graph. Nodes carry the worlds
// where they are valid and where they satisfy the goal; edges carry the
// worlds in which the motion is valid. Growth continues until every world
// has a goal node reachable from the root inside that world.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "pto/geometry.hpp"
#include "pto/scenario.hpp"
#include "pto/world_set.hpp"

namespace pto {

using NodeId = std::uint32_t;

struct RrgParams {
  /// Maximum extension length; defaults to 5% of the bounds diagonal.
  std::optional<double> steer_eta;
  /// Adaptive-radius constant; defaults to the asymptotic-optimality bound.
  std::optional<double> gamma;
  std::size_t min_iterations = 0;
  std::size_t max_iterations = 50000;
  double goal_bias = 0.05;
  std::uint64_t seed = 0;
};

/// Fills defaults and validates.
inline RrgParams resolve_params(const Scenario& sc, RrgParams p) {
  if (!p.steer_eta) p.steer_eta = 0.05 * sc.bounds.diagonal();
  if (!p.gamma) {
    constexpr double d = static_cast<double>(kDim);
    const double unit_ball = M_PI;  // measure of the unit disc
    p.gamma = 2.0 * std::pow(1.0 + 1.0 / d, 1.0 / d) * std::pow(sc.bounds.area() / unit_ball, 1.0 / d);
  }
  if (!(*p.steer_eta > 0.0)) throw std::invalid_argument("steer_eta must be > 0");
  if (!(*p.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(p.goal_bias >= 0.0 && p.goal_bias < 1.0)) throw std::invalid_argument("goal_bias must lie in [0, 1)");
  if (p.min_iterations > p.max_iterations) throw std::invalid_argument("min_iterations > max_iterations");
  return p;
}

struct RrgNode {
  Config config;
  WorldSet goal_worlds;
  WorldSet valid_worlds;
};

struct RrgEdge {
  NodeId u = 0;
  NodeId v = 0;
  WorldSet worlds;
  double cost = 0.0;
};

struct RRGraph {
  std::vector<RrgNode> nodes;
  std::vector<RrgEdge> edges;
  /// Edge ids incident to each node.
  std::vector<std::vector<std::uint32_t>> adjacency;
  NodeId root = 0;
  std::size_t hypotheses = 1;

  NodeId add_node(const RrgNode& n) {
    nodes.push_back(n);
    adjacency.emplace_back();
    return static_cast<NodeId>(nodes.size() - 1);
  }
  void add_edge(NodeId u, NodeId v, WorldSet w) {
    const auto id = static_cast<std::uint32_t>(edges.size());
    edges.push_back({u, v, w, distance(nodes[u].config, nodes[v].config)});
    adjacency[u].push_back(id);
    adjacency[v].push_back(id);
  }
  NodeId other(const RrgEdge& e, NodeId n) const { return e.u == n ? e.v : e.u; }
};

// ---------------------------------------------------------------------------
// Sampling

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  /// Uniform over the bounds; with probability `goal_bias`, uniform inside
  /// the goal region of a uniformly chosen hypothesis.
  Config sample_state(const Scenario& sc, double goal_bias) {
    if (goal_bias > 0.0 && unit_(rng_) < goal_bias) {
      const std::size_t s = sample_world(sc.hypothesis_count());
      std::vector<const GoalSpec*> regions;
      for (const GoalSpec& g : sc.goals)
        if (g.worlds.contains(s)) regions.push_back(&g);
      if (!regions.empty()) {
        std::uniform_int_distribution<std::size_t> pick(0, regions.size() - 1);
        return regions[pick(rng_)]->region.sample(rng_);
      }
    }
    const double x = sc.bounds.min.x + unit_(rng_) * sc.bounds.width();
    const double y = sc.bounds.min.y + unit_(rng_) * sc.bounds.height();
    return {x, y};
  }

  std::size_t sample_world(std::size_t hypotheses) {
    if (hypotheses <= 1) return 0;
    std::uniform_int_distribution<std::size_t> pick(0, hypotheses - 1);
    return pick(rng_);
  }

  double uniform() { return unit_(rng_); }
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

// ---------------------------------------------------------------------------
// Neighbor queries

/// Point index for nearest / radius queries under a per-node filter.
/// Linear scan below `kGridThreshold` points, uniform grid above. Both
/// paths return identical results (ties by lowest id).
class NodeIndex {
 public:
  static constexpr std::size_t kGridThreshold = 5000;

  NodeIndex(Box bounds, double cell) : bounds_(bounds), cell_(cell) {
    cols_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.width() / cell)));
    rows_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(bounds.height() / cell)));
    cells_.resize(cols_ * rows_);
  }

  void insert(Config p) {
    const auto id = static_cast<NodeId>(points_.size());
    points_.push_back(p);
    cells_[cell_of(p)].push_back(id);
  }
  std::size_t size() const { return points_.size(); }
  void force_grid(bool on) { force_grid_ = on; }

  template <typename Pred>
  std::optional<NodeId> nearest(Config q, Pred&& accept) const {
    if (!use_grid()) return nearest_linear(q, accept);
    return nearest_grid(q, accept);
  }

  /// Ids within distance `r` of q accepted by the filter, ascending.
  template <typename Pred>
  std::vector<NodeId> within(Config q, double r, Pred&& accept) const {
    std::vector<NodeId> out;
    const double r2 = r * r;
    if (!use_grid()) {
      for (NodeId i = 0; i < points_.size(); ++i)
        if (squared_distance(points_[i], q) <= r2 && accept(i)) out.push_back(i);
      return out;
    }
    const auto [c0, r0] = cell_coords({q.x - r, q.y - r});
    const auto [c1, r1] = cell_coords({q.x + r, q.y + r});
    for (std::size_t row = r0; row <= r1; ++row)
      for (std::size_t col = c0; col <= c1; ++col)
        for (NodeId i : cells_[row * cols_ + col])
          if (squared_distance(points_[i], q) <= r2 && accept(i)) out.push_back(i);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  bool use_grid() const { return force_grid_ || points_.size() >= kGridThreshold; }

  std::pair<std::size_t, std::size_t> cell_coords(Vec2 p) const {
    const double fx = std::floor((p.x - bounds_.min.x) / cell_);
    const double fy = std::floor((p.y - bounds_.min.y) / cell_);
    const auto cx = static_cast<std::size_t>(std::clamp(fx, 0.0, static_cast<double>(cols_ - 1)));
    const auto cy = static_cast<std::size_t>(std::clamp(fy, 0.0, static_cast<double>(rows_ - 1)));
    return {cx, cy};
  }
  std::size_t cell_of(Vec2 p) const {
    const auto [cx, cy] = cell_coords(p);
    return cy * cols_ + cx;
  }

  template <typename Pred>
  std::optional<NodeId> nearest_linear(Config q, Pred& accept) const {
    std::optional<NodeId> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (NodeId i = 0; i < points_.size(); ++i) {
      const double d = squared_distance(points_[i], q);
      if (d < best_d && accept(i)) {
        best_d = d;
        best = i;
      }
    }
    return best;
  }

  template <typename Pred>
  std::optional<NodeId> nearest_grid(Config q, Pred& accept) const {
    const auto [qc, qr] = cell_coords(q);
    std::optional<NodeId> best;
    double best_d = std::numeric_limits<double>::infinity();
    const std::size_t max_ring = std::max(cols_, rows_);
    for (std::size_t ring = 0; ring <= max_ring; ++ring) {
      // Points in ring m >= 1 lie at least (m - 1) cells away from q.
      const double reach = ring == 0 ? 0.0 : static_cast<double>(ring - 1) * cell_;
      if (best && reach * reach > best_d) break;
      const long c_lo = static_cast<long>(qc) - static_cast<long>(ring);
      const long c_hi = static_cast<long>(qc) + static_cast<long>(ring);
      const long r_lo = static_cast<long>(qr) - static_cast<long>(ring);
      const long r_hi = static_cast<long>(qr) + static_cast<long>(ring);
      for (long row = r_lo; row <= r_hi; ++row) {
        if (row < 0 || row >= static_cast<long>(rows_)) continue;
        const bool edge_row = row == r_lo || row == r_hi;
        for (long col = c_lo; col <= c_hi; ++col) {
          if (col < 0 || col >= static_cast<long>(cols_)) continue;
          if (!edge_row && col != c_lo && col != c_hi) continue;
          for (NodeId i : cells_[static_cast<std::size_t>(row) * cols_ + static_cast<std::size_t>(col)]) {
            const double d = squared_distance(points_[i], q);
            if ((d < best_d || (d == best_d && best && i < *best)) && accept(i)) {
              best_d = d;
              best = i;
            }
          }
        }
      }
    }
    return best;
  }

  Box bounds_;
  double cell_;
  std::size_t cols_ = 1;
  std::size_t rows_ = 1;
  bool force_grid_ = false;
  std::vector<Config> points_;
  std::vector<std::vector<NodeId>> cells_;
};

/// Returns q_rand if within eta of q_near, else the point at distance eta
/// from q_near toward q_rand.
inline Config steer(Config q_near, Config q_rand, double eta) {
  const double d = distance(q_near, q_rand);
  if (d <= eta) return q_rand;
  return q_near + (eta / d) * (q_rand - q_near);
}

/// Adaptive connection radius min(eta, gamma (log n / n)^(1/dim)); r(1) = eta.
inline double near_radius(std::size_t n, double gamma, double eta) {
  if (n <= 1) return eta;
  const double nd = static_cast<double>(n);
  return std::min(eta, gamma * std::pow(std::log(nd) / nd, 1.0 / static_cast<double>(kDim)));
}

class NoCompatibleNode : public std::runtime_error {
 public:
  NoCompatibleNode() : std::runtime_error("no node is valid in the sampled world") {}
};

/// Nearest node valid in world `w` (linear scan; ties by lowest id).
inline NodeId nearest(const RRGraph& g, Config q, std::size_t w) {
  std::optional<NodeId> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (NodeId i = 0; i < g.nodes.size(); ++i) {
    if (!g.nodes[i].valid_worlds.contains(w)) continue;
    const double d = squared_distance(g.nodes[i].config, q);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (!best) throw NoCompatibleNode();
  return *best;
}

/// Nodes valid in world `w` within the adaptive radius for `n` nodes.
inline std::vector<NodeId> near_set(const RRGraph& g, Config q, std::size_t w, std::size_t n, double gamma,
                                    double eta) {
  const double r = near_radius(n, gamma, eta);
  std::vector<NodeId> out;
  for (NodeId i = 0; i < g.nodes.size(); ++i)
    if (g.nodes[i].valid_worlds.contains(w) && distance(g.nodes[i].config, q) <= r) out.push_back(i);
  return out;
}

// ---------------------------------------------------------------------------
// Completeness

/// Per-hypothesis reachability of a goal node from the root.
struct CoverageReport {
  /// Union of node goal worlds.
  WorldSet goal_union;
  /// Worlds with a goal node reachable from the root inside that world.
  WorldSet reachable;
  std::size_t hypotheses = 1;

  bool complete() const { return reachable == WorldSet::full(hypotheses) && goal_union == reachable; }
  std::vector<std::size_t> missing() const { return WorldSet::full(hypotheses).minus(reachable).members(); }
};

/// Breadth-first search per hypothesis.
inline CoverageReport coverage(const RRGraph& g, std::size_t hypotheses) {
  CoverageReport rep;
  rep.hypotheses = hypotheses;
  for (const RrgNode& n : g.nodes) rep.goal_union |= n.goal_worlds;
  rep.goal_union &= WorldSet::full(hypotheses);
  if (g.nodes.empty()) return rep;
  std::vector<char> seen(g.nodes.size());
  for (std::size_t s = 0; s < hypotheses; ++s) {
    if (!g.nodes[g.root].valid_worlds.contains(s)) continue;
    std::fill(seen.begin(), seen.end(), 0);
    std::queue<NodeId> open;
    open.push(g.root);
    seen[g.root] = 1;
    bool found = false;
    while (!open.empty() && !found) {
      const NodeId u = open.front();
      open.pop();
      if (g.nodes[u].goal_worlds.contains(s)) {
        found = true;
        break;
      }
      for (std::uint32_t e : g.adjacency[u]) {
        const RrgEdge& edge = g.edges[e];
        if (!edge.worlds.contains(s)) continue;
        const NodeId v = g.other(edge, u);
        if (!seen[v]) {
          seen[v] = 1;
          open.push(v);
        }
      }
    }
    if (found) rep.reachable |= WorldSet::single(s);
  }
  return rep;
}

inline bool is_complete(const RRGraph& g, std::size_t hypotheses) { return coverage(g, hypotheses).complete(); }

/// Incremental per-world union-find tracking goal reachability from the
/// root as nodes and edges are added.
class CompletenessTracker {
 public:
  explicit CompletenessTracker(std::size_t hypotheses) : parent_(hypotheses), has_goal_(hypotheses) {}

  void add_node(const RrgNode& n) {
    const auto id = static_cast<NodeId>(node_count_++);
    for (std::size_t s = 0; s < parent_.size(); ++s) {
      parent_[s].push_back(id);
      has_goal_[s].push_back(n.valid_worlds.contains(s) && n.goal_worlds.contains(s));
    }
  }

  void add_edge(NodeId u, NodeId v, WorldSet w) {
    w.for_each([&](std::size_t s) {
      if (s >= parent_.size()) return;
      const NodeId a = find(s, u);
      const NodeId b = find(s, v);
      if (a == b) return;
      const NodeId lo = std::min(a, b);
      const NodeId hi = std::max(a, b);
      parent_[s][hi] = lo;
      has_goal_[s][lo] = has_goal_[s][lo] || has_goal_[s][hi];
    });
  }

  bool reached(std::size_t s, NodeId root, WorldSet root_valid) {
    return root_valid.contains(s) && has_goal_[s][find(s, root)];
  }

  bool complete(NodeId root, WorldSet root_valid) {
    for (std::size_t s = 0; s < parent_.size(); ++s)
      if (!reached(s, root, root_valid)) return false;
    return true;
  }

 private:
  NodeId find(std::size_t s, NodeId x) {
    auto& p = parent_[s];
    while (p[x] != x) {
      p[x] = p[p[x]];
      x = p[x];
    }
    return x;
  }

  std::vector<std::vector<NodeId>> parent_;
  std::vector<std::vector<char>> has_goal_;
  std::size_t node_count_ = 0;
};

// ---------------------------------------------------------------------------
// Builder

struct RrgBuildResult {
  RRGraph graph;
  bool complete = false;
  std::size_t iterations = 0;
  /// Iteration at which completeness first held (0 if never).
  std::size_t complete_at = 0;
  CoverageReport coverage;
};

class RrgBuilder {
 public:
  RrgBuilder(const Scenario& sc, Oracle& oracle, const RrgParams& params)
      : sc_(&sc),
        oracle_(&oracle),
        params_(resolve_params(sc, params)),
        sampler_(params_.seed),
        index_(sc.bounds, *params_.steer_eta),
        tracker_(sc.hypothesis_count()) {
    graph_.hypotheses = sc.hypothesis_count();
    const WorldSet valid = oracle_->state_check(sc.start);
    if (valid.empty()) throw std::invalid_argument("start configuration is invalid in every world");
    add_node({sc.start, oracle_->goal_check(sc.start) & valid, valid});
  }

  const RRGraph& graph() const { return graph_; }
  const RrgParams& params() const { return params_; }
  std::size_t iterations() const { return iterations_; }
  std::size_t complete_at() const { return complete_at_; }

  bool complete() {
    return tracker_.complete(graph_.root, graph_.nodes[graph_.root].valid_worlds);
  }

  /// One iteration of the growth loop.
  void step() {
    ++iterations_;
    const Config q_rand = sampler_.sample_state(*sc_, params_.goal_bias);
    const std::size_t w = sampler_.sample_world(sc_->hypothesis_count());
    const auto compatible = [&](NodeId i) { return graph_.nodes[i].valid_worlds.contains(w); };
    const std::optional<NodeId> q_near = index_.nearest(q_rand, compatible);
    if (!q_near) return;
    const Config q_new = steer(graph_.nodes[*q_near].config, q_rand, *params_.steer_eta);
    const WorldSet valid = oracle_->state_check(q_new);
    if (valid.empty()) return;
    const WorldSet goal = oracle_->goal_check(q_new) & valid;
    const double r = near_radius(graph_.nodes.size(), *params_.gamma, *params_.steer_eta);
    std::vector<NodeId> neighbors = index_.within(q_new, r, compatible);
    if (!std::binary_search(neighbors.begin(), neighbors.end(), *q_near)) {
      neighbors.insert(std::lower_bound(neighbors.begin(), neighbors.end(), *q_near), *q_near);
    }
    const NodeId id = add_node({q_new, goal, valid});
    for (NodeId n : neighbors) {
      const WorldSet wv = oracle_->transition_check(graph_.nodes[n].config, q_new);
      if (wv.empty()) continue;
      graph_.add_edge(n, id, wv);
      tracker_.add_edge(n, id, wv);
    }
    if (complete_at_ == 0 && complete()) complete_at_ = iterations_;
  }

  /// Grows until complete and at least min_iterations, or max_iterations.
  void run() {
    while (iterations_ < params_.max_iterations && !(iterations_ >= params_.min_iterations && complete())) step();
  }

  /// Runs `extra` more iterations, bounded by max_iterations.
  void grow(std::size_t extra) {
    for (std::size_t i = 0; i < extra && iterations_ < params_.max_iterations; ++i) step();
  }

  RrgBuildResult result() const {
    RrgBuildResult r;
    r.graph = graph_;
    r.iterations = iterations_;
    r.complete_at = complete_at_;
    r.coverage = coverage(graph_, sc_->hypothesis_count());
    r.complete = r.coverage.complete();
    return r;
  }

 private:
  NodeId add_node(const RrgNode& n) {
    index_.insert(n.config);
    tracker_.add_node(n);
    return graph_.add_node(n);
  }

  const Scenario* sc_;
  Oracle* oracle_;
  RrgParams params_;
  Sampler sampler_;
  NodeIndex index_;
  CompletenessTracker tracker_;
  RRGraph graph_;
  std::size_t iterations_ = 0;
  std::size_t complete_at_ = 0;
};

inline RrgBuildResult build_rrg(const Scenario& sc, const RrgParams& params, Oracle* oracle = nullptr) {
  Oracle local(sc);
  RrgBuilder builder(sc, oracle ? *oracle : local, params);
  builder.run();
  return builder.result();
}

}  // namespace pto
