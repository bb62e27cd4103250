#pragma once

// End-to-end pipeline: random graph, belief-space expansion, expected-cost
// DP with tree extraction, then piecewise shortcut refinement.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "pto/belief_graph.hpp"
#include "pto/policy.hpp"
#include "pto/refine.hpp"
#include "pto/rrg.hpp"

namespace pto {

struct PlannerParams {
  RrgParams rrg;
  std::size_t refine_iterations = kDefaultRefineIterations;
  /// Extra iterations per retry when the graph is complete per world but
  /// no path-tree exists yet.
  std::size_t retry_batch = 500;
};

struct StageTimes {
  double rrg_ms = 0.0;
  double belief_ms = 0.0;
  double policy_ms = 0.0;
  double refine_ms = 0.0;
};

struct PlanMetrics {
  std::size_t iterations = 0;
  std::size_t complete_at = 0;
  std::size_t rrg_nodes = 0;
  std::size_t rrg_edges = 0;
  std::size_t beliefs = 0;
  std::size_t belief_nodes = 0;
  std::size_t action_edges = 0;
  std::size_t observation_edges = 0;
  std::size_t branching_nodes = 0;
  std::size_t rebuilds = 0;
  std::uint64_t collision_checks = 0;
  double unrefined_cost = 0.0;
  double cost = 0.0;
  StageTimes times;
};

struct PlanResult {
  bool success = false;
  std::string error;
  PathTree tree;
  PathTree unrefined;
  PlanMetrics metrics;
  RRGraph graph;
  CoverageReport coverage;
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

inline PlanResult plan(const Scenario& sc, const PlannerParams& params) {
  PlanResult res;
  Oracle oracle(sc);
  PlanMetrics& m = res.metrics;

  detail::Stopwatch sw;
  RrgBuilder builder(sc, oracle, params.rrg);
  builder.run();
  m.times.rrg_ms += sw.ms();

  const std::size_t max_iterations = builder.params().max_iterations;
  while (true) {
    res.coverage = coverage(builder.graph(), sc.hypothesis_count());
    if (!res.coverage.complete()) {
      res.error = "random graph incomplete after " + std::to_string(builder.iterations()) + " iterations";
      break;
    }
    detail::Stopwatch sb;
    BeliefRegistry registry(sc.prior());
    BeliefGraphBuild bgb = build_belief_graph(sc, builder.graph(), registry);
    m.times.belief_ms += sb.ms();

    detail::Stopwatch sp;
    const CostMap cost = compute_expected_cost_to_goal(bgb.graph);
    if (cost[bgb.graph.root]) {
      res.unrefined = extract_path_tree(bgb.graph, cost, bgb.graph.root, registry.prior());
      m.times.policy_ms += sp.ms();
      m.beliefs = registry.size();
      m.belief_nodes = bgb.graph.size();
      m.action_edges = bgb.graph.action_edge_count();
      m.observation_edges = bgb.graph.observation_edge_count();
      m.unrefined_cost = *cost[bgb.graph.root];
      res.success = true;
      break;
    }
    m.times.policy_ms += sp.ms();
    if (builder.iterations() >= max_iterations) {
      res.error = "no complete path-tree after " + std::to_string(builder.iterations()) + " iterations";
      break;
    }
    detail::Stopwatch sg;
    builder.grow(params.retry_batch);
    m.times.rrg_ms += sg.ms();
    ++m.rebuilds;
  }

  m.iterations = builder.iterations();
  m.complete_at = builder.complete_at();
  m.rrg_nodes = builder.graph().nodes.size();
  m.rrg_edges = builder.graph().edges.size();
  res.graph = builder.graph();
  if (res.success) {
    detail::Stopwatch sr;
    res.tree = refine_tree(res.unrefined, sc, params.refine_iterations, builder.params().seed);
    m.times.refine_ms = sr.ms();
    m.cost = res.tree.expected_cost;
    m.branching_nodes = res.tree.branching_count();
  }
  m.collision_checks = oracle.collision_checks();
  return res;
}

}  // namespace pto
