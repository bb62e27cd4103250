#pragma once

// Batch comparison of the path-tree planner against the branch-and-bound
// baseline over a set of scenarios and seeds.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pto/baseline.hpp"
#include "pto/planner.hpp"

namespace pto {

enum class Algorithm { Pto, BnbRrtStar };

inline const char* to_string(Algorithm a) { return a == Algorithm::Pto ? "pto" : "bnb-rrtstar"; }

struct RunRecord {
  std::uint64_t seed = 0;
  bool success = false;
  std::string error;
  double cost = 0.0;
  std::uint64_t collision_checks = 0;
  double time_ms = 0.0;
  PathTree tree;
};

struct CompareCell {
  std::string scenario;
  std::size_t hypotheses = 0;
  Algorithm algorithm = Algorithm::Pto;
  std::vector<RunRecord> runs;
  std::size_t failures = 0;
  double mean_cost = 0.0;
  double stddev_cost = 0.0;
  double mean_collision_checks = 0.0;
  double mean_time_ms = 0.0;
};

struct CompareParams {
  PlannerParams planner;
  BaselineParams baseline;
  std::vector<std::uint64_t> seeds{0};
  bool keep_trees = false;
};

inline RunRecord run_algorithm(const Scenario& sc, Algorithm algo, std::uint64_t seed, const CompareParams& params) {
  RunRecord r;
  r.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if (algo == Algorithm::Pto) {
      PlannerParams p = params.planner;
      p.rrg.seed = seed;
      PlanResult res = plan(sc, p);
      r.success = res.success;
      r.error = res.error;
      r.cost = res.metrics.cost;
      r.collision_checks = res.metrics.collision_checks;
      if (res.success) r.tree = std::move(res.tree);
    } else {
      BaselineParams p = params.baseline;
      p.rrt.seed = seed;
      BaselineResult res = bnb_tamp_plan(sc, p);
      r.success = res.success;
      if (!res.success) r.error = "every visit order was pruned";
      r.cost = res.tree.expected_cost;
      r.collision_checks = res.collision_checks;
      if (res.success) r.tree = std::move(res.tree);
    }
  } catch (const std::exception& e) {
    r.success = false;
    r.error = e.what();
  }
  r.time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Population statistics over successful runs; a single run has stddev 0.
inline void summarize(CompareCell& cell) {
  std::vector<double> costs;
  double checks = 0.0;
  double time = 0.0;
  cell.failures = 0;
  for (const RunRecord& r : cell.runs) {
    checks += static_cast<double>(r.collision_checks);
    time += r.time_ms;
    if (!r.success) {
      ++cell.failures;
      continue;
    }
    costs.push_back(r.cost);
  }
  const double n = static_cast<double>(cell.runs.size());
  cell.mean_collision_checks = n > 0 ? checks / n : 0.0;
  cell.mean_time_ms = n > 0 ? time / n : 0.0;
  cell.mean_cost = 0.0;
  cell.stddev_cost = 0.0;
  if (costs.empty()) return;
  for (double c : costs) cell.mean_cost += c;
  cell.mean_cost /= static_cast<double>(costs.size());
  for (double c : costs) cell.stddev_cost += (c - cell.mean_cost) * (c - cell.mean_cost);
  cell.stddev_cost = std::sqrt(cell.stddev_cost / static_cast<double>(costs.size()));
}

/// One cell per (scenario, algorithm), scenario-major.
inline std::vector<CompareCell> run_compare(const std::vector<Scenario>& scenarios,
                                            const std::vector<Algorithm>& algorithms, const CompareParams& params) {
  std::vector<CompareCell> cells;
  for (const Scenario& sc : scenarios) {
    for (Algorithm a : algorithms) {
      CompareCell cell;
      cell.scenario = sc.name;
      cell.hypotheses = sc.hypothesis_count();
      cell.algorithm = a;
      for (std::uint64_t seed : params.seeds) {
        RunRecord r = run_algorithm(sc, a, seed, params);
        if (!params.keep_trees) r.tree = {};
        cell.runs.push_back(std::move(r));
      }
      summarize(cell);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace pto
