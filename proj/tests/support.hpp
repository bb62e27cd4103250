#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pto/planner.hpp"
#include "pto/scenario.hpp"
#include "pto/simulate.hpp"

#ifndef PTO_FIXTURE_DIR
#error PTO_FIXTURE_DIR must point at the scenarios directory
#endif

namespace pto::test {

inline std::string fixture(const std::string& name) { return std::string(PTO_FIXTURE_DIR) + "/" + name; }

inline Scenario load_fixture(const std::string& name) { return load_scenario(fixture(name)); }

inline Scenario with_door_priors(Scenario sc, double p) {
  for (UncertainFactor& f : sc.factors) f.prior = p;
  return sc;
}

inline nlohmann::json box_json(double x0, double y0, double x1, double y1) {
  return {{"min", {x0, y0}}, {"max", {x1, y1}}};
}

inline nlohmann::json rect(double x0, double y0, double x1, double y1) {
  return nlohmann::json::array({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

/// 10 x 6 room split by a wall at x = 5 with one door in y [2, 3]. The
/// optional second door sits in a wall at x = 8, y [2, 3].
inline nlohmann::json door_room(int doors, double prior = 0.5) {
  nlohmann::json doc;
  doc["format"] = 1;
  doc["name"] = "door_room";
  doc["mode"] = "independent_doors";
  doc["bounds"] = box_json(0, 0, 10, 6);
  doc["obstacles"] = nlohmann::json::array({rect(4.9, 0, 5.1, 2), rect(4.9, 3, 5.1, 6)});
  doc["factors"] = nlohmann::json::array(
      {{{"kind", "door"}, {"name", "door0"}, {"geometry", {{5.0, 2.0}, {5.0, 3.0}}}, {"prior", prior}}});
  if (doors > 1) {
    doc["obstacles"].push_back(rect(7.9, 0, 8.1, 2));
    doc["obstacles"].push_back(rect(7.9, 3, 8.1, 6));
    doc["factors"].push_back(
        {{"kind", "door"}, {"name", "door1"}, {"geometry", {{8.0, 2.0}, {8.0, 3.0}}}, {"prior", prior}});
  }
  doc["start"] = {1.0, 2.5};
  doc["goals"] = nlohmann::json::array({{{"worlds", "all"}, {"disc", {{"center", {9.5, 2.5}}, {"radius", 0.3}}}}});
  return doc;
}

inline Scenario parse(const nlohmann::json& doc) { return parse_scenario(doc.dump()); }

inline PlannerParams planner_params(std::uint64_t seed, std::size_t min_iterations,
                                    std::size_t max_iterations = 50000) {
  PlannerParams p;
  p.rrg.seed = seed;
  p.rrg.min_iterations = min_iterations;
  p.rrg.max_iterations = max_iterations;
  return p;
}

/// Prior-weighted executed cost minus the tree's own expected cost.
inline double objective_gap(const PathTree& t, const Scenario& sc) {
  return simulate(t, sc).weighted_cost - t.expected_cost;
}

}  // namespace pto::test
