#include <gtest/gtest.h>

#include "pto/baseline.hpp"
#include "support.hpp"

using namespace pto;

namespace {

nlohmann::json location(const std::string& name, double x, double prior) {
  return {{"kind", "object_location"},
          {"name", name},
          {"geometry", {x, 1.8}},
          {"zone", {{"center", {x, 1.0}}, {"radius", 1.0}}},
          {"prior", prior}};
}

// Open 12 x 2 corridor; locations at x = 4 and x = 8, start at x = 0.5.
Scenario corridor(std::size_t k) {
  nlohmann::json doc;
  doc["format"] = 1;
  doc["name"] = "corridor";
  doc["mode"] = "exclusive_locations";
  doc["bounds"] = test::box_json(0, 0, 12, 2);
  doc["start"] = {0.5, 1.0};
  doc["factors"] = nlohmann::json::array();
  doc["goals"] = nlohmann::json::array();
  const double xs[] = {4.0, 8.0};
  for (std::size_t i = 0; i < k; ++i) {
    doc["factors"].push_back(location("loc" + std::to_string(i), xs[i], 1.0 / static_cast<double>(k)));
    doc["goals"].push_back({{"worlds", {i}}, {"disc", {{"center", {xs[i], 1.0}}, {"radius", 0.2}}}});
  }
  return test::parse(doc);
}

BaselineParams params(std::uint64_t seed, std::size_t iterations) {
  BaselineParams p;
  p.rrt.seed = seed;
  p.rrt.iterations = iterations;
  return p;
}

}  // namespace

TEST(RrtStar, EmptyMapNearStraightLine) {
  const Scenario sc = test::load_fixture("empty_10m.json");
  Oracle oracle(sc);
  RrtStarParams p;
  p.iterations = 5000;
  p.seed = 4;
  const RrtStarResult r = rrt_star_plan(oracle, sc.start, sc.goals[0].region, WorldSet(1), p);
  ASSERT_TRUE(r.success);
  const double straight = distance(sc.start, {9.5, 9.5}) - 0.25;
  EXPECT_GE(r.cost, straight - 1e-9);
  EXPECT_LE(r.cost, 1.05 * straight);
  EXPECT_EQ(r.path.front(), sc.start);
  EXPECT_TRUE(sc.goals[0].region.contains(r.path.back()));
  EXPECT_NEAR(r.cost, path_length(r.path), 1e-12);
  EXPECT_GT(oracle.collision_checks(), 0U);
}

TEST(RrtStar, EnclosedGoalFails) {
  nlohmann::json doc = test::door_room(1);
  doc["factors"] = nlohmann::json::array();
  doc["obstacles"].push_back(test::rect(8.8, 1.8, 10.0, 2.0));
  doc["obstacles"].push_back(test::rect(8.8, 3.0, 10.0, 3.2));
  doc["obstacles"].push_back(test::rect(8.8, 1.8, 9.0, 3.2));
  const Scenario sc = test::parse(doc);
  Oracle oracle(sc);
  RrtStarParams p;
  p.iterations = 1500;
  const RrtStarResult r = rrt_star_plan(oracle, sc.start, sc.goals[0].region, WorldSet(1), p);
  EXPECT_FALSE(r.success);
  EXPECT_TRUE(r.path.empty());
}

TEST(RrtStar, SameSeedSamePath) {
  const Scenario sc = test::load_fixture("empty_10m.json");
  RrtStarParams p;
  p.iterations = 800;
  p.seed = 11;
  Oracle o1(sc);
  Oracle o2(sc);
  const RrtStarResult a = rrt_star_plan(o1, sc.start, sc.goals[0].region, WorldSet(1), p);
  const RrtStarResult b = rrt_star_plan(o2, sc.start, sc.goals[0].region, WorldSet(1), p);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(o1.collision_checks(), o2.collision_checks());
}

TEST(ChooseViewpoint, ClosestBoundarySample) {
  const Scenario sc = corridor(2);
  Oracle oracle(sc);
  const auto vp = choose_viewpoint(oracle, 0, sc.start, WorldSet(0b11), 36, 0.2);
  ASSERT_TRUE(vp.has_value());
  EXPECT_NEAR(vp->x, 3.2, 1e-12);
  EXPECT_NEAR(vp->y, 1.0, 1e-12);
  const Config inside{4.5, 1.0};
  EXPECT_EQ(*choose_viewpoint(oracle, 0, inside, WorldSet(0b11), 36, 0.2), inside);
}

TEST(Baseline, SingleLocationNoBranching) {
  const Scenario sc = corridor(1);
  const BaselineResult r = bnb_tamp_plan(sc, params(1, 3000));
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.tree.branching_count(), 0U);
  EXPECT_FALSE(validate_path_tree(r.tree, sc).has_value());
  EXPECT_GE(r.tree.expected_cost, 3.3 - 1e-9);
  EXPECT_LE(r.tree.expected_cost, 1.05 * 3.3);
}

// Visiting x = 4 first: world 0 pays start -> viewpoint (3.2) -> disc edge
// (3.8) = 3.3; world 1 continues to the second viewpoint (7.2) and fetches
// from there, 2.7 + 4.0 + 0.6 = 7.3. Expected 0.5 * 3.3 + 0.5 * 7.3.
TEST(Baseline, TwoLocationCorridorClosedForm) {
  const Scenario sc = corridor(2);
  const BaselineResult r = bnb_tamp_plan(sc, params(2, 5000));
  ASSERT_TRUE(r.success);
  const double expected = 0.5 * 3.3 + 0.5 * 7.3;
  EXPECT_GE(r.tree.expected_cost, expected - 1e-9);
  EXPECT_LE(r.tree.expected_cost, 1.04 * expected);
  EXPECT_EQ(r.tree.branching_count(), 1U);
  for (const PathTreeNode& n : r.tree.nodes)
    if (n.kind == TreeNodeKind::Branching) EXPECT_EQ(n.observed_factor, 0U);
  EXPECT_FALSE(validate_path_tree(r.tree, sc).has_value());
  EXPECT_NEAR(test::objective_gap(r.tree, sc), 0.0, 1e-9);
  EXPECT_GT(r.collision_checks, 0U);
  EXPECT_GT(r.search_nodes, 0U);
}

TEST(Baseline, ShelvesTreeIsValid) {
  const Scenario sc = test::load_fixture("shelves_4.json");
  const BaselineResult r = bnb_tamp_plan(sc, params(3, 1000));
  ASSERT_TRUE(r.success);
  EXPECT_FALSE(validate_path_tree(r.tree, sc).has_value());
  EXPECT_NEAR(test::objective_gap(r.tree, sc), 0.0, 1e-9);
  const SimulationReport rep = simulate(r.tree, sc);
  EXPECT_TRUE(rep.all_reached);
  EXPECT_TRUE(rep.all_safe);
}

TEST(Baseline, Deterministic) {
  const Scenario sc = test::load_fixture("shelves_2.json");
  const BaselineResult a = bnb_tamp_plan(sc, params(5, 600));
  const BaselineResult b = bnb_tamp_plan(sc, params(5, 600));
  EXPECT_EQ(a.tree.expected_cost, b.tree.expected_cost);
  EXPECT_EQ(a.collision_checks, b.collision_checks);
}

TEST(Baseline, RejectsDoorScenarios) {
  const Scenario sc = test::load_fixture("problem_a.json");
  EXPECT_THROW(bnb_tamp_plan(sc, params(1, 100)), std::invalid_argument);
}
