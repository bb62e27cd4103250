#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace pto;
using pto::test::door_room;
using pto::test::parse;

namespace {

// Door f blocks x iff it is closed in s and x lies in its grown rectangle.
WorldSet door_state_oracle(const Scenario& sc, Config x) {
  WorldSet out;
  for (std::size_t s = 0; s < sc.hypothesis_count(); ++s) {
    bool blocked = false;
    for (const Polygon& p : sc.obstacles) blocked = blocked || p.contains(x);
    for (std::size_t f = 0; f < sc.factors.size(); ++f) {
      if (!((s >> f) & 1U)) continue;
      const UncertainFactor& d = sc.factors[f];
      const double lo_x = std::min(d.a.x, d.b.x) - kDoorInflation;
      const double hi_x = std::max(d.a.x, d.b.x) + kDoorInflation;
      const double lo_y = std::min(d.a.y, d.b.y) - kDoorInflation;
      const double hi_y = std::max(d.a.y, d.b.y) + kDoorInflation;
      blocked = blocked || (x.x >= lo_x && x.x <= hi_x && x.y >= lo_y && x.y <= hi_y);
    }
    if (!blocked && sc.bounds.contains(x)) out |= WorldSet::single(s);
  }
  return out;
}

std::string error_field(const nlohmann::json& doc) {
  try {
    parse(doc);
  } catch (const ScenarioError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST(ScenarioLoad, HypothesisCounts) {
  EXPECT_EQ(test::load_fixture("problem_a.json").hypothesis_count(), 4U);
  EXPECT_EQ(test::load_fixture("problem_b.json").hypothesis_count(), 16U);
  EXPECT_EQ(test::load_fixture("empty_10m.json").hypothesis_count(), 1U);
  EXPECT_EQ(test::load_fixture("shelves_8.json").hypothesis_count(), 8U);
}

TEST(ScenarioLoad, ExclusiveWeights) {
  nlohmann::json doc;
  doc["format"] = 1;
  doc["mode"] = "exclusive_locations";
  doc["bounds"] = test::box_json(0, 0, 6, 4);
  doc["factors"] = nlohmann::json::array();
  const double w[3] = {0.2, 0.3, 0.5};
  doc["goals"] = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) {
    doc["factors"].push_back({{"kind", "object_location"}, {"geometry", {1.0 + 2 * i, 3.5}}, {"prior", w[i]}});
    doc["goals"].push_back({{"worlds", {i}}, {"disc", {{"center", {1.0 + 2 * i, 3.0}}, {"radius", 0.2}}}});
  }
  doc["start"] = {3.0, 0.5};
  const Scenario sc = parse(doc);
  ASSERT_EQ(sc.hypothesis_count(), 3U);
  const auto p = sc.prior();
  EXPECT_DOUBLE_EQ(p[0], 0.2);
  EXPECT_DOUBLE_EQ(p[1], 0.3);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
  EXPECT_EQ(sc.factors[1].name, "location1");
  EXPECT_EQ(sc.negative_worlds(1).mask(), 0b101U);

  doc["factors"][2]["prior"] = 0.6;
  EXPECT_EQ(error_field(doc), "scenario.factors");
}

TEST(ScenarioLoad, DoorPriorIsProductOfIndependentDoors) {
  const Scenario sc = parse(door_room(2, 0.8));
  const auto p = sc.prior();
  EXPECT_NEAR(p[0], 0.64, 1e-15);
  EXPECT_NEAR(p[1], 0.16, 1e-15);
  EXPECT_NEAR(p[2], 0.16, 1e-15);
  EXPECT_NEAR(p[3], 0.04, 1e-15);
  EXPECT_EQ(sc.negative_worlds(0).mask(), 0b1010U);
  EXPECT_EQ(sc.negative_worlds(1).mask(), 0b1100U);
}

TEST(ScenarioLoad, ErrorsNameTheField) {
  auto doc = door_room(1);
  doc.erase("start");
  EXPECT_EQ(error_field(doc), "scenario.start");

  doc = door_room(1);
  doc["factors"][0]["kind"] = "window";
  EXPECT_EQ(error_field(doc), "scenario.factors[0].kind");

  doc = door_room(1);
  doc["factors"][0]["prior"] = 1.0;
  EXPECT_EQ(error_field(doc), "scenario.factors[0].prior");

  doc = door_room(1);
  doc["goals"][0]["worlds"] = {0, 2};
  EXPECT_EQ(error_field(doc), "scenario.goals[0].worlds[1]");

  doc = door_room(1);
  doc["obstacles"][1] = {{0, 0}, {1, 1}};
  EXPECT_EQ(error_field(doc), "scenario.obstacles[1]");

  doc = door_room(1);
  doc["format"] = 2;
  EXPECT_EQ(error_field(doc), "scenario.format");

  doc = door_room(1);
  doc["start"] = {5.0, 1.0};
  EXPECT_EQ(error_field(doc), "scenario.start");

  EXPECT_THROW(parse_scenario("{ not json"), ScenarioError);
  EXPECT_THROW(load_scenario("/nonexistent/x.json"), ScenarioError);
}

TEST(ScenarioLoad, RoundTripAndHash) {
  const Scenario a = test::load_fixture("problem_a.json");
  const Scenario b = parse_scenario(scenario_to_json(a).dump());
  EXPECT_EQ(scenario_to_json(a), scenario_to_json(b));
  EXPECT_EQ(scenario_hash(a), scenario_hash(b));
  Scenario c = a;
  set_factor_prior(c, "door1", 0.5);
  EXPECT_NE(scenario_hash(a), scenario_hash(c));
  EXPECT_THROW(set_factor_prior(c, "door9", 0.5), ScenarioError);
  EXPECT_THROW(set_factor_prior(c, "door0", 1.5), ScenarioError);
}

TEST(StateCheck, Examples) {
  const Scenario sc = parse(door_room(2));
  EXPECT_EQ(state_check(sc, {2.0, 4.0}), sc.all_worlds());
  EXPECT_EQ(state_check(sc, {5.02, 2.5}), sc.positive_worlds(0));
  EXPECT_EQ(state_check(sc, {5.02, 2.5}).mask(), 0b0101U);
  EXPECT_TRUE(state_check(sc, {5.0, 4.0}).empty());
  EXPECT_TRUE(state_check(sc, {-1.0, 4.0}).empty());
}

TEST(StateCheck, MatchesPerHypothesisOracle) {
  const Scenario sc = parse(door_room(2));
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(4.5, 8.5), uy(1.5, 3.5);
  for (int i = 0; i < 20000; ++i) {
    const Config x{ux(rng), uy(rng)};
    ASSERT_EQ(state_check(sc, x), door_state_oracle(sc, x)) << x.x << "," << x.y;
  }
}

TEST(TransitionCheck, Examples) {
  const Scenario sc = parse(door_room(2));
  EXPECT_EQ(transition_check(sc, {1, 1}, {4, 1.5}), sc.all_worlds());
  EXPECT_EQ(transition_check(sc, {4.0, 2.5}, {6.0, 2.5}), sc.positive_worlds(0));
  EXPECT_EQ(transition_check(sc, {4.0, 2.5}, {9.0, 2.5}), sc.positive_worlds(0) & sc.positive_worlds(1));
  EXPECT_TRUE(transition_check(sc, {4.0, 1.0}, {6.0, 1.0}).empty());
  EXPECT_EQ(transition_check(sc, {5.02, 2.5}, {5.02, 2.5}), state_check(sc, {5.02, 2.5}));
}

TEST(TransitionCheck, AgreesWithFineSampling) {
  const Scenario sc = parse(door_room(2));
  const double fine = kSegmentResolution / 10.0;
  EXPECT_EQ(transition_check(sc, {4.0, 2.5}, {6.0, 2.5}),
            transition_check_sampled(sc, {4.0, 2.5}, {6.0, 2.5}, fine));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ux(0.0, 10.0), uy(0.0, 6.0);
  int equal = 0;
  const int n = 3000;
  for (int i = 0; i < n; ++i) {
    const Config a{ux(rng), uy(rng)};
    const Config b{ux(rng), uy(rng)};
    const WorldSet exact = transition_check(sc, a, b);
    const WorldSet sampled = transition_check_sampled(sc, a, b, fine);
    ASSERT_TRUE(exact.subset_of(sampled));
    equal += exact == sampled;
  }
  EXPECT_GE(equal, n * 99 / 100);
}

TEST(TransitionCheck, SymmetricAndRestricted) {
  const Scenario sc = test::load_fixture("problem_b.json");
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(sc.bounds.min.x, sc.bounds.max.x), uy(sc.bounds.min.y, sc.bounds.max.y);
  for (int i = 0; i < 5000; ++i) {
    Config a{ux(rng), uy(rng)};
    const Config b{ux(rng), uy(rng)};
    if (i % 4 == 0) a = b + Vec2{0.3, -0.2};
    const WorldSet ab = transition_check(sc, a, b);
    ASSERT_EQ(ab, transition_check(sc, b, a));
    ASSERT_TRUE(ab.subset_of(state_check(sc, a)));
    ASSERT_TRUE(ab.subset_of(state_check(sc, b)));
    ASSERT_EQ(ab, transition_check(sc, a, b));
  }
}

TEST(GoalCheck, Examples) {
  const Scenario a = test::load_fixture("problem_a.json");
  EXPECT_EQ(goal_check(a, {18.0, 5.0}), a.all_worlds());
  EXPECT_TRUE(goal_check(a, {10.0, 5.0}).empty());
  const Scenario s = test::load_fixture("shelves_2.json");
  EXPECT_EQ(goal_check(s, {4.0, 1.0}), WorldSet::single(1));
  EXPECT_EQ(goal_check(s, {4.0, 5.0}), WorldSet::single(0));
  EXPECT_TRUE(goal_check(s, {1.0, 1.0}).empty());
}

TEST(Visibility, Examples) {
  auto doc = door_room(1);
  doc["obstacles"].push_back(test::rect(5.6, 2.3, 5.8, 2.7));
  const Scenario sc = parse(doc);
  EXPECT_TRUE(visible(sc, {5.0, 2.5}, 0));
  EXPECT_TRUE(visible(sc, {4.0, 2.5}, 0));
  EXPECT_FALSE(visible(sc, {6.2, 2.5}, 0));
  EXPECT_FALSE(visible(sc, {2.0, 2.5}, 0));
  EXPECT_TRUE(visible(sc, {6.1, 3.3}, 0));
  EXPECT_EQ(visible_factors(sc, {4.0, 2.5}), 1U);
}

TEST(Visibility, MatchesSampledLineOfSight) {
  auto doc = door_room(1);
  doc["obstacles"].push_back(test::rect(5.6, 2.3, 5.8, 2.7));
  const Scenario sc = parse(doc);
  const Vec2 target = sc.factors[0].reference();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ux(3.4, 6.6), uy(0.9, 4.1);
  int clear = 0;
  int agree = 0;
  for (int i = 0; i < 3000; ++i) {
    const Config x{ux(rng), uy(rng)};
    bool blocked = false;
    for (int k = 0; k <= 5000 && !blocked; ++k)
      for (const Polygon& p : sc.obstacles) blocked = blocked || p.contains(lerp(x, target, k / 5000.0));
    const bool in_zone = distance(x, sc.factors[0].zone.center) <= sc.factors[0].zone.radius;
    if (blocked || !in_zone) {
      EXPECT_FALSE(visible(sc, x, 0)) << x.x << "," << x.y;
    } else {
      ++clear;
      agree += visible(sc, x, 0);
    }
  }
  EXPECT_GE(agree, clear * 99 / 100);
}

TEST(Oracle, CountsChecks) {
  const Scenario sc = parse(door_room(1));
  Oracle o(sc);
  o.state_check({1, 1});
  o.transition_check({1, 1}, {2, 2});
  o.transition_check({1, 1}, {3, 2});
  EXPECT_EQ(o.state_checks(), 1U);
  EXPECT_EQ(o.transition_checks(), 2U);
  EXPECT_EQ(o.collision_checks(), 3U);
}
