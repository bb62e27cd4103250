#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pto/belief.hpp"
#include "support.hpp"

using namespace pto;
using pto::test::door_room;
using pto::test::parse;

namespace {

// Joint prior over two independent doors, enumerated by hand; bit f of the
// index set means door f closed.
std::vector<double> two_door_joint(double p_open) {
  const double q = 1.0 - p_open;
  return {p_open * p_open, q * p_open, p_open * q, q * q};
}

}  // namespace

TEST(Belief, RootIsPriorOverFullSupport) {
  BeliefRegistry reg({0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(reg.root(), 0U);
  EXPECT_EQ(reg[reg.root()].support, WorldSet::full(4));
  EXPECT_EQ(reg.size(), 1U);
}

TEST(Belief, UpdateUniformHalves) {
  const Scenario sc = parse(door_room(2));
  BeliefRegistry reg(sc.prior());
  const BeliefId b = update(reg, reg.root(), sc.positive_worlds(0));
  EXPECT_EQ(reg[b].support.mask(), 0b0101U);
  EXPECT_DOUBLE_EQ(reg[b].probs[0], 0.5);
  EXPECT_DOUBLE_EQ(reg[b].probs[2], 0.5);
  EXPECT_DOUBLE_EQ(reg[b].probs[1], 0.0);
}

TEST(Belief, UninformativeObservationKeepsId) {
  BeliefRegistry reg({0.25, 0.25, 0.25, 0.25});
  const BeliefId b = update(reg, reg.root(), WorldSet(0b0011));
  EXPECT_EQ(update(reg, b, WorldSet(0b0111)), b);
  EXPECT_EQ(update(reg, b, WorldSet::full(4)), b);
  EXPECT_DOUBLE_EQ(observation_probability(reg[b], WorldSet(0b0111)), 1.0);
}

TEST(Belief, ClosedDoorRenormalizesOverOtherDoor) {
  const Scenario sc = parse(door_room(2, 0.8));
  BeliefRegistry reg(sc.prior());
  const auto joint = two_door_joint(0.8);
  const WorldSet closed0 = sc.negative_worlds(0);
  double mass = 0.0;
  for (std::size_t s : closed0.members()) mass += joint[s];
  EXPECT_NEAR(mass, 0.2, 1e-15);
  EXPECT_NEAR(observation_probability(reg[reg.root()], closed0), mass, 1e-15);
  const BeliefId b = update(reg, reg.root(), closed0);
  // door1 open given door0 closed: world 1; door1 closed: world 3.
  EXPECT_NEAR(reg[b].probs[1], joint[1] / mass, 1e-15);
  EXPECT_NEAR(reg[b].probs[3], joint[3] / mass, 1e-15);
  EXPECT_NEAR(reg[b].probs[1], 0.8, 1e-12);
  EXPECT_NEAR(reg[b].probs[3], 0.2, 1e-12);
}

TEST(Belief, ImpossibleObservationThrows) {
  BeliefRegistry reg({0.5, 0.5, 0.0, 0.0});
  EXPECT_EQ(reg[reg.root()].support.mask(), 0b0011U);
  EXPECT_THROW(update(reg, reg.root(), WorldSet(0b1100)), ImpossibleObservation);
  EXPECT_THROW(reg.intern(WorldSet()), ImpossibleObservation);
}

TEST(Belief, ObservationProbabilities) {
  const Scenario sc = parse(door_room(2, 0.8));
  BeliefRegistry reg(sc.prior());
  EXPECT_NEAR(observation_probability(reg[reg.root()], sc.positive_worlds(0)), 0.8, 1e-15);

  BeliefRegistry uni({0.25, 0.25, 0.25, 0.25});
  const Scenario u = parse(door_room(2, 0.5));
  const double p1 = observation_probability(uni[uni.root()], u.positive_worlds(0));
  const BeliefId b1 = update(uni, uni.root(), u.positive_worlds(0));
  const double p2 = observation_probability(uni[b1], u.positive_worlds(1));
  EXPECT_DOUBLE_EQ(p1, 0.5);
  EXPECT_DOUBLE_EQ(p2, 0.5);
  EXPECT_DOUBLE_EQ(p1 * p2, 0.25);
}

TEST(Belief, ObserveOutcomesExamples) {
  const Scenario sc = parse(door_room(1));
  BeliefRegistry reg(sc.prior());
  EXPECT_TRUE(observe_outcomes(sc, {1.0, 2.5}, reg, reg.root()).empty());
  const auto obs = observe_outcomes(sc, {4.2, 2.5}, reg, reg.root());
  ASSERT_EQ(obs.size(), 1U);
  ASSERT_EQ(obs[0].outcomes.size(), 2U);
  EXPECT_DOUBLE_EQ(obs[0].outcomes[0].probability, 0.5);
  EXPECT_DOUBLE_EQ(obs[0].outcomes[1].probability, 0.5);
  const BeliefId open = obs[0].outcomes[0].child;
  EXPECT_EQ(reg[open].support, sc.positive_worlds(0));
  EXPECT_TRUE(observe_outcomes(sc, {4.2, 2.5}, reg, open).empty());
}

TEST(Belief, TwoVisibleFactorsGiveTwoGroups) {
  auto doc = door_room(2);
  doc["factors"][1]["zone"] = {{"center", {5.0, 2.5}}, {"radius", 4.0}};
  const Scenario sc = parse(doc);
  BeliefRegistry reg(sc.prior());
  const auto obs = observe_outcomes(sc, {5.0, 2.5}, reg, reg.root());
  ASSERT_EQ(obs.size(), 2U);
  EXPECT_EQ(obs[0].factor, 0U);
  EXPECT_EQ(obs[1].factor, 1U);
}

namespace {

struct RandomDoors {
  Scenario sc;
  BeliefRegistry reg;
};

RandomDoors random_doors(std::mt19937_64& rng, std::size_t d) {
  Scenario sc;
  sc.mode = ScenarioMode::IndependentDoors;
  sc.bounds = {{0, 0}, {1, 1}};
  std::uniform_real_distribution<double> pr(0.05, 0.95);
  for (std::size_t f = 0; f < d; ++f) {
    UncertainFactor fac;
    fac.prior = pr(rng);
    sc.factors.push_back(fac);
  }
  BeliefRegistry reg(sc.prior());
  return {std::move(sc), std::move(reg)};
}

WorldSet random_support(std::mt19937_64& rng, const Scenario& sc, BeliefRegistry& reg, BeliefId& b) {
  b = reg.root();
  std::uniform_int_distribution<int> coin(0, 2);
  for (std::size_t f = 0; f < sc.factors.size(); ++f) {
    const int c = coin(rng);
    if (c == 0) continue;
    b = update(reg, b, c == 1 ? sc.positive_worlds(f) : sc.negative_worlds(f));
  }
  return reg[b].support;
}

}  // namespace

TEST(BeliefProperties, RandomizedAlgebra) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> dims(1, 4);
  for (int trial = 0; trial < 2000; ++trial) {
    auto [sc, reg] = random_doors(rng, dims(rng));
    BeliefId b = 0;
    random_support(rng, sc, reg, b);
    std::uniform_int_distribution<std::size_t> pick(0, sc.factors.size() - 1);
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    for (WorldSet oi : sc.factor_outcomes(i)) {
      if (!reg[b].support.intersects(oi)) continue;
      const BeliefId once = update(reg, b, oi);
      ASSERT_EQ(update(reg, once, oi), once);
      for (WorldSet oj : sc.factor_outcomes(j)) {
        if (!reg[once].support.intersects(oj)) continue;
        const BeliefId ij = update(reg, once, oj);
        const BeliefId ji = update(reg, update(reg, b, oj), oi);
        ASSERT_EQ(ij, ji);
      }
    }
    double sum = 0.0;
    WorldSet uni;
    for (WorldSet o : sc.factor_outcomes(i)) {
      sum += observation_probability(reg[b], o);
      ASSERT_FALSE(uni.intersects(reg[b].support & o));
      uni |= reg[b].support & o;
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);
    ASSERT_EQ(uni, reg[b].support);
  }
}

TEST(BeliefProperties, ReachableSupportsBoundedByThreePowD) {
  for (std::size_t d = 1; d <= 4; ++d) {
    std::mt19937_64 rng(d);
    auto [sc, reg] = random_doors(rng, d);
    const std::size_t n = enumerate_reachable(sc, reg, (std::uint64_t{1} << d) - 1);
    std::size_t three = 1;
    for (std::size_t k = 0; k < d; ++k) three *= 3;
    EXPECT_EQ(n, three);
  }
}

TEST(BeliefProperties, ExclusiveLocationsSequentialElimination) {
  for (std::size_t k = 1; k <= 8; ++k) {
    Scenario sc;
    sc.mode = ScenarioMode::ExclusiveLocations;
    for (std::size_t f = 0; f < k; ++f) {
      UncertainFactor fac;
      fac.kind = FactorKind::ObjectLocation;
      fac.prior = 1.0 / static_cast<double>(k);
      sc.factors.push_back(fac);
    }
    BeliefRegistry reg(sc.prior());
    std::set<std::uint64_t> supports{reg[reg.root()].support.mask()};
    BeliefId b = reg.root();
    std::size_t chain = 1;
    for (std::size_t f = 0; f + 1 < k; ++f) {
      supports.insert(reg[update(reg, b, sc.positive_worlds(f))].support.mask());
      b = update(reg, b, sc.negative_worlds(f));
      chain += supports.insert(reg[b].support.mask()).second;
    }
    EXPECT_EQ(chain, k);
    EXPECT_EQ(reg[b].support.count(), 1);
    EXPECT_EQ(supports.size(), 2 * k - 1);
    EXPECT_EQ(reg.size(), 2 * k - 1);
    BeliefRegistry all(sc.prior());
    EXPECT_EQ(enumerate_reachable(sc, all, (std::uint64_t{1} << k) - 1), (std::size_t{1} << k) - 1);
  }
}
