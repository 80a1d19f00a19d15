#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "posauth/error.hpp"
#include "posauth/random.hpp"
#include "posauth/scenario.hpp"

using namespace posauth;

TEST(Scenario, RoadPlacementMatchesGridEnumeration) {
  const Scenario s = build_road_scenario(ScenarioConfig{});
  ASSERT_EQ(s.rsus.size(), 22u);
  std::set<std::pair<double, double>> expected;
  for (int k = 0; k <= 10; ++k) {
    expected.insert({300.0 * k, 0.0});
    expected.insert({300.0 * k, 20.0});
  }
  std::set<std::pair<double, double>> actual;
  std::set<int> ids;
  for (const Rsu& r : s.rsus) {
    actual.insert({r.position.x(), r.position.y()});
    ids.insert(r.id);
  }
  EXPECT_EQ(actual, expected);
  EXPECT_EQ(ids.size(), s.rsus.size());
}

TEST(Scenario, DefaultOffsetIsOneMeterBehind) {
  const Scenario s = build_road_scenario(ScenarioConfig{});
  EXPECT_EQ(s.attacker_offset, Vec2(-1.0, 0.0));
  EXPECT_DOUBLE_EQ((s.attacker.position - s.legit.position).norm(), 1.0);
  EXPECT_EQ(s.legit.position, Vec2(1.0, 10.0));
}

TEST(Scenario, RejectsBadDimensions) {
  ScenarioConfig c;
  c.rsu_spacing = 0.0;
  EXPECT_THROW(build_road_scenario(c), InvalidArgument);
  c = ScenarioConfig{};
  c.road_length = -1.0;
  EXPECT_THROW(build_road_scenario(c), InvalidArgument);
  c = ScenarioConfig{};
  c.rsu_range_limit = 0.0;
  EXPECT_THROW(build_road_scenario(c), InvalidArgument);
}

TEST(Scenario, RsuLayoutIsPureFunctionOfGeometry) {
  const Scenario a = build_road_scenario(ScenarioConfig{});
  const Scenario b = build_road_scenario(ScenarioConfig{});
  ASSERT_EQ(a.rsus.size(), b.rsus.size());
  for (std::size_t i = 0; i < a.rsus.size(); ++i) {
    EXPECT_EQ(a.rsus[i].id, b.rsus[i].id);
    EXPECT_EQ(a.rsus[i].position, b.rsus[i].position);
  }
}

TEST(StepVehicle, ConstantVelocity) {
  VehicleState s{Vec2(1.0, 10.0), 1.0, Vec2(1.0, 0.0), 0};
  const VehicleState n = step_vehicle(s, 1.0);
  EXPECT_EQ(n.position, Vec2(2.0, 10.0));
  EXPECT_EQ(n.slot_index, 1);
  EXPECT_EQ(n.speed, 1.0);
  EXPECT_EQ(n.heading, s.heading);
}

TEST(StepVehicle, ZeroSpeedHolds) {
  VehicleState s{Vec2(5.0, 3.0), 0.0, Vec2(0.0, 1.0), 4};
  EXPECT_EQ(step_vehicle(s, 2.5).position, s.position);
}

TEST(StepVehicle, MaxSpeedDisplacement) {
  const double h = std::sqrt(0.5);
  VehicleState s{Vec2(0.0, 0.0), 33.0, Vec2(h, h), 0};
  EXPECT_NEAR((step_vehicle(s, 1.0).position - s.position).norm(), 33.0, 1e-12);
}

TEST(StepVehicle, RejectsInvalidState) {
  VehicleState s{Vec2(0.0, 0.0), 1.0, Vec2(1.0, 0.0), 0};
  EXPECT_THROW(step_vehicle(s, 0.0), InvalidArgument);
  s.speed = 34.0;
  EXPECT_THROW(step_vehicle(s, 1.0), InvalidArgument);
  s.speed = 1.0;
  s.heading = Vec2(1.0, 1.0);
  EXPECT_THROW(step_vehicle(s, 1.0), InvalidArgument);
}

TEST(SelectRsus, MatchesExhaustiveScan) {
  const Scenario s = build_road_scenario(ScenarioConfig{});
  const Vec2 tx(300.0, 10.0);
  const auto picked = select_rsus(s, tx, 3);
  const auto expected = oracle::in_range_sorted(s.rsus, tx, s.rsu_range_limit);
  ASSERT_EQ(picked.size(), 3u);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(picked[j].id, expected[j].id);
  EXPECT_NEAR((picked[0].position - tx).norm(), 10.0, 1e-12);
  EXPECT_NEAR((picked[1].position - tx).norm(), 10.0, 1e-12);
  EXPECT_LT((picked[2].position - tx).norm(), 400.0);
}

TEST(SelectRsus, TieGoesToLowerId) {
  const std::vector<Rsu> rsus{{7, Vec2(0.0, 5.0)}, {3, Vec2(0.0, -5.0)}, {5, Vec2(100.0, 0.0)}};
  const auto picked = select_rsus(rsus, 400.0, Vec2(0.0, 0.0), 3);
  EXPECT_EQ(picked[0].id, 3);
  EXPECT_EQ(picked[1].id, 7);
  EXPECT_EQ(picked[2].id, 5);
}

TEST(SelectRsus, TwoInRangeIsInsufficient) {
  const std::vector<Rsu> rsus{{0, Vec2(0.0, 0.0)}, {1, Vec2(10.0, 0.0)}, {2, Vec2(900.0, 0.0)}};
  EXPECT_THROW(select_rsus(rsus, 400.0, Vec2(5.0, 0.0), 3), InsufficientCoverage);
}

TEST(SelectRsus, RangeLimitIsStrict) {
  const std::vector<Rsu> rsus{{0, Vec2(0.0, 0.0)}, {1, Vec2(10.0, 0.0)}, {2, Vec2(400.0, 0.0)}};
  EXPECT_THROW(select_rsus(rsus, 400.0, Vec2(0.0, 0.0), 3), InsufficientCoverage);
}

TEST(SelectRsus, PropertyDistancesSortedAndInRange) {
  const Scenario s = build_road_scenario(ScenarioConfig{});
  RandomStream rng(42);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec2 tx(uniform(rng, 0.0, 3000.0), uniform(rng, 0.0, 20.0));
    const auto picked = select_rsus(s, tx, 3);
    const auto expected = oracle::in_range_sorted(s.rsus, tx, s.rsu_range_limit);
    double last = 0.0;
    for (std::size_t j = 0; j < picked.size(); ++j) {
      const double d = (picked[j].position - tx).norm();
      EXPECT_LT(d, s.rsu_range_limit);
      EXPECT_GE(d, last);
      EXPECT_EQ(picked[j].id, expected[j].id);
      last = d;
    }
  }
}

TEST(AttackerStep, AddsOffsetAndCopiesMotion) {
  Scenario s = build_road_scenario(ScenarioConfig{});
  s.legit.position = Vec2(5.0, 10.0);
  const VehicleState a = attacker_step(s);
  EXPECT_EQ(a.position, Vec2(4.0, 10.0));
  EXPECT_EQ(a.speed, s.legit.speed);
  EXPECT_EQ(a.heading, s.legit.heading);
}

TEST(AttackerStep, ZeroOffsetCoincides) {
  Scenario s = build_road_scenario(ScenarioConfig{});
  s.attacker_offset = Vec2::Zero();
  EXPECT_EQ(attacker_step(s).position, s.legit.position);
}

TEST(AttackerStep, SeparationConstantAlongTrajectory) {
  Scenario s = build_road_scenario(ScenarioConfig{});
  for (int k = 0; k < 200; ++k) {
    s.legit = step_vehicle(s.legit, 1.0);
    s.attacker = attacker_step(s);
    EXPECT_DOUBLE_EQ((s.attacker.position - s.legit.position).norm(), 1.0);
  }
  EXPECT_EQ(s.legit.position, Vec2(201.0, 10.0));
}
