#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace posauth {

using Vec2 = Eigen::Vector2d;

struct Rsu {
  int id = 0;
  Vec2 position = Vec2::Zero();
};

inline constexpr double kMaxVehicleSpeed = 33.0;  // m/s, ~120 km/h

struct VehicleState {
  Vec2 position = Vec2::Zero();
  double speed = 0.0;  // m/s
  Vec2 heading = Vec2::UnitX();
  std::int64_t slot_index = 0;
};

/// Throws InvalidArgument unless speed is in [0, kMaxVehicleSpeed] and the
/// heading has unit norm.
void validate(const VehicleState& state);

/// Road world parameters. Defaults: a
/// 3000 m x 20 m road, RSUs every 300 m on both edges, 400 m LoS limit.
struct ScenarioConfig {
  double road_length = 3000.0;
  double road_width = 20.0;
  double rsu_spacing = 300.0;
  double rsu_range_limit = 400.0;
  Vec2 legit_start{1.0, 10.0};
  Vec2 attacker_start{0.0, 10.0};
  double speed = 1.0;
  Vec2 heading = Vec2::UnitX();
};

struct Scenario {
  double road_length = 0.0;
  double road_width = 0.0;
  std::vector<Rsu> rsus;
  double rsu_range_limit = 0.0;
  VehicleState legit;
  VehicleState attacker;
  Vec2 attacker_offset = Vec2::Zero();
};

/// Places RSUs on both road edges (y = 0 first, then y = width) at
/// x = 0, spacing, 2*spacing, ... <= length. Ids are assigned in that order.
Scenario build_road_scenario(const ScenarioConfig& config);

/// Constant-velocity move; speed and heading are carried over.
VehicleState step_vehicle(const VehicleState& state, double dt);

/// The k nearest RSUs strictly inside range_limit, nearest first, ties
/// broken by lower id. Throws InsufficientCoverage when fewer than k qualify.
std::vector<Rsu> select_rsus(std::span<const Rsu> rsus, double range_limit, const Vec2& tx,
                             std::size_t k);
std::vector<Rsu> select_rsus(const Scenario& scenario, const Vec2& tx, std::size_t k);

/// Attacker state for the current slot: the legitimate vehicle's state
/// shifted by the attacker offset.
VehicleState attacker_step(const Scenario& scenario);

bool within_road(const Scenario& scenario, const Vec2& p);

}  // namespace posauth
