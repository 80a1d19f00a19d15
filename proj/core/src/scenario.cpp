#include "posauth/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "posauth/error.hpp"

namespace posauth {

void validate(const VehicleState& state) {
  if (!state.position.allFinite()) {
    throw InvalidArgument("vehicle position is not finite");
  }
  if (!(state.speed >= 0.0 && state.speed <= kMaxVehicleSpeed)) {
    throw InvalidArgument("vehicle speed " + std::to_string(state.speed) +
                          " outside [0, 33] m/s");
  }
  if (std::abs(state.heading.norm() - 1.0) > 1e-9) {
    throw InvalidArgument("vehicle heading must have unit norm");
  }
}

bool within_road(const Scenario& scenario, const Vec2& p) {
  return p.x() >= 0.0 && p.x() <= scenario.road_length && p.y() >= 0.0 &&
         p.y() <= scenario.road_width;
}

Scenario build_road_scenario(const ScenarioConfig& config) {
  if (!(config.road_length > 0.0) || !(config.road_width > 0.0)) {
    throw InvalidArgument("road dimensions must be positive");
  }
  if (!(config.rsu_spacing > 0.0)) {
    throw InvalidArgument("RSU spacing must be positive");
  }
  if (!(config.rsu_range_limit > 0.0)) {
    throw InvalidArgument("RSU range limit must be positive");
  }

  Scenario s;
  s.road_length = config.road_length;
  s.road_width = config.road_width;
  s.rsu_range_limit = config.rsu_range_limit;

  // Small slack so 3000/300 lands on 10 despite rounding.
  const auto per_side =
      static_cast<int>(std::floor(config.road_length / config.rsu_spacing + 1e-9)) + 1;
  int id = 0;
  for (double y : {0.0, config.road_width}) {
    for (int i = 0; i < per_side; ++i) {
      s.rsus.push_back(Rsu{id++, Vec2(i * config.rsu_spacing, y)});
    }
  }

  s.legit.position = config.legit_start;
  s.legit.speed = config.speed;
  s.legit.heading = config.heading.normalized();
  validate(s.legit);
  if (!within_road(s, s.legit.position)) {
    throw InvalidArgument("legitimate start position lies outside the road");
  }

  s.attacker_offset = config.attacker_start - config.legit_start;
  s.attacker = attacker_step(s);
  if (!within_road(s, s.attacker.position)) {
    throw InvalidArgument("attacker start position lies outside the road");
  }
  return s;
}

VehicleState step_vehicle(const VehicleState& state, double dt) {
  if (!(dt > 0.0)) {
    throw InvalidArgument("time step must be positive");
  }
  validate(state);
  VehicleState next = state;
  next.position = state.position + state.speed * dt * state.heading;
  next.slot_index = state.slot_index + 1;
  return next;
}

std::vector<Rsu> select_rsus(std::span<const Rsu> rsus, double range_limit, const Vec2& tx,
                             std::size_t k) {
  if (k < 3) {
    throw InvalidArgument("at least three RSUs are needed for a 2D fix");
  }
  struct Candidate {
    double distance;
    const Rsu* rsu;
  };
  std::vector<Candidate> in_range;
  for (const Rsu& r : rsus) {
    const double d = (r.position - tx).norm();
    if (d < range_limit) {
      in_range.push_back({d, &r});
    }
  }
  if (in_range.size() < k) {
    throw InsufficientCoverage("only " + std::to_string(in_range.size()) + " RSUs within " +
                               std::to_string(range_limit) + " m, need " + std::to_string(k));
  }
  std::partial_sort(in_range.begin(), in_range.begin() + static_cast<std::ptrdiff_t>(k),
                    in_range.end(), [](const Candidate& a, const Candidate& b) {
                      if (a.distance != b.distance) return a.distance < b.distance;
                      return a.rsu->id < b.rsu->id;
                    });
  std::vector<Rsu> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.push_back(*in_range[i].rsu);
  }
  return out;
}

std::vector<Rsu> select_rsus(const Scenario& scenario, const Vec2& tx, std::size_t k) {
  return select_rsus(scenario.rsus, scenario.rsu_range_limit, tx, k);
}

VehicleState attacker_step(const Scenario& scenario) {
  VehicleState a = scenario.legit;
  a.position = scenario.legit.position + scenario.attacker_offset;
  return a;
}

}  // namespace posauth
