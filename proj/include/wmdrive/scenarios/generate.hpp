// Copyright 2026 The wmdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "wmdrive/actors.hpp"
#include "wmdrive/control.hpp"
#include "wmdrive/dynamics.hpp"
#include "wmdrive/planning.hpp"
#include "wmdrive/scenarios/run.hpp"
#include "wmdrive/scenarios/spec.hpp"

namespace wmdrive::scenarios {

struct GeneratedScenario {
  SimulationRun run;
  GroundTruth truth;
};

/// Map sample spacing for every generated road (m).
inline constexpr double kMapSpacing = 1.0;
/// Neighbouring lanes on every generated road: one left, one right.
inline constexpr int kAdjacentLanes = 2;

// Planning obstacle layout in the ego-lane frame (m).
inline constexpr double kPlanObstacleAlong = 19.0;
inline constexpr double kPlanObstacleAlongJitter = 0.5;
inline constexpr double kPlanObstacleLateralJitter = 0.1;
inline constexpr double kPlanClearLateral = 3.2;   // config 2, in the right neighbour lane
inline constexpr double kPlanBlockLateral = 0.9;   // configs 3 and 4

namespace detail {

using actors::Actor;
using actors::ActorKind;
using dynamics::TimedState;
using dynamics::VehicleState;
using worldmap::MapGraph;

inline VehicleState state_on_lane(const MapGraph& map, const worldmap::LaneId& lane, double station,
                                  double speed) {
  const auto lp = worldmap::point_at(map.segment(lane), station);
  return {lp.pose, speed, 0.0};
}

inline std::vector<TimedState> drive_constant(const VehicleState& start, double speed, double duration) {
  const dynamics::VehicleParams params;
  return dynamics::simulate(start, duration, dynamics::kInternalDt,
                            [&](const VehicleState& s, double, double dt) {
                              return dynamics::step_integrated(s, params, {speed, 0.0}, dt);
                            });
}

inline const ActorKind& pick(std::mt19937_64& rng, const std::vector<const ActorKind*>& kinds) {
  if (kinds.empty()) {
    throw Error(ErrorKind::generation, "actor catalog lacks a required category");
  }
  return *kinds[rng() % kinds.size()];
}

inline Actor straight_mover(const std::string& id, const ActorKind& kind, const MapGraph& map,
                            const worldmap::LaneId& lane, double station, double speed, double duration) {
  const auto& seg = map.segment(lane);
  const auto a = worldmap::point_at(seg, station).pose;
  const auto b = worldmap::point_at(seg, station + speed * duration).pose;
  if (station + speed * duration > seg.length()) {
    throw Error(ErrorKind::generation, "lane too short for actor " + id);
  }
  return {id, kind,
          actors::TrajectoryMotion{actors::spline_trajectory(Pose3::from(a), Pose3::from(b), duration,
                                                             actors::SpeedProfile::uniform)}};
}

struct TrafficVehicle {
  std::string id;
  ActorKind kind;
  actors::ControlledMotion motion;
};

inline actors::ControlledMotion controlled(const VehicleState& s, double desired_speed,
                                          const control::PidGains& gains) {
  actors::ControlledMotion m;
  m.state = s;
  m.follower.gains = gains;
  m.idm.desired_speed = desired_speed;
  return m;
}

/// Steps the ego and every traffic vehicle on one world snapshot per tick.
inline std::pair<std::vector<TimedState>, std::vector<Actor>> run_traffic(
    const MapGraph& map, actors::ControlledMotion ego, std::vector<TrafficVehicle> vehicles,
    double duration) {
  const double dt = dynamics::kInternalDt;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  std::vector<TimedState> ego_log{{0.0, ego.state}};
  std::vector<std::vector<TrajectorySample>> logs(vehicles.size());
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    const auto& s = vehicles[i].motion.state;
    logs[i].push_back({0.0, Pose3::from(s.pose), s.speed});
  }
  constexpr double kEgoLength = 4.5;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<control::TrafficParticipant> snapshot;
    snapshot.push_back({"ego", ego.state.pose, ego.state.speed, kEgoLength, 1.8});
    for (const auto& v : vehicles) {
      snapshot.push_back({v.id, v.motion.state.pose, v.motion.state.speed, v.kind.length, v.kind.width});
    }
    ego = actors::step_controlled(ego, "ego", kEgoLength, map, snapshot, dt);
    for (auto& v : vehicles) {
      v.motion = actors::step_controlled(v.motion, v.id, v.kind.length, map, snapshot, dt);
    }
    const double t = static_cast<double>(k + 1) * dt;
    ego_log.push_back({t, ego.state});
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      const auto& s = vehicles[i].motion.state;
      logs[i].push_back({t, Pose3::from(s.pose), s.speed});
    }
  }
  std::vector<Actor> out;
  for (std::size_t i = 0; i < vehicles.size(); ++i) {
    out.push_back({vehicles[i].id, vehicles[i].kind, actors::TrajectoryMotion{Trajectory(std::move(logs[i]))}});
  }
  return {std::move(ego_log), std::move(out)};
}

/// IDM equilibrium gap for a follower cruising at v behind a leader at v.
inline double equilibrium_gap(const control::IdmParams& p, double v) {
  const double s_star = p.min_gap + v * p.time_headway;
  return s_star / std::sqrt(1.0 - std::pow(v / p.desired_speed, p.exponent));
}

}  // namespace detail

/// Deterministic rollout plus label for one scenario.
inline GeneratedScenario generate(const ScenarioSpec& spec, const ScenarioConstants& k = {},
                                  const actors::ActorCatalog& catalog = actors::default_catalog()) {
  using namespace detail;
  using actors::ActorCategory;
  using worldmap::TurnSide;
  validate_spec(spec);
  std::mt19937_64 rng(spec.seed);
  const double duration = rollout_duration(spec.frame_counts);
  const double jitter = uniform(rng, 0.0, 10.0);
  const double w = k.lane_width;
  const auto lane_c = worldmap::primary_lane(0);
  const auto lane_l = worldmap::lane_id("l1", 0);
  const auto lane_r = worldmap::lane_id("r1", 0);

  GeneratedScenario g;
  g.truth = label_for(spec.params);
  SimulationRun& run = g.run;
  run.duration = duration;

  switch (spec.category) {
    case Category::forward_backward: {
      const auto& p = std::get<ForwardBackwardParams>(spec.params);
      const double v = p.level == Level::high ? k.fb_speed_high : k.fb_speed_low;
      const bool fwd = p.direction == Direction::forward;
      run.map = worldmap::build_straight_map(300.0, w, kAdjacentLanes, kMapSpacing);
      const double start = (fwd ? 30.0 : 40.0 + v * duration) + jitter;
      run.ego = drive_constant(state_on_lane(run.map, lane_c, start, fwd ? v : -v), fwd ? v : -v, duration);
      break;
    }
    case Category::accel_decel: {
      const auto& p = std::get<AccelDecelParams>(spec.params);
      const bool up = p.rate == Rate::accel;
      const double a = up ? (p.level == Level::high ? k.accel_high : k.accel_low)
                          : -(p.level == Level::high ? k.decel_high : k.decel_low);
      const double v0 = up ? k.accel_start_speed : k.decel_start_speed;
      if (!up && v0 + a * duration <= 0.0) {
        throw Error(ErrorKind::generation, "deceleration would stop the ego inside the rollout");
      }
      run.map = worldmap::build_straight_map(300.0, w, kAdjacentLanes, kMapSpacing);
      const dynamics::VehicleParams params;
      run.ego = dynamics::simulate(state_on_lane(run.map, lane_c, 30.0 + jitter, v0), duration,
                                   dynamics::kInternalDt, [&](const VehicleState& s, double, double dt) {
                                     return dynamics::step_bicycle(s, params, {a, 0.0}, dt);
                                   });
      break;
    }
    case Category::left_right: {
      const auto& p = std::get<LeftRightParams>(spec.params);
      const double radius = p.curvature == Level::high ? k.radius_high : k.radius_low;
      const double sweep = std::min(kPi, 120.0 / radius);
      run.map = worldmap::build_composite_map(
          {worldmap::StraightPiece{40.0}, worldmap::ArcPiece{radius, sweep, p.side}, worldmap::StraightPiece{60.0}},
          w, kAdjacentLanes, kMapSpacing);
      const auto arc_lane = worldmap::primary_lane(1);
      if (1.0 + 0.3 * jitter + k.turn_speed * duration > run.map.segment(arc_lane).length()) {
        throw Error(ErrorKind::generation, "arc too short for the turn rollout");
      }
      const dynamics::VehicleParams params;
      VehicleState s0 = state_on_lane(run.map, arc_lane, 1.0 + 0.3 * jitter, k.turn_speed);
      s0.steering_angle = std::atan(params.wheelbase * (p.side == TurnSide::left ? 1.0 : -1.0) / radius);
      control::PathFollower follower{k.steering, {}};
      run.ego = dynamics::simulate(s0, duration, dynamics::kInternalDt,
                                   [&](const VehicleState& s, double, double dt) {
                                     const double steer = follower.steer(s, run.map, params, dt);
                                     return dynamics::step_integrated(s, params, {k.turn_speed, steer}, dt);
                                   });
      break;
    }
    case Category::traffic: {
      const auto& p = std::get<TrafficParams>(spec.params);
      const auto& t = k.traffic;
      run.map = worldmap::build_straight_map(500.0, w, kAdjacentLanes, kMapSpacing);
      const auto vehicles_kinds = catalog.of_category(ActorCategory::vehicle);
      const double ego_station = 30.0 + jitter;
      std::vector<TrafficVehicle> vehicles;
      double ego_speed = k.speed_limit;
      auto add = [&](const worldmap::LaneId& lane, double station, double speed, double v0) {
        const auto& kind = pick(rng, vehicles_kinds);
        vehicles.push_back({"vehicle_" + std::to_string(vehicles.size()), kind,
                            controlled(state_on_lane(run.map, lane, station, speed), v0, k.steering)});
      };
      if (p.level == 1) {
        for (int i = 0; i < t.adjacent_vehicles; ++i) {
          add(lane_l, ego_station - 10.0 + 25.0 * i + uniform(rng, 0.0, 5.0), t.adjacent_speed, t.adjacent_speed);
        }
      } else if (p.level == 2) {
        add(lane_c, ego_station + t.lead_gap, t.lead_speed, t.lead_speed);
      } else {
        const int count = p.level == 3 ? t.platoon3_count : t.platoon4_count;
        const double v = p.level == 3 ? t.platoon3_speed : t.platoon4_speed;
        control::IdmParams follower;
        follower.desired_speed = k.speed_limit;
        ego_speed = v;
        double station = ego_station;
        std::vector<std::pair<double, const ActorKind*>> slots;
        double prev_len = 4.5;  // ego
        for (int i = 0; i < count; ++i) {
          const auto& kind = pick(rng, vehicles_kinds);
          station += equilibrium_gap(follower, v) + 0.5 * prev_len + 0.5 * kind.length;
          prev_len = kind.length;
          const bool leader = i + 1 == count;
          vehicles.push_back({"vehicle_" + std::to_string(i), kind,
                              controlled(state_on_lane(run.map, lane_c, station, v),
                                         leader ? v : k.speed_limit, k.steering)});
        }
      }
      auto ego = controlled(state_on_lane(run.map, lane_c, ego_station, ego_speed), k.speed_limit, k.steering);
      auto [ego_log, actors_out] = run_traffic(run.map, ego, std::move(vehicles), duration);
      run.ego = std::move(ego_log);
      run.actors = std::move(actors_out);
      break;
    }
    case Category::speeding: {
      const auto& p = std::get<SpeedingParams>(spec.params);
      const double v = p.speed_level == SpeedLevel::speeding_high ? k.speeding_high
                       : p.speed_level == SpeedLevel::speeding_low ? k.speeding_low
                       : p.speed_level == SpeedLevel::normal_high  ? k.normal_high
                                                                   : k.normal_low;
      run.map = worldmap::build_straight_map(400.0, w, kAdjacentLanes, kMapSpacing);
      const double ego_station = 30.0 + jitter;
      run.ego = drive_constant(state_on_lane(run.map, lane_c, ego_station, k.speed_limit), k.speed_limit, duration);
      const auto& kind = pick(rng, catalog.of_category(ActorCategory::vehicle));
      run.actors.push_back(
          straight_mover("other", kind, run.map, lane_l, ego_station + 8.0 + uniform(rng, 0.0, 4.0), v, duration));
      break;
    }
    case Category::open_set_object: {
      const auto& p = std::get<OpenSetParams>(spec.params);
      auto base = worldmap::build_straight_map(300.0, w, kAdjacentLanes, kMapSpacing);
      const double ego_station = 30.0 + jitter;
      const double stop_station = ego_station + 40.0;
      const auto stop = worldmap::point_at(base.segment(lane_c), stop_station).pose;
      const double edge = worldmap::road_edge_offset(base, base.segment(lane_c), TurnSide::right);
      const Vec2 light = stop.position() - left_normal(stop.heading) * (edge + 1.0);
      run.map = base.with_anchors({{worldmap::AnchorKind::stop_line, stop, lane_c},
                                   {worldmap::AnchorKind::traffic_light, {light.x, light.y, stop.heading}, lane_c}});
      const auto ego0 = state_on_lane(run.map, lane_c, ego_station, k.open_set_speed);
      run.ego = drive_constant(ego0, k.open_set_speed, duration);

      const ActorCategory cat = p.kind == ObjectClass::animal    ? ActorCategory::animal
                                : p.kind == ObjectClass::barrier ? ActorCategory::barrier
                                                                 : ActorCategory::static_object;
      const auto& kind = pick(rng, catalog.of_category(cat));
      actors::PlacementRule rule;
      rule.along_distance = uniform(rng, 36.0, 42.0);
      rule.margin = 1.0;
      rule.side = (rng() & 1) ? TurnSide::left : TurnSide::right;
      if (!p.on_road) {
        rule.kind = actors::PlacementKind::off_road;
      } else if (p.kind == ObjectClass::static_object && (rng() & 1)) {
        rule.kind = actors::PlacementKind::on_stop_line;
      } else {
        rule.kind = actors::PlacementKind::on_road_ahead;
      }
      Pose3 pose = actors::place_actor(run.map, ego0, rule, kind);
      if (p.kind == ObjectClass::animal) {
        pose.heading = normalize_angle(pose.heading + 0.5 * kPi);  // crossing
        if (!p.on_road) {
          // Keep the turned footprint clear of the road.
          const auto probe = actors::place_actor(run.map, ego0, rule, {kind.name, cat, kind.primitive,
                                                                       kind.width, kind.length, kind.height, kind.color});
          pose.x = probe.x;
          pose.y = probe.y;
        }
      }
      run.actors.push_back({"object", kind, actors::StaticMotion{pose}});
      break;
    }
    case Category::plane: {
      const auto& p = std::get<PlaneParams>(spec.params);
      run.map = worldmap::build_straight_map(420.0, w, kAdjacentLanes, kMapSpacing);
      const auto ego0 = state_on_lane(run.map, lane_c, 60.0 + jitter, k.plane_ego_speed);
      run.ego = drive_constant(ego0, k.plane_ego_speed, duration);
      const auto& kind = pick(rng, catalog.of_category(ActorCategory::plane));
      run.actors.push_back({"plane", kind,
                            actors::TrajectoryMotion{actors::plane_trajectory(
                                p.mode, run.map, ego0, k.plane_cruise_altitude, duration)}});
      break;
    }
    case Category::planning: {
      const auto& p = std::get<PlanningParams>(spec.params);
      run.map = worldmap::build_straight_map(200.0, w, kAdjacentLanes, kMapSpacing);
      const auto ego0 = state_on_lane(run.map, lane_c, 30.0 + jitter, k.planning_speed);
      run.ego = drive_constant(ego0, k.planning_speed, duration);
      const double along = kPlanObstacleAlong + uniform(rng, -kPlanObstacleAlongJitter, kPlanObstacleAlongJitter);
      const double lat_jitter = uniform(rng, -kPlanObstacleLateralJitter, kPlanObstacleLateralJitter);
      if (p.config > 1) {
        const double lateral = p.config == 2 ? -kPlanClearLateral
                               : p.config == 3 ? -kPlanBlockLateral
                                               : kPlanBlockLateral;
        const Vec2 pos = to_world(ego0.pose, {along, lateral + lat_jitter});
        run.actors.push_back({"obstacle", catalog.get("road_block"),
                              actors::StaticMotion{{pos.x, pos.y, 0.0, ego0.pose.heading}}});
      }
      std::vector<OrientedBox> obstacles;
      for (const auto& a : run.actors) obstacles.push_back(a.footprint_at(0.0));
      const auto result = planning::plan(run.map, ego0, obstacles, k.planner);
      run.plans = planning::plan_polylines(result);
      break;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Probes

enum class ProbeVariant { add_barrier_backward, add_reference_vehicle };

NLOHMANN_JSON_SERIALIZE_ENUM(ProbeVariant, {{ProbeVariant::add_barrier_backward, "add_barrier_backward"},
                                            {ProbeVariant::add_reference_vehicle, "add_reference_vehicle"}})

inline constexpr double kProbeBarrierAlong = 12.0;
inline constexpr double kProbeReferenceLead = 15.0;

/// Adds the probe element to a finished rollout; ground truth is unchanged.
inline SimulationRun apply_probe(const ScenarioSpec& spec, const SimulationRun& run, ProbeVariant probe,
                                 const actors::ActorCatalog& catalog = actors::default_catalog()) {
  SimulationRun out = run;
  const auto ego0 = dynamics::state_at(run.ego, 0.0);
  if (probe == ProbeVariant::add_barrier_backward) {
    const auto* p = std::get_if<ForwardBackwardParams>(&spec.params);
    if (!p || p->direction != Direction::backward) {
      throw Error(ErrorKind::invalid_argument, "barrier probe applies to backward scenes only");
    }
    const auto barriers = catalog.of_category(actors::ActorCategory::barrier);
    if (barriers.empty()) throw Error(ErrorKind::generation, "catalog has no barrier");
    const auto& kind = *barriers.front();
    const actors::PlacementRule rule{actors::PlacementKind::on_road_ahead, 0.5, kProbeBarrierAlong};
    const Pose3 pose = actors::place_actor(run.map, ego0, rule, kind);
    out.actors.push_back({"probe_barrier", kind, actors::StaticMotion{pose}});
    return out;
  }
  if (spec.category != Category::speeding) {
    throw Error(ErrorKind::invalid_argument, "reference-vehicle probe applies to speeding scenes only");
  }
  const auto base = worldmap::localize(run.map, ego0.pose);
  const auto& lane = run.map.segment(base.lane_id);
  if (!lane.adjacent_right) {
    throw Error(ErrorKind::generation, "no neighbouring lane for the reference vehicle");
  }
  const auto& neighbour = run.map.segment(*lane.adjacent_right);
  const double station = worldmap::project_onto_lane(neighbour, ego0.pose.position()).arc_length +
                         kProbeReferenceLead;
  const auto vehicles = catalog.of_category(actors::ActorCategory::vehicle);
  if (vehicles.empty()) throw Error(ErrorKind::generation, "catalog has no vehicle");
  const actors::ActorKind* kind = vehicles.front();
  for (const auto* v : vehicles) {
    if (v->name == "van") kind = v;
  }
  out.actors.push_back(detail::straight_mover("probe_reference", *kind, run.map, neighbour.id, station,
                                              ego0.speed, run.duration));
  return out;
}

}  // namespace wmdrive::scenarios
