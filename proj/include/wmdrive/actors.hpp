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

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wmdrive/control.hpp"
#include "wmdrive/dynamics.hpp"
#include "wmdrive/trajectory.hpp"
#include "wmdrive/worldmap.hpp"

namespace wmdrive::actors {

using dynamics::VehicleParams;
using dynamics::VehicleState;
using worldmap::MapGraph;

enum class ActorCategory { vehicle, animal, static_object, barrier, plane };
enum class RenderPrimitive { box, billboard, plane_compound };

struct ActorKind {
  std::string name;
  ActorCategory category = ActorCategory::static_object;
  RenderPrimitive primitive = RenderPrimitive::box;
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  Rgb color;
  friend bool operator==(const ActorKind&, const ActorKind&) = default;
};

struct StaticMotion {
  Pose3 pose;
};

struct TrajectoryMotion {
  Trajectory trajectory;
};

/// IDM longitudinal + PID lateral control, advanced by step_bicycle.
struct ControlledMotion {
  VehicleState state;
  VehicleParams params;
  control::IdmParams idm;
  control::PathFollower follower;
};

using Motion = std::variant<StaticMotion, TrajectoryMotion, ControlledMotion>;

struct Actor {
  std::string id;
  ActorKind kind;
  Motion motion;

  /// Pose at time t. Controller-driven actors report their current state.
  Pose3 pose_at(double t) const {
    if (const auto* s = std::get_if<StaticMotion>(&motion)) return s->pose;
    if (const auto* tr = std::get_if<TrajectoryMotion>(&motion)) return tr->trajectory.sample_at(t).pose;
    return Pose3::from(std::get<ControlledMotion>(motion).state.pose);
  }

  double speed_at(double t) const {
    if (std::holds_alternative<StaticMotion>(motion)) return 0.0;
    if (const auto* tr = std::get_if<TrajectoryMotion>(&motion)) return tr->trajectory.sample_at(t).speed;
    return std::get<ControlledMotion>(motion).state.speed;
  }

  OrientedBox footprint_at(double t) const {
    const Pose3 p = pose_at(t);
    return {{p.x, p.y}, p.heading, kind.length, kind.width};
  }

  control::TrafficParticipant participant_at(double t) const {
    const Pose3 p = pose_at(t);
    return {id, p.planar(), speed_at(t), kind.length, kind.width};
  }
};

inline const char* to_string(ActorCategory c) {
  switch (c) {
    case ActorCategory::vehicle: return "vehicle";
    case ActorCategory::animal: return "animal";
    case ActorCategory::static_object: return "static_object";
    case ActorCategory::barrier: return "barrier";
    case ActorCategory::plane: return "plane";
  }
  return "unknown";
}

inline ActorCategory actor_category_from_string(const std::string& s) {
  for (auto c : {ActorCategory::vehicle, ActorCategory::animal, ActorCategory::static_object,
                 ActorCategory::barrier, ActorCategory::plane}) {
    if (s == to_string(c)) return c;
  }
  throw Error(ErrorKind::invalid_argument, "unknown actor category: " + s);
}

inline const char* to_string(RenderPrimitive p) {
  switch (p) {
    case RenderPrimitive::box: return "box";
    case RenderPrimitive::billboard: return "billboard";
    case RenderPrimitive::plane_compound: return "plane_compound";
  }
  return "unknown";
}

inline RenderPrimitive render_primitive_from_string(const std::string& s) {
  for (auto p : {RenderPrimitive::box, RenderPrimitive::billboard, RenderPrimitive::plane_compound}) {
    if (s == to_string(p)) return p;
  }
  throw Error(ErrorKind::invalid_argument, "unknown render primitive: " + s);
}

/// Named actor kinds. Loaded from a JSON asset so new characters need no code.
class ActorCatalog {
 public:
  ActorCatalog() = default;
  explicit ActorCatalog(std::vector<ActorKind> kinds) : kinds_(std::move(kinds)) {
    for (std::size_t i = 0; i < kinds_.size(); ++i) {
      const auto& k = kinds_[i];
      if (k.name.empty() || !(k.length > 0.0) || !(k.width > 0.0) || !(k.height > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "invalid actor kind '" + k.name + "'");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (kinds_[j].name == k.name) {
          throw Error(ErrorKind::invalid_argument, "duplicate actor kind '" + k.name + "'");
        }
      }
    }
  }

  const std::vector<ActorKind>& kinds() const { return kinds_; }

  const ActorKind& get(const std::string& name) const {
    for (const auto& k : kinds_) {
      if (k.name == name) return k;
    }
    throw Error(ErrorKind::not_found, "actor kind '" + name + "' not in catalog");
  }

  std::vector<const ActorKind*> of_category(ActorCategory c) const {
    std::vector<const ActorKind*> out;
    for (const auto& k : kinds_) {
      if (k.category == c) out.push_back(&k);
    }
    return out;
  }

 private:
  std::vector<ActorKind> kinds_;
};

inline ActorCatalog catalog_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != 1) {
      throw Error(ErrorKind::invalid_argument, "unsupported actor catalog format_version");
    }
    std::vector<ActorKind> kinds;
    for (const auto& jk : j.at("kinds")) {
      ActorKind k;
      k.name = jk.at("name").get<std::string>();
      k.category = actor_category_from_string(jk.at("category").get<std::string>());
      k.primitive = render_primitive_from_string(jk.at("primitive").get<std::string>());
      k.length = jk.at("length").get<double>();
      k.width = jk.at("width").get<double>();
      k.height = jk.at("height").get<double>();
      const auto& c = jk.at("color");
      k.color = {c.at(0).get<std::uint8_t>(), c.at(1).get<std::uint8_t>(), c.at(2).get<std::uint8_t>()};
      kinds.push_back(std::move(k));
    }
    return ActorCatalog(std::move(kinds));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed actor catalog: ") + e.what());
  }
}

inline nlohmann::json catalog_to_json(const ActorCatalog& catalog) {
  nlohmann::json kinds = nlohmann::json::array();
  for (const auto& k : catalog.kinds()) {
    kinds.push_back({{"name", k.name},
                     {"category", to_string(k.category)},
                     {"primitive", to_string(k.primitive)},
                     {"length", k.length},
                     {"width", k.width},
                     {"height", k.height},
                     {"color", {k.color.r, k.color.g, k.color.b}}});
  }
  return {{"format_version", 1}, {"kinds", std::move(kinds)}};
}

/// Built-in catalog; assets/actor_catalog.json carries the same content.
inline const ActorCatalog& default_catalog() {
  static const ActorCatalog catalog({
      {"sedan", ActorCategory::vehicle, RenderPrimitive::box, 4.5, 1.8, 1.5, {200, 40, 40}},
      {"hatchback", ActorCategory::vehicle, RenderPrimitive::box, 4.0, 1.75, 1.5, {40, 90, 200}},
      {"van", ActorCategory::vehicle, RenderPrimitive::box, 5.2, 2.0, 2.1, {235, 235, 235}},
      {"deer", ActorCategory::animal, RenderPrimitive::billboard, 1.6, 0.5, 1.4, {150, 100, 50}},
      {"dog", ActorCategory::animal, RenderPrimitive::billboard, 0.9, 0.35, 0.7, {90, 60, 30}},
      {"crate", ActorCategory::static_object, RenderPrimitive::box, 1.2, 1.2, 1.0, {170, 120, 60}},
      {"traffic_cone", ActorCategory::static_object, RenderPrimitive::box, 0.5, 0.5, 0.8, {255, 120, 0}},
      {"road_block", ActorCategory::static_object, RenderPrimitive::box, 1.2, 1.6, 1.0, {255, 200, 0}},
      {"jersey_barrier", ActorCategory::barrier, RenderPrimitive::box, 0.8, 3.0, 0.9, {200, 200, 190}},
      {"airliner", ActorCategory::plane, RenderPrimitive::plane_compound, 36.0, 34.0, 6.0, {240, 240, 245}},
  });
  return catalog;
}

// ---------------------------------------------------------------------------
// Placement

enum class PlacementKind { beside_ego_lane, on_stop_line, under_traffic_light, on_road_ahead, off_road };

struct PlacementRule {
  PlacementKind kind = PlacementKind::on_road_ahead;
  double margin = 0.5;
  double along_distance = 20.0;
  worldmap::TurnSide side = worldmap::TurnSide::right;  // for beside_ego_lane / off_road
};

namespace detail {

inline Pose3 nearest_anchor_ahead(const MapGraph& map, const VehicleState& ego,
                                  worldmap::AnchorKind kind) {
  const worldmap::SemanticAnchor* best = nullptr;
  double best_along = 0.0;
  for (const auto& a : map.anchors()) {
    if (a.kind != kind) continue;
    const double along = to_local(ego.pose, a.pose.position()).x;
    const bool better = !best || (along > 0.0 && (best_along <= 0.0 || along < best_along)) ||
                        (along <= 0.0 && best_along <= 0.0 && along > best_along);
    if (better) {
      best = &a;
      best_along = along;
    }
  }
  if (!best) {
    throw Error(ErrorKind::not_found,
                std::string("placement needs a ") + worldmap::to_string(kind) + " anchor");
  }
  return Pose3::from(best->pose);
}

inline worldmap::LanePoint point_ahead(const MapGraph& map, const VehicleState& ego, double along) {
  const auto base = worldmap::localize(map, ego.pose);
  try {
    return worldmap::advance_along_lane(map, base, std::max(along, 0.0));
  } catch (const Error& e) {
    throw Error(ErrorKind::out_of_range, std::string("placement distance unreachable: ") + e.what());
  }
}

}  // namespace detail

/// True when any lane polygon shares area with the footprint.
inline bool footprint_on_road(const MapGraph& map, const OrientedBox& box) {
  for (const auto& seg : map.segments()) {
    const auto poly = worldmap::lane_polygon(seg);
    if (box_overlaps_polygon(box, poly)) return true;
  }
  return false;
}

inline Pose3 place_actor(const MapGraph& map, const VehicleState& ego, const PlacementRule& rule,
                         const ActorKind& kind) {
  using worldmap::TurnSide;
  const double side_sign = rule.side == TurnSide::left ? 1.0 : -1.0;
  switch (rule.kind) {
    case PlacementKind::on_stop_line:
      return detail::nearest_anchor_ahead(map, ego, worldmap::AnchorKind::stop_line);
    case PlacementKind::under_traffic_light:
      return detail::nearest_anchor_ahead(map, ego, worldmap::AnchorKind::traffic_light);
    case PlacementKind::on_road_ahead:
      return Pose3::from(detail::point_ahead(map, ego, rule.along_distance).pose);
    case PlacementKind::beside_ego_lane: {
      const auto lp = detail::point_ahead(map, ego, rule.along_distance);
      const double w = map.segment(lp.lane_id).width;
      const double lateral = side_sign * (0.5 * w + rule.margin + 0.5 * kind.width);
      const Vec2 p = lp.pose.position() + left_normal(lp.pose.heading) * lateral;
      return {p.x, p.y, 0.0, lp.pose.heading};
    }
    case PlacementKind::off_road: {
      const auto lp = detail::point_ahead(map, ego, rule.along_distance);
      const double edge = worldmap::road_edge_offset(map, map.segment(lp.lane_id), rule.side);
      for (int attempt = 0; attempt < 40; ++attempt) {
        const double lateral = side_sign * (edge + rule.margin + 0.5 * kind.width + 0.5 * attempt);
        const Vec2 p = lp.pose.position() + left_normal(lp.pose.heading) * lateral;
        const OrientedBox box{p, lp.pose.heading, kind.length, kind.width};
        if (!footprint_on_road(map, box)) {
          return {p.x, p.y, 0.0, lp.pose.heading};
        }
      }
      throw Error(ErrorKind::out_of_range, "no off-road position found");
    }
  }
  throw Error(ErrorKind::invalid_argument, "unknown placement rule");
}

// ---------------------------------------------------------------------------
// Trajectories

enum class SpeedProfile { uniform, ease };

/// Trajectory sampling step (s).
inline constexpr double kTrajectoryDt = 0.01;

/// Cubic Hermite in position with tangents along the endpoint headings
/// (magnitude = endpoint distance), re-timed by arc length.
inline Trajectory spline_trajectory(const Pose3& start, const Pose3& end, double duration,
                                    SpeedProfile profile) {
  if (!(duration > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "spline_trajectory needs a positive duration");
  }
  const Vec2 p0{start.x, start.y};
  const Vec2 p1{end.x, end.y};
  const double D = distance(p0, p1);
  const Vec2 m0 = unit_from_heading(start.heading) * D;
  const Vec2 m1 = unit_from_heading(end.heading) * D;

  auto position = [&](double u) {
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * p1 +
           (u3 - u2) * m1;
  };
  auto tangent = [&](double u) {
    const double u2 = u * u;
    return (6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0 + (-6 * u2 + 6 * u) * p1 +
           (3 * u2 - 2 * u) * m1;
  };
  auto fraction = [&](double x) { return profile == SpeedProfile::uniform ? x : x * x * (3 - 2 * x); };
  auto fraction_rate = [&](double x) { return profile == SpeedProfile::uniform ? 1.0 : 6 * x * (1 - x); };

  constexpr int kTable = 4096;
  std::vector<double> arc(kTable + 1, 0.0);
  if (D > 0.0) {
    Vec2 prev = position(0.0);
    for (int i = 1; i <= kTable; ++i) {
      const Vec2 cur = position(static_cast<double>(i) / kTable);
      arc[i] = arc[i - 1] + distance(prev, cur);
      prev = cur;
    }
  }
  const double total = arc.back();

  std::vector<TrajectorySample> samples;
  const auto times = sample_times(duration, kTrajectoryDt);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    const double x = t / duration;
    const double f = fraction(x);
    TrajectorySample s;
    s.time = t;
    s.pose.z = start.z + f * (end.z - start.z);
    s.speed = total * fraction_rate(x) / duration;
    if (k == 0) {
      s.pose = start;
    } else if (k + 1 == times.size()) {
      s.pose = end;
    } else if (D == 0.0) {
      s.pose = {start.x, start.y, s.pose.z, start.heading};
    } else {
      const double target = f * total;
      auto it = std::lower_bound(arc.begin(), arc.end(), target);
      const auto i = std::clamp<std::ptrdiff_t>(it - arc.begin(), 1, kTable);
      const double seg = arc[i] - arc[i - 1];
      const double w = seg > 0.0 ? (target - arc[i - 1]) / seg : 0.0;
      const double u = (static_cast<double>(i - 1) + w) / kTable;
      const Vec2 p = position(u);
      const Vec2 d = tangent(u);
      s.pose.x = p.x;
      s.pose.y = p.y;
      s.pose.heading = norm(d) > 0.0 ? std::atan2(d.y, d.x) : start.heading;
    }
    samples.push_back(s);
  }
  return Trajectory(std::move(samples));
}

/// IDM + PID step for a controller-driven vehicle. `others` may include the
/// actor itself; it is skipped by id.
inline ControlledMotion step_controlled(const ControlledMotion& motion, const std::string& self_id,
                                        double self_length, const MapGraph& map,
                                        std::span<const control::TrafficParticipant> others,
                                        double dt) {
  std::vector<control::TrafficParticipant> field;
  field.reserve(others.size());
  for (const auto& o : others) {
    if (o.id != self_id) field.push_back(o);
  }
  ControlledMotion next = motion;
  const auto lead = control::select_idm_lead(motion.state, map, field, self_length);
  const double accel = control::idm_accel(motion.idm, std::max(motion.state.speed, 0.0), lead);
  const double steer_target = next.follower.steer(motion.state, map, motion.params, dt);
  const double steer_rate = (steer_target - motion.state.steering_angle) / dt;
  next.state = dynamics::step_bicycle(motion.state, motion.params, {accel, steer_rate}, dt);
  return next;
}

inline Actor step_traffic_vehicle(const Actor& actor, const MapGraph& map,
                                  std::span<const Actor> all_actors, double dt) {
  const auto* cm = std::get_if<ControlledMotion>(&actor.motion);
  if (!cm || actor.kind.category != ActorCategory::vehicle) {
    throw Error(ErrorKind::invalid_argument, "step_traffic_vehicle needs a controller-driven vehicle");
  }
  std::vector<control::TrafficParticipant> field;
  for (const auto& a : all_actors) {
    if (a.id != actor.id) field.push_back(a.participant_at(0.0));
  }
  Actor next = actor;
  next.motion = step_controlled(*cm, actor.id, actor.kind.length, map, field, dt);
  return next;
}

enum class PlaneMode { landing, overhead };

/// Plane path along the ego lane axis. Overhead: constant altitude, flying
/// toward and over the ego. Landing: head-on approach, monotone descent to a
/// touchdown on the ego-lane centerline, then a roll-out that stops ahead of the ego.
inline Trajectory plane_trajectory(PlaneMode mode, const MapGraph& map, const VehicleState& ego,
                                   double cruise_altitude, double duration) {
  if (!(duration > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "plane_trajectory needs a positive duration");
  }
  const auto base = worldmap::localize(map, ego.pose);
  if (mode == PlaneMode::overhead) {
    const Pose2 frame = base.pose;
    const Vec2 a = to_world(frame, {180.0, 0.0});
    const Vec2 b = to_world(frame, {-120.0, 0.0});
    const double heading = normalize_angle(frame.heading + kPi);
    return spline_trajectory({a.x, a.y, cruise_altitude, heading}, {b.x, b.y, cruise_altitude, heading},
                             duration, SpeedProfile::uniform);
  }
  constexpr double kStartAlong = 300.0;
  constexpr double kStopAlong = 90.0;
  const double touchdown_time = 0.7 * duration;
  std::vector<TrajectorySample> samples;
  for (double t : sample_times(duration, kTrajectoryDt)) {
    const double x = t / duration;
    // Ease-out: fast approach, stopping at kStopAlong.
    const double along = kStartAlong - (kStartAlong - kStopAlong) * (1.0 - (1.0 - x) * (1.0 - x));
    const double speed = 2.0 * (kStartAlong - kStopAlong) * (1.0 - x) / duration;
    const double descent = std::min(t / touchdown_time, 1.0);
    const double z = t >= touchdown_time ? 0.0 : cruise_altitude * 0.5 * (1.0 + std::cos(kPi * descent));
    const auto lp = worldmap::advance_along_lane(map, base, along);
    samples.push_back({t, {lp.pose.x, lp.pose.y, z, normalize_angle(lp.pose.heading + kPi)}, speed});
  }
  return Trajectory(std::move(samples));
}

}  // namespace wmdrive::actors
