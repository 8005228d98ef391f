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

// State-lattice planner: terminal states a fixed distance ahead in the
// current (or adjacent) lane, each reached by a quintic lateral profile with
// constant longitudinal speed.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wmdrive/dynamics.hpp"
#include "wmdrive/trajectory.hpp"
#include "wmdrive/worldmap.hpp"

namespace wmdrive::planning {

using dynamics::VehicleState;
using worldmap::LanePoint;
using worldmap::MapGraph;

struct BoundaryState {
  double position = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

/// p(t) = sum c[i] t^i on [0, duration].
struct QuinticCoeffs {
  std::array<double, 6> c{};
  double duration = 0.0;
};

/// Unique quintic matching position, velocity and acceleration at 0 and T.
inline QuinticCoeffs quintic_fit(const BoundaryState& start, const BoundaryState& end, double T) {
  if (!(T > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "quintic_fit needs T > 0");
  }
  const double T2 = T * T;
  const double T3 = T2 * T;
  // Residuals the cubic-and-up terms must absorb.
  const double h = end.position - (start.position + start.velocity * T + 0.5 * start.acceleration * T2);
  const double dv = end.velocity - (start.velocity + start.acceleration * T);
  const double da = end.acceleration - start.acceleration;
  QuinticCoeffs q;
  q.duration = T;
  q.c[0] = start.position;
  q.c[1] = start.velocity;
  q.c[2] = 0.5 * start.acceleration;
  q.c[3] = (10.0 * h - 4.0 * dv * T + 0.5 * da * T2) / T3;
  q.c[4] = (-15.0 * h + 7.0 * dv * T - da * T2) / (T3 * T);
  q.c[5] = (6.0 * h - 3.0 * dv * T + 0.5 * da * T2) / (T3 * T2);
  return q;
}

inline BoundaryState quintic_eval(const QuinticCoeffs& q, double t) {
  constexpr double kSlack = 1e-12;
  if (t < -kSlack || t > q.duration + kSlack) {
    throw Error(ErrorKind::out_of_range, "quintic_eval outside [0, T]");
  }
  const auto& c = q.c;
  BoundaryState s;
  s.position = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  s.velocity = c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
  s.acceleration = 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
  return s;
}

enum class ColorTag { red, green, blue };

inline const char* to_string(ColorTag c) {
  switch (c) {
    case ColorTag::red: return "red";
    case ColorTag::green: return "green";
    case ColorTag::blue: return "blue";
  }
  return "unknown";
}

inline Rgb color_of(ColorTag c) {
  switch (c) {
    case ColorTag::red: return {220, 30, 30};
    case ColorTag::green: return {30, 200, 40};
    case ColorTag::blue: return {40, 80, 230};
  }
  return {};
}

struct PlanConfig {
  double lookahead = 20.0;
  std::vector<double> lateral_offsets{-1.2, 0.0, 1.2};
  double horizon = 3.0;  // used when the ego is (nearly) stopped
  bool include_adjacent = false;
  double w_lat = 1.0;
  double w_dev = 0.5;
  double ego_length = 4.5;
  double ego_width = 1.8;
  double sample_dt = 0.05;
};

struct LatticeTarget {
  LanePoint lane_point;       // point on the target lane, lookahead ahead
  double lateral_offset = 0;  // offset from that lane's centerline
  Pose2 pose;                 // offset applied; heading = lane heading
  double speed = 0.0;
  double ego_lane_lateral = 0.0;  // same pose, lateral in the ego lane frame
};

/// Ego lane and its station; throws when the map is empty.
inline LanePoint ego_station(const MapGraph& map, const VehicleState& ego) {
  return worldmap::localize(map, ego.pose);
}

inline std::vector<LatticeTarget> lattice_targets(const MapGraph& map, const VehicleState& ego,
                                                  const PlanConfig& cfg) {
  const LanePoint base = ego_station(map, ego);
  LanePoint ahead;
  try {
    ahead = worldmap::advance_along_lane(map, base, cfg.lookahead);
  } catch (const Error& e) {
    throw Error(ErrorKind::out_of_range, std::string("lane graph too short for lattice: ") + e.what());
  }
  std::vector<LanePoint> lanes{ahead};
  if (cfg.include_adjacent) {
    const auto& seg = map.segment(ahead.lane_id);
    for (const auto& adj : {seg.adjacent_left, seg.adjacent_right}) {
      if (adj) {
        lanes.push_back(worldmap::project_onto_lane(map.segment(*adj), ahead.pose.position()));
      }
    }
  }
  std::vector<LatticeTarget> out;
  for (const auto& lp : lanes) {
    for (double offset : cfg.lateral_offsets) {
      LatticeTarget t;
      t.lane_point = lp;
      t.lateral_offset = offset;
      const Vec2 p = lp.pose.position() + left_normal(lp.pose.heading) * offset;
      t.pose = {p.x, p.y, lp.pose.heading};
      t.speed = ego.speed;
      t.ego_lane_lateral = to_local(ahead.pose, p).y;
      out.push_back(t);
    }
  }
  return out;
}

struct Footprint {
  double length = 4.5;
  double width = 1.8;
};

/// Oriented-box test of the ego footprint against every obstacle, sampled
/// every 0.1 s plus the final instant.
inline bool collision_check(const Trajectory& traj, std::span<const OrientedBox> obstacles,
                            const Footprint& ego) {
  if (obstacles.empty() || traj.empty()) {
    return false;
  }
  for (double t : sample_times(traj.duration(), 0.1)) {
    const auto s = traj.sample_at(t);
    const OrientedBox box{{s.pose.x, s.pose.y}, s.pose.heading, ego.length, ego.width};
    for (const auto& ob : obstacles) {
      if (intersects(box, ob)) {
        return true;
      }
    }
  }
  return false;
}

struct PlanCandidate {
  Trajectory trajectory;
  LatticeTarget target;
  double cost = 0.0;
  bool collides = false;
  std::optional<ColorTag> color_tag;  // assigned for three-candidate sets
};

/// Ranked candidates; `feasible()` is false when every candidate collides.
struct PlanResult {
  std::vector<PlanCandidate> ranked;

  bool feasible() const { return !ranked.empty() && !ranked.front().collides; }
  const PlanCandidate* best() const { return feasible() ? &ranked.front() : nullptr; }
};

/// Builds one quintic candidate per lattice target, collision-checks it and
/// ranks: non-colliding first, then by cost, then smallest |offset|, then leftmost.
inline PlanResult plan(const MapGraph& map, const VehicleState& ego,
                       std::span<const OrientedBox> obstacles, const PlanConfig& cfg) {
  const auto targets = lattice_targets(map, ego, cfg);
  if (targets.empty()) {
    throw Error(ErrorKind::invalid_argument, "plan needs at least one lattice target");
  }
  const auto m = worldmap::nearest_sample_point(map, ego.pose);
  const LanePoint base = ego_station(map, ego);
  const double heading_error = normalize_angle(ego.pose.heading - base.pose.heading);
  const double T = ego.speed > 0.1 ? cfg.lookahead / ego.speed : cfg.horizon;
  const double v_long = cfg.lookahead / T;

  PlanResult result;
  for (const auto& target : targets) {
    const auto q = quintic_fit({m.lateral_offset, v_long * std::sin(heading_error), 0.0},
                               {target.ego_lane_lateral, 0.0, 0.0}, T);
    std::vector<TrajectorySample> samples;
    double abs_sum = 0.0;
    for (double t : sample_times(T, cfg.sample_dt)) {
      const auto lat = quintic_eval(q, t);
      const LanePoint lp = worldmap::advance_along_lane(map, base, v_long * t);
      const Vec2 p = lp.pose.position() + left_normal(lp.pose.heading) * lat.position;
      const double heading = normalize_angle(lp.pose.heading + std::atan2(lat.velocity, v_long));
      samples.push_back({t, {p.x, p.y, 0.0, heading}, std::hypot(v_long, lat.velocity)});
      abs_sum += std::abs(lat.position);
    }
    PlanCandidate c;
    c.cost = cfg.w_lat * std::abs(target.ego_lane_lateral) +
             cfg.w_dev * abs_sum / static_cast<double>(samples.size());
    c.trajectory = Trajectory(std::move(samples));
    c.target = target;
    c.collides = collision_check(c.trajectory, obstacles, {cfg.ego_length, cfg.ego_width});
    result.ranked.push_back(std::move(c));
  }

  if (result.ranked.size() == 3) {
    std::array<std::size_t, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return result.ranked[a].target.ego_lane_lateral > result.ranked[b].target.ego_lane_lateral;
    });
    result.ranked[order[0]].color_tag = ColorTag::blue;
    result.ranked[order[1]].color_tag = ColorTag::green;
    result.ranked[order[2]].color_tag = ColorTag::red;
  }

  std::stable_sort(result.ranked.begin(), result.ranked.end(),
                   [](const PlanCandidate& a, const PlanCandidate& b) {
                     if (a.collides != b.collides) return !a.collides;
                     if (a.cost != b.cost) return a.cost < b.cost;
                     const double la = std::abs(a.target.ego_lane_lateral);
                     const double lb = std::abs(b.target.ego_lane_lateral);
                     if (la != lb) return la < lb;
                     return a.target.ego_lane_lateral > b.target.ego_lane_lateral;
                   });
  return result;
}

/// Candidate path as drawn on the road.
struct PlanPolyline {
  ColorTag color = ColorTag::green;
  std::vector<Vec2> points;
  friend bool operator==(const PlanPolyline&, const PlanPolyline&) = default;
};

inline std::vector<PlanPolyline> plan_polylines(const PlanResult& result) {
  std::vector<PlanPolyline> out;
  for (const auto& c : result.ranked) {
    if (!c.color_tag) continue;
    PlanPolyline pl;
    pl.color = *c.color_tag;
    for (const auto& s : c.trajectory.samples()) {
      pl.points.push_back({s.pose.x, s.pose.y});
    }
    out.push_back(std::move(pl));
  }
  std::sort(out.begin(), out.end(),
            [](const PlanPolyline& a, const PlanPolyline& b) { return a.color < b.color; });
  return out;
}

}  // namespace wmdrive::planning
