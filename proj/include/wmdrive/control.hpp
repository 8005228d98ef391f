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

// PID steering for path tracking and IDM longitudinal control.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "wmdrive/dynamics.hpp"
#include "wmdrive/worldmap.hpp"

namespace wmdrive::control {

using dynamics::VehicleParams;
using dynamics::VehicleState;

// ---------------------------------------------------------------------------
// PID

struct PidGains {
  double kp = 0.8;
  double ki = 0.05;
  double kd = 0.3;
  double integral_limit = 1.0;
  /// Time constant (s) of the first-order low-pass on the derivative term;
  /// 0 disables filtering.
  double derivative_filter = 0.1;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
  double filtered_derivative = 0.0;
  bool initialized = false;
};

struct PidOutput {
  double command = 0.0;
  PidState state;
};

inline PidOutput pid_step(const PidState& state, const PidGains& gains, double error, double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "pid_step needs dt > 0");
  }
  PidState next = state;
  const double limit = std::max(gains.integral_limit, 0.0);
  next.integral = std::clamp(state.integral + error * dt, -limit, limit);
  double derivative = 0.0;
  if (state.initialized) {
    const double raw = (error - state.prev_error) / dt;
    if (gains.derivative_filter > 0.0) {
      const double alpha = dt / (gains.derivative_filter + dt);
      derivative = state.filtered_derivative + alpha * (raw - state.filtered_derivative);
    } else {
      derivative = raw;
    }
  }
  next.filtered_derivative = derivative;
  next.prev_error = error;
  next.initialized = true;
  return {gains.kp * error + gains.ki * next.integral + gains.kd * derivative, next};
}

/// Weight (m) of the heading term in the composite tracking error.
inline constexpr double kHeadingErrorWeight = 2.0;

/// Signed lateral offset to the nearest sample plus kHeadingErrorWeight *
/// sin(heading error). Positive when the vehicle sits (or points) left of the lane.
inline double path_tracking_error(const VehicleState& state, const worldmap::MapGraph& map) {
  const auto m = worldmap::nearest_sample_point(map, state.pose);
  const double heading_error = normalize_angle(state.pose.heading - m.point.pose.heading);
  return m.lateral_offset + kHeadingErrorWeight * std::sin(heading_error);
}

/// PID on the tracking error plus a curvature feed-forward, producing a
/// steering-angle target.
struct PathFollower {
  PidGains gains;
  PidState state;

  double steer(const VehicleState& vehicle, const worldmap::MapGraph& map,
               const VehicleParams& params, double dt) {
    const auto m = worldmap::nearest_sample_point(map, vehicle.pose);
    const double heading_error = normalize_angle(vehicle.pose.heading - m.point.pose.heading);
    const double error = m.lateral_offset + kHeadingErrorWeight * std::sin(heading_error);
    const auto out = pid_step(state, gains, error, dt);
    state = out.state;
    const double kappa =
        worldmap::lane_curvature(map.segment(m.point.lane_id), m.point.arc_length);
    const double feed_forward = std::atan(params.wheelbase * kappa);
    return std::clamp(feed_forward - out.command, -params.max_steer, params.max_steer);
  }
};

// ---------------------------------------------------------------------------
// IDM

struct IdmParams {
  double desired_speed = 13.9;
  double time_headway = 1.5;
  double min_gap = 2.0;
  double max_accel = 1.5;
  double comfort_decel = 2.0;
  double exponent = 4.0;
};

struct LeadObservation {
  double gap = 0.0;            // bumper to bumper, > 0
  double approach_rate = 0.0;  // ego speed - lead speed
};

/// a * [1 - (v/v0)^delta - (s*/s)^2], s* floored at s0, result floored at -2b.
inline double idm_accel(const IdmParams& p, double speed, const std::optional<LeadObservation>& lead) {
  if (speed < 0.0) {
    throw Error(ErrorKind::invalid_argument, "idm_accel needs a non-negative speed");
  }
  double acc = 1.0 - std::pow(speed / p.desired_speed, p.exponent);
  if (lead) {
    const double dynamic = speed * p.time_headway +
                           speed * lead->approach_rate / (2.0 * std::sqrt(p.max_accel * p.comfort_decel));
    const double s_star = std::max(p.min_gap, p.min_gap + dynamic);
    const double ratio = s_star / std::max(lead->gap, 1e-6);
    acc -= ratio * ratio;
  }
  return std::max(p.max_accel * acc, -2.0 * p.comfort_decel);
}

/// What a controller sees of another road user.
struct TrafficParticipant {
  std::string id;
  Pose2 pose;
  double speed = 0.0;
  double length = 4.5;
  double width = 1.8;
};

/// How far lead selection looks down the ego lane chain (m).
inline constexpr double kLeadSearchRange = 300.0;

/// Nearest participant ahead in the ego's lane corridor whose heading is
/// within pi/2 of the lane direction. `ego_length` sets the ego bumper.
inline std::optional<LeadObservation> select_idm_lead(const VehicleState& ego,
                                                      const worldmap::MapGraph& map,
                                                      std::span<const TrafficParticipant> actors,
                                                      double ego_length = 4.5) {
  if (actors.empty() || map.empty()) {
    return std::nullopt;
  }
  const auto ego_match = worldmap::nearest_sample_point(map, ego.pose);
  const double ego_station = ego_match.point.arc_length + ego_match.along_offset;

  struct ChainLane {
    const worldmap::LaneSegment* seg;
    double offset;  // station of this lane's start on the chain
  };
  std::vector<ChainLane> chain;
  {
    const worldmap::LaneSegment* seg = &map.segment(ego_match.point.lane_id);
    double offset = 0.0;
    std::set<worldmap::LaneId> seen;
    while (seg && seen.insert(seg->id).second && offset - ego_station < kLeadSearchRange) {
      chain.push_back({seg, offset});
      offset += seg->length();
      seg = seg->successors.empty() ? nullptr : &map.segment(seg->successors.front());
    }
  }

  std::optional<LeadObservation> best;
  for (const auto& a : actors) {
    double best_d2 = std::numeric_limits<double>::infinity();
    worldmap::SampleMatch match;
    double lane_offset = 0.0;
    for (const auto& cl : chain) {
      const auto m = worldmap::nearest_on_lane(*cl.seg, a.pose.position());
      const double d2 = m.lateral_offset * m.lateral_offset + m.along_offset * m.along_offset;
      if (d2 < best_d2) {
        best_d2 = d2;
        match = m;
        lane_offset = cl.offset;
      }
    }
    const double half_width = 0.5 * map.segment(match.point.lane_id).width;
    if (std::abs(match.lateral_offset) > half_width) continue;
    const double heading_diff = normalize_angle(a.pose.heading - match.point.pose.heading);
    if (std::abs(heading_diff) >= 0.5 * kPi) continue;
    const double along = lane_offset + match.point.arc_length + match.along_offset - ego_station;
    if (!(along > 0.0)) continue;
    const double gap = std::max(along - 0.5 * ego_length - 0.5 * a.length, 1e-3);
    if (!best || gap < best->gap) {
      best = LeadObservation{gap, ego.speed - a.speed * std::cos(heading_diff)};
    }
  }
  return best;
}

}  // namespace wmdrive::control
