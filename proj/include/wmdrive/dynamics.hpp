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

// Kinematic bicycle model in three input parameterisations:
//   step_bicycle     acceleration + steering rate
//   step_integrated  speed + steering angle
//   step_direct      pose delta in the vehicle's local frame
//
// Within one step the controls are held constant. Speed follows the exact
// constant-acceleration profile (with saturation), and the pose moves along
// the arc of the start-of-step curvature, so constant-curvature and
// straight-line motion are integrated exactly while time-varying steering is
// first order in dt.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "wmdrive/error.hpp"
#include "wmdrive/geometry.hpp"

namespace wmdrive::dynamics {

/// Fixed internal step used by scenario rollouts.
inline constexpr double kInternalDt = 0.01;

struct VehicleParams {
  double wheelbase = 2.7;
  double max_steer = 0.6;
  double max_accel = 4.0;
  double max_speed = 40.0;
};

struct VehicleState {
  Pose2 pose;
  double speed = 0.0;
  double steering_angle = 0.0;
  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

struct ControlAccelSteerRate {
  double accel = 0.0;
  double steer_rate = 0.0;
};

struct ControlSpeedSteer {
  double speed = 0.0;
  double steering_angle = 0.0;
};

struct PoseDelta {
  double dx = 0.0;
  double dy = 0.0;
  double dheading = 0.0;
};

namespace detail {

inline double sinc(double x) {
  return std::abs(x) < 1e-6 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

/// Moves along a constant-curvature arc; `ds` may be negative.
inline Pose2 advance_arc(const Pose2& p, double ds, double curvature) {
  const double dtheta = curvature * ds;
  const double chord = ds * sinc(0.5 * dtheta);
  const double mid = p.heading + 0.5 * dtheta;
  return {p.x + chord * std::cos(mid), p.y + chord * std::sin(mid),
          normalize_angle(p.heading + dtheta)};
}

/// Distance covered while speed ramps from v0 at `accel` and saturates in [lo, hi].
inline double ramp_distance(double v0, double accel, double dt, double lo, double hi,
                            double& v_end) {
  if (accel == 0.0) {
    v_end = v0;
    return v0 * dt;
  }
  const double bound = accel > 0.0 ? hi : lo;
  const double t_hit = (bound - v0) / accel;
  if (t_hit >= dt) {
    v_end = v0 + accel * dt;
    return v0 * dt + 0.5 * accel * dt * dt;
  }
  const double t = std::max(t_hit, 0.0);
  v_end = bound;
  return v0 * t + 0.5 * accel * t * t + bound * (dt - t);
}

inline void require_positive_dt(double dt) {
  if (!(dt > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "dt must be positive");
  }
}

}  // namespace detail

inline double curvature_of(double steering_angle, const VehicleParams& params) {
  return std::tan(steering_angle) / params.wheelbase;
}

/// Mode (i). Acceleration is clamped to +-max_accel and speed to
/// [0, max_speed] (or [-max_speed, 0] when already reversing); a vehicle
/// braking to zero stops instead of changing direction.
inline VehicleState step_bicycle(const VehicleState& state, const VehicleParams& params,
                                 const ControlAccelSteerRate& u, double dt) {
  detail::require_positive_dt(dt);
  const double accel = std::clamp(u.accel, -params.max_accel, params.max_accel);
  const bool reversing = state.speed < 0.0;
  const double lo = reversing ? -params.max_speed : 0.0;
  const double hi = reversing ? 0.0 : params.max_speed;
  const double v0 = std::clamp(state.speed, lo, hi);
  double v1 = v0;
  const double ds = detail::ramp_distance(v0, accel, dt, lo, hi, v1);

  VehicleState next;
  next.pose = detail::advance_arc(state.pose, ds, curvature_of(state.steering_angle, params));
  next.speed = v1;
  next.steering_angle =
      std::clamp(state.steering_angle + u.steer_rate * dt, -params.max_steer, params.max_steer);
  return next;
}

/// Mode (ii). Speed and steering are set directly (clamped); negative speed
/// drives backwards with unchanged steering geometry.
inline VehicleState step_integrated(const VehicleState& state, const VehicleParams& params,
                                    const ControlSpeedSteer& u, double dt) {
  detail::require_positive_dt(dt);
  VehicleState next;
  next.speed = std::clamp(u.speed, -params.max_speed, params.max_speed);
  next.steering_angle = std::clamp(u.steering_angle, -params.max_steer, params.max_steer);
  next.pose = detail::advance_arc(state.pose, next.speed * dt,
                                  curvature_of(next.steering_angle, params));
  return next;
}

/// Mode (iii). Translate in the current local frame, then rotate.
inline VehicleState step_direct(const VehicleState& state, const PoseDelta& delta) {
  VehicleState next = state;
  const Vec2 p = to_world(state.pose, {delta.dx, delta.dy});
  next.pose = {p.x, p.y, normalize_angle(state.pose.heading + delta.dheading)};
  return next;
}

struct TimedState {
  double time = 0.0;
  VehicleState state;
  friend bool operator==(const TimedState&, const TimedState&) = default;
};

/// Runs `step(state, t, dt)` on a fixed clock, recording every state.
inline std::vector<TimedState> simulate(
    const VehicleState& initial, double duration, double dt,
    const std::function<VehicleState(const VehicleState&, double, double)>& step) {
  detail::require_positive_dt(dt);
  std::vector<TimedState> out;
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  out.reserve(n + 1);
  out.push_back({0.0, initial});
  VehicleState s = initial;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    s = step(s, t, dt);
    out.push_back({static_cast<double>(k + 1) * dt, s});
  }
  return out;
}

/// Resamples a recorded rollout at time t (clamped), linear in position and
/// speed, shortest-arc in heading.
inline VehicleState state_at(std::span<const TimedState> states, double t) {
  if (states.empty()) {
    throw Error(ErrorKind::out_of_range, "empty rollout");
  }
  if (t <= states.front().time) return states.front().state;
  if (t >= states.back().time) return states.back().state;
  auto hi = std::upper_bound(states.begin(), states.end(), t,
                             [](double v, const TimedState& s) { return v < s.time; });
  const auto& b = *hi;
  const auto& a = *(hi - 1);
  const double u = (t - a.time) / (b.time - a.time);
  VehicleState out;
  out.pose.x = a.state.pose.x + u * (b.state.pose.x - a.state.pose.x);
  out.pose.y = a.state.pose.y + u * (b.state.pose.y - a.state.pose.y);
  out.pose.heading = lerp_angle(a.state.pose.heading, b.state.pose.heading, u);
  out.speed = a.state.speed + u * (b.state.speed - a.state.speed);
  out.steering_angle = a.state.steering_angle + u * (b.state.steering_angle - a.state.steering_angle);
  return out;
}

}  // namespace wmdrive::dynamics
