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
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace wmdrive {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) {
    a += 2.0 * kPi;
  }
  return a;
}

/// Interpolates from `a` to `b` along the shorter arc.
inline double lerp_angle(double a, double b, double t) {
  return normalize_angle(a + t * normalize_angle(b - a));
}

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 unit_from_heading(double heading) { return {std::cos(heading), std::sin(heading)}; }
/// Left-hand normal of a heading (positive lateral = left).
inline Vec2 left_normal(double heading) { return {-std::sin(heading), std::cos(heading)}; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(Vec3, Vec3) = default;
};

/// Planar pose; heading is CCW from +x.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const Pose2&, const Pose2&) = default;
};

/// Pose with altitude. Ground entities keep z = 0.
struct Pose3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double heading = 0.0;

  Pose2 planar() const { return {x, y, heading}; }
  Vec3 position() const { return {x, y, z}; }
  static Pose3 from(const Pose2& p, double z = 0.0) { return {p.x, p.y, z, p.heading}; }
  friend bool operator==(const Pose3&, const Pose3&) = default;
};

/// Expresses a world point in the frame (x forward along heading, y left).
inline Vec2 to_local(const Pose2& frame, Vec2 world) {
  const Vec2 d = world - frame.position();
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {c * d.x + s * d.y, -s * d.x + c * d.y};
}

inline Vec2 to_world(const Pose2& frame, Vec2 local) {
  const double c = std::cos(frame.heading);
  const double s = std::sin(frame.heading);
  return {frame.x + c * local.x - s * local.y, frame.y + s * local.x + c * local.y};
}

inline Pose2 compose(const Pose2& frame, const Pose2& local) {
  const Vec2 p = to_world(frame, {local.x, local.y});
  return {p.x, p.y, normalize_angle(frame.heading + local.heading)};
}

inline Pose2 relative(const Pose2& frame, const Pose2& world) {
  const Vec2 p = to_local(frame, world.position());
  return {p.x, p.y, normalize_angle(world.heading - frame.heading)};
}

/// Rectangle footprint centred on `center`, long axis along `heading`.
struct OrientedBox {
  Vec2 center;
  double heading = 0.0;
  double length = 0.0;
  double width = 0.0;

  std::array<Vec2, 4> corners() const {
    const Vec2 f = unit_from_heading(heading) * (0.5 * length);
    const Vec2 l = left_normal(heading) * (0.5 * width);
    return {center + f + l, center - f + l, center - f - l, center + f - l};
  }
};

namespace detail {

inline void project_onto(const std::array<Vec2, 4>& pts, Vec2 axis, double& lo, double& hi) {
  lo = hi = dot(pts[0], axis);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double p = dot(pts[i], axis);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
}

}  // namespace detail

/// Separating-axis test. Boxes that merely touch do not intersect.
inline bool intersects(const OrientedBox& a, const OrientedBox& b) {
  const auto ca = a.corners();
  const auto cb = b.corners();
  const std::array<Vec2, 4> axes = {unit_from_heading(a.heading), left_normal(a.heading),
                                    unit_from_heading(b.heading), left_normal(b.heading)};
  for (const Vec2& axis : axes) {
    double a_lo = 0, a_hi = 0, b_lo = 0, b_hi = 0;
    detail::project_onto(ca, axis, a_lo, a_hi);
    detail::project_onto(cb, axis, b_lo, b_hi);
    if (a_hi <= b_lo || b_hi <= a_lo) {
      return false;
    }
  }
  return true;
}

/// Even-odd rule; points exactly on an edge may land either side.
inline bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2 a = polygon[i];
    const Vec2 b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x_cross) {
        inside = !inside;
      }
    }
  }
  return inside;
}

/// Proper or touching intersection of segments ab and cd.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, q.x) <= r.x && r.x <= std::max(p.x, q.x) && std::min(p.y, q.y) <= r.y &&
           r.y <= std::max(p.y, q.y);
  };
  return (d1 == 0 && on_segment(a, b, c)) || (d2 == 0 && on_segment(a, b, d)) ||
         (d3 == 0 && on_segment(c, d, a)) || (d4 == 0 && on_segment(c, d, b));
}

/// True when the box and the polygon share any area (or touch along an edge).
inline bool box_overlaps_polygon(const OrientedBox& box, std::span<const Vec2> polygon) {
  const auto c = box.corners();
  for (const Vec2& p : c) {
    if (point_in_polygon(p, polygon)) {
      return true;
    }
  }
  for (const Vec2& p : polygon) {
    const Vec2 local = to_local({box.center.x, box.center.y, box.heading}, p);
    if (std::abs(local.x) < 0.5 * box.length && std::abs(local.y) < 0.5 * box.width) {
      return true;
    }
  }
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0, k = n - 1; j < n; k = j++) {
      if (segments_intersect(c[i], c[(i + 1) % 4], polygon[k], polygon[j])) {
        return true;
      }
    }
  }
  return false;
}

/// 8-bit colour.
struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(Rgb, Rgb) = default;
};

}  // namespace wmdrive
