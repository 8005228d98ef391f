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
#include <span>
#include <vector>

#include "wmdrive/render/camera.hpp"
#include "wmdrive/render/image.hpp"
#include "wmdrive/render/scene.hpp"

namespace wmdrive::render {

struct FrameImage {
  Image pixels;
  double timestamp = 0.0;
  friend bool operator==(const FrameImage&, const FrameImage&) = default;
};

namespace detail {

/// Screen-space vertex: pixel position and inverse depth.
struct ScreenVertex {
  double u, v, inv_z;
};

/// Sutherland-Hodgman against Z >= near, camera coordinates in and out.
inline std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri, double near) {
  std::vector<Vec3> out;
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3& a = tri[i];
    const Vec3& b = tri[(i + 1) % 3];
    const bool ain = a.z >= near;
    const bool bin = b.z >= near;
    if (ain) out.push_back(a);
    if (ain != bin) {
      const double t = (near - a.z) / (b.z - a.z);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

class Rasterizer {
 public:
  Rasterizer(const CameraModel& cam, Rgb background)
      : cam_(cam), image_(cam.width, cam.height, background),
        depth_(static_cast<std::size_t>(cam.width) * cam.height, 0.0) {}

  void draw(const ScreenVertex& a, const ScreenVertex& b, const ScreenVertex& c, Rgb color) {
    const double area = edge(a, b, c.u, c.v);
    if (area == 0.0 || !std::isfinite(area)) return;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min({a.u, b.u, c.u}))));
    const int x1 = std::min(cam_.width - 1, static_cast<int>(std::ceil(std::max({a.u, b.u, c.u}))));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min({a.v, b.v, c.v}))));
    const int y1 = std::min(cam_.height - 1, static_cast<int>(std::ceil(std::max({a.v, b.v, c.v}))));
    const double inv_area = 1.0 / area;
    for (int y = y0; y <= y1; ++y) {
      const double py = y + 0.5;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        const double w0 = edge(b, c, px, py) * inv_area;
        const double w1 = edge(c, a, px, py) * inv_area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        const double iz = w0 * a.inv_z + w1 * b.inv_z + w2 * c.inv_z;
        auto& d = depth_[static_cast<std::size_t>(y) * cam_.width + x];
        if (iz > d) {
          d = iz;
          image_.set(x, y, color);
        }
      }
    }
  }

  Image take() { return std::move(image_); }

 private:
  static double edge(const ScreenVertex& a, const ScreenVertex& b, double px, double py) {
    return (b.u - a.u) * (py - a.v) - (b.v - a.v) * (px - a.u);
  }

  const CameraModel& cam_;
  Image image_;
  std::vector<double> depth_;  // 1/z; 0 = empty
};

}  // namespace detail

/// Z-buffered flat-colour rasterisation, clipped at the near plane.
/// Perspective-correct depth (1/z is affine in screen space).
inline FrameImage render_frame(const CameraModel& cam, const Pose3& ego_pose,
                               std::span<const ScenePrimitive> scene, double timestamp = 0.0) {
  cam.validate();
  detail::Rasterizer r(cam, palette::sky);
  const Pose3 c = camera_pose(cam, ego_pose);
  const double ch = std::cos(c.heading);
  const double sh = std::sin(c.heading);
  auto to_cam = [&](Vec3 w) {
    const double dx = w.x - c.x;
    const double dy = w.y - c.y;
    const double fwd = ch * dx + sh * dy;
    const double left = -sh * dx + ch * dy;
    return Vec3{-left, c.z - w.z, fwd};
  };
  for (const auto& prim : scene) {
    for (const auto& tri : prim.triangles) {
      const std::array<Vec3, 3> cam_tri{to_cam(tri[0]), to_cam(tri[1]), to_cam(tri[2])};
      if (cam_tri[0].z < cam.near_plane && cam_tri[1].z < cam.near_plane && cam_tri[2].z < cam.near_plane) {
        continue;
      }
      const auto poly = detail::clip_near(cam_tri, cam.near_plane);
      if (poly.size() < 3) continue;
      std::vector<detail::ScreenVertex> sv;
      sv.reserve(poly.size());
      for (const auto& p : poly) {
        sv.push_back({cam.cx + cam.fx * p.x / p.z, cam.cy + cam.fy * p.y / p.z, 1.0 / p.z});
      }
      for (std::size_t i = 1; i + 1 < sv.size(); ++i) {
        r.draw(sv[0], sv[i], sv[i + 1], prim.color);
      }
    }
  }
  return {r.take(), timestamp};
}

}  // namespace wmdrive::render
