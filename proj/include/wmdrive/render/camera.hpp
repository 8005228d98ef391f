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

#include <optional>

#include "wmdrive/error.hpp"
#include "wmdrive/geometry.hpp"

namespace wmdrive::render {

/// Pinhole camera rigidly mounted on the ego. Camera frame: X right, Y down,
/// Z forward; pitch and roll are zero.
struct CameraModel {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 480.0;
  double cy = 270.0;
  int width = 960;
  int height = 540;
  Pose3 mount{1.35, 0.0, 1.5, 0.0};  // relative to the ego pose
  double near_plane = 0.1;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0) || width <= 0 || height <= 0 || cx < 0.0 || cx >= width ||
        cy < 0.0 || cy >= height || !(near_plane > 0.0)) {
      throw Error(ErrorKind::invalid_argument, "invalid camera model");
    }
  }
};

struct PixelHit {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;
};

/// World pose of the camera itself.
inline Pose3 camera_pose(const CameraModel& cam, const Pose3& ego) {
  const Pose2 p = compose(ego.planar(), cam.mount.planar());
  return {p.x, p.y, ego.z + cam.mount.z, p.heading};
}

/// World point in camera coordinates.
inline Vec3 to_camera(const CameraModel& cam, const Pose3& ego, Vec3 world) {
  const Pose3 c = camera_pose(cam, ego);
  const Vec2 local = to_local(c.planar(), {world.x, world.y});
  return {-local.y, c.z - world.z, local.x};
}

inline std::optional<PixelHit> project_camera_point(const CameraModel& cam, Vec3 p) {
  if (p.z <= cam.near_plane) {
    return std::nullopt;
  }
  return PixelHit{cam.cx + cam.fx * p.x / p.z, cam.cy + cam.fy * p.y / p.z, p.z};
}

/// Pixel coordinates and depth, or nothing when behind the near plane.
inline std::optional<PixelHit> project(const CameraModel& cam, const Pose3& ego, Vec3 world) {
  return project_camera_point(cam, to_camera(cam, ego, world));
}

}  // namespace wmdrive::render
