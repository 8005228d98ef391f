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

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "wmdrive/render/raster.hpp"
#include "wmdrive/scenarios/run.hpp"

namespace wmdrive::render {

/// Frame interval used for every grid (s).
inline constexpr double kFrameInterval = 0.5;

inline std::vector<double> frame_times(double interval, int count) {
  std::vector<double> out;
  for (int k = 0; k < count; ++k) out.push_back(k * interval);
  return out;
}

inline void require_rollout_covers(const scenarios::SimulationRun& run, double interval, int count) {
  if (count < 1 || !(interval > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "frame count and interval must be positive");
  }
  const double needed = (count - 1) * interval;
  if (run.ego.empty() || run.duration + 1e-9 < needed) {
    throw Error(ErrorKind::out_of_range, "rollout too short for the requested frames");
  }
}

/// Frames at k * interval, k = 0..count-1, from the ego camera.
inline std::vector<FrameImage> sample_frames(const scenarios::SimulationRun& run, const CameraModel& cam,
                                             double interval, int count) {
  require_rollout_covers(run, interval, count);
  const auto scenery = build_static_scene(run.map, run.plans);
  std::vector<FrameImage> frames;
  for (double t : frame_times(interval, count)) {
    auto scene = scenery;
    for (const auto& a : run.actors) {
      for (auto& prim : actor_primitives(a, t)) scene.push_back(std::move(prim));
    }
    frames.push_back(render_frame(cam, run.ego_pose_at(t), scene, t));
  }
  return frames;
}

struct FrameGrid {
  Image pixels;
  int rows = 0;
  int cols = 0;
  std::vector<double> frame_timestamps;
  int border = 2;
};

inline constexpr int kGridColumns = 3;
inline constexpr int kGridBorder = 2;
inline constexpr Rgb kGridBorderColor{0, 0, 0};

struct Rect {
  int x = 0, y = 0, w = 0, h = 0;
  bool contains(int px, int py) const { return px >= x && px < x + w && py >= y && py < y + h; }
};

// 5x7 digits, one row per byte, MSB = leftmost of the 5 columns.
inline constexpr std::array<std::array<std::uint8_t, 7>, 10> kDigitFont{{
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},
}};

inline constexpr int kDigitScale = 4;
inline constexpr int kOverlayPad = 4;

/// Region of a cell (cell coordinates) covered by the frame-index overlay.
inline Rect index_overlay_rect() {
  return {kOverlayPad, kOverlayPad, 5 * kDigitScale + 2 * kOverlayPad, 7 * kDigitScale + 2 * kOverlayPad};
}

inline void draw_index(Image& img, int ox, int oy, int index) {
  const Rect r = index_overlay_rect();
  for (int y = 0; y < r.h; ++y) {
    for (int x = 0; x < r.w; ++x) img.set(ox + r.x + x, oy + r.y + y, {0, 0, 0});
  }
  const auto& glyph = kDigitFont[static_cast<std::size_t>(index % 10)];
  for (int gy = 0; gy < 7; ++gy) {
    for (int gx = 0; gx < 5; ++gx) {
      if (!((glyph[gy] >> (4 - gx)) & 1)) continue;
      for (int sy = 0; sy < kDigitScale; ++sy) {
        for (int sx = 0; sx < kDigitScale; ++sx) {
          img.set(ox + r.x + kOverlayPad + gx * kDigitScale + sx,
                  oy + r.y + kOverlayPad + gy * kDigitScale + sy, {255, 255, 255});
        }
      }
    }
  }
}

inline int grid_columns(int count) { return std::min(count, kGridColumns); }

/// Row-major tiling, 3 columns, 2 px black separators, 1-based frame index
/// in each cell's top-left corner.
inline FrameGrid compose_grid(std::span<const FrameImage> frames) {
  const int n = static_cast<int>(frames.size());
  if (n != 1 && n != 3 && n != 6 && n != 9) {
    throw Error(ErrorKind::invalid_argument, "grid needs 1, 3, 6 or 9 frames");
  }
  const int w = frames[0].pixels.width;
  const int h = frames[0].pixels.height;
  for (const auto& f : frames) {
    if (f.pixels.width != w || f.pixels.height != h) {
      throw Error(ErrorKind::invalid_argument, "grid frames differ in size");
    }
  }
  const Rect overlay = index_overlay_rect();
  if (w < overlay.x + overlay.w || h < overlay.y + overlay.h) {
    throw Error(ErrorKind::invalid_argument, "frames too small for the index overlay");
  }
  FrameGrid g;
  g.cols = grid_columns(n);
  g.rows = n / g.cols;
  g.border = kGridBorder;
  g.pixels = Image(g.cols * w + (g.cols - 1) * kGridBorder, g.rows * h + (g.rows - 1) * kGridBorder,
                   kGridBorderColor);
  const std::size_t stride = static_cast<std::size_t>(w) * 3;
  for (int k = 0; k < n; ++k) {
    const int ox = (k % g.cols) * (w + kGridBorder);
    const int oy = (k / g.cols) * (h + kGridBorder);
    const auto& src = frames[static_cast<std::size_t>(k)].pixels;
    for (int y = 0; y < h; ++y) {
      std::copy_n(src.rgb.data() + y * stride, stride, g.pixels.rgb.data() + g.pixels.offset(ox, oy + y));
    }
    draw_index(g.pixels, ox, oy, k + 1);
    g.frame_timestamps.push_back(frames[static_cast<std::size_t>(k)].timestamp);
  }
  return g;
}

/// Cell origin of frame k in a composed grid.
inline std::pair<int, int> cell_origin(const FrameGrid& g, int k, int frame_w, int frame_h) {
  return {(k % g.cols) * (frame_w + g.border), (k / g.cols) * (frame_h + g.border)};
}

}  // namespace wmdrive::render
