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

// Per-run checks that a generated scene really shows what its label claims:
// kinematic label contracts and the projected-geometry motion cues.

#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "wmdrive/render/camera.hpp"
#include "wmdrive/render/frames.hpp"
#include "wmdrive/render/scene.hpp"
#include "wmdrive/scenarios/generate.hpp"

namespace wmdrive::scenarios {

namespace detail {

template <typename Seq, typename F>
bool strictly_monotone(const Seq& xs, F&& key, bool increasing) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double a = key(xs[i - 1]);
    const double b = key(xs[i]);
    if (increasing ? !(b > a) : !(b < a)) return false;
  }
  return true;
}

}  // namespace detail

/// Kinematic label contract violations for one run; empty means sound.
inline std::vector<std::string> check_label_soundness(const ScenarioSpec& spec, const SimulationRun& run,
                                                      const GroundTruth& truth,
                                                      const ScenarioConstants& k = {}) {
  std::vector<std::string> v;
  auto fail = [&](const std::string& what) { v.push_back(spec.id + ": " + what); };
  if (std::find(truth.answer_set.begin(), truth.answer_set.end(), truth.label) == truth.answer_set.end()) {
    fail("label outside answer set");
  }
  if (truth != label_for(spec.params)) fail("label differs from the parameter contract");
  if (run.ego.size() < 2) {
    fail("empty ego rollout");
    return v;
  }
  const Pose2 origin = run.ego.front().state.pose;

  switch (spec.category) {
    case Category::forward_backward: {
      const bool fwd = truth.label == "forward";
      if (!detail::strictly_monotone(
              run.ego, [&](const dynamics::TimedState& s) { return to_local(origin, s.state.pose.position()).x; },
              fwd)) {
        fail(fwd ? "ego station not strictly increasing" : "ego station not strictly decreasing");
      }
      break;
    }
    case Category::accel_decel: {
      const bool up = truth.label == "accelerate";
      if (!detail::strictly_monotone(run.ego, [](const dynamics::TimedState& s) { return s.state.speed; }, up)) {
        fail(up ? "speed not strictly increasing" : "speed not strictly decreasing");
      }
      break;
    }
    case Category::left_right: {
      const double sign = truth.label == "left" ? 1.0 : -1.0;
      for (std::size_t i = 1; i < run.ego.size(); ++i) {
        const double d = normalize_angle(run.ego[i].state.pose.heading - run.ego[i - 1].state.pose.heading);
        if (!(sign * d > 0.0)) {
          fail(fmt::format("heading rate changes sign at t={:.2f}", run.ego[i].time));
          break;
        }
      }
      break;
    }
    case Category::traffic: {
      const int level = std::get<TrafficParams>(spec.params).level;
      double sum = 0.0, lo = std::numeric_limits<double>::infinity();
      for (const auto& s : run.ego) {
        sum += s.state.speed;
        lo = std::min(lo, s.state.speed);
      }
      const double mean = sum / static_cast<double>(run.ego.size());
      if (level == 4 && !(mean < 0.25 * k.speed_limit)) fail(fmt::format("level 4 mean ego speed {:.3f} too high", mean));
      if (level == 3 && !(mean < 0.5 * k.speed_limit)) fail(fmt::format("level 3 mean ego speed {:.3f} too high", mean));
      if (level <= 2 && !(lo >= 0.9 * k.speed_limit)) fail(fmt::format("ego slowed to {:.3f} without traffic", lo));
      // Level 1: nobody in the ego lane.
      if (level == 1) {
        for (const auto& a : run.actors) {
          const auto m = worldmap::nearest_sample_point(run.map, a.pose_at(0.0).planar());
          if (m.point.lane_id == run.map.segment(worldmap::localize(run.map, origin).lane_id).id) {
            fail("level 1 has a vehicle in the ego lane");
          }
        }
      }
      break;
    }
    case Category::speeding: {
      const bool speeding = truth.label == "speeding";
      for (const auto& a : run.actors) {
        if (a.id != "other") continue;
        const auto* tr = std::get_if<actors::TrajectoryMotion>(&a.motion);
        if (!tr) {
          fail("other actor is not trajectory-driven");
          continue;
        }
        for (const auto& s : tr->trajectory.samples()) {
          if (speeding ? !(s.speed > 1.1 * k.speed_limit) : !(s.speed <= k.speed_limit + 1e-9)) {
            fail(fmt::format("other-actor speed {:.3f} contradicts label", s.speed));
            break;
          }
        }
      }
      break;
    }
    case Category::open_set_object: {
      const auto& p = std::get<OpenSetParams>(spec.params);
      const auto& ego_lane = run.map.segment(worldmap::localize(run.map, origin).lane_id);
      const auto poly = worldmap::lane_polygon(ego_lane);
      for (const auto& a : run.actors) {
        const auto box = a.footprint_at(0.0);
        if (p.on_road && !box_overlaps_polygon(box, poly)) fail("on-road object misses the ego lane");
        if (!p.on_road && actors::footprint_on_road(run.map, box)) fail("off-road object touches the road");
        const double along = to_local(origin, box.center).x;
        if (!(along > 0.0)) fail("object is not ahead of the ego");
      }
      break;
    }
    case Category::plane: {
      const auto& p = std::get<PlaneParams>(spec.params);
      for (const auto& a : run.actors) {
        const auto* tr = std::get_if<actors::TrajectoryMotion>(&a.motion);
        if (!tr) continue;
        const auto& s = tr->trajectory.samples();
        if (p.mode == actors::PlaneMode::overhead) {
          for (const auto& x : s) {
            if (x.pose.z != k.plane_cruise_altitude) {
              fail("overhead altitude not constant");
              break;
            }
          }
        } else {
          for (std::size_t i = 1; i < s.size(); ++i) {
            if (s[i].pose.z > s[i - 1].pose.z) {
              fail("landing altitude increases");
              break;
            }
          }
          if (s.back().pose.z != 0.0) fail("landing does not touch down");
          const auto m = worldmap::nearest_on_lane(run.map.segment(worldmap::localize(run.map, origin).lane_id),
                                                   {s.back().pose.x, s.back().pose.y});
          if (std::abs(m.lateral_offset) >= 0.5) fail("touchdown off the ego-lane centerline");
        }
      }
      break;
    }
    case Category::planning: {
      std::vector<OrientedBox> obstacles;
      for (const auto& a : run.actors) obstacles.push_back(a.footprint_at(0.0));
      const auto result = planning::plan(run.map, run.ego.front().state, obstacles, k.planner);
      if (!result.feasible()) {
        fail("no collision-free candidate");
      } else if (!result.best()->color_tag || planning::to_string(*result.best()->color_tag) != truth.label) {
        fail("planner picks a colour other than the label");
      }
      if (run.plans.size() != 3) fail("expected three painted candidates");
      break;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Visual cues

/// Projected height (px) of an arrow marking, or nothing unless every outline
/// point lies at least `min_depth` in front of the camera.
inline std::optional<double> arrow_projected_height(const render::CameraModel& cam, const Pose3& ego,
                                                    const render::ArrowSite& site, double min_depth = 1.0) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& p : render::arrow_outline(site)) {
    const auto hit = render::project(cam, ego, p);
    if (!hit || hit->depth < min_depth) return std::nullopt;
    lo = std::min(lo, hit->v);
    hi = std::max(hi, hit->v);
  }
  return hi - lo;
}

/// Mid-trunk projection of a tree.
inline std::optional<render::PixelHit> tree_projection(const render::CameraModel& cam, const Pose3& ego,
                                                       const render::TreeSite& site) {
  return render::project(cam, ego, {site.position.x, site.position.y, 0.5 * render::kTrunkHeight});
}

struct CueTrack {
  std::string what;
  std::vector<double> values;  // per frame
};

/// Arrow on the ego lane that stays in view for every frame, nearest first.
inline std::optional<CueTrack> track_arrow(const SimulationRun& run, const render::CameraModel& cam,
                                           const std::vector<double>& times) {
  const auto lane = worldmap::localize(run.map, run.ego.front().state.pose).lane_id;
  std::optional<CueTrack> best;
  double best_depth = std::numeric_limits<double>::infinity();
  for (const auto& site : render::arrow_sites(run.map)) {
    if (site.lane_id != lane) continue;
    CueTrack track{fmt::format("arrow@{}:{:.0f}", site.lane_id, site.station), {}};
    bool ok = true;
    for (double t : times) {
      const auto h = arrow_projected_height(cam, run.ego_pose_at(t), site);
      if (!h) {
        ok = false;
        break;
      }
      track.values.push_back(*h);
    }
    if (!ok) continue;
    const auto d0 = render::project(cam, run.ego_pose_at(times.front()), {site.base.x, site.base.y, 0.0});
    if (d0 && d0->depth < best_depth) {
      best_depth = d0->depth;
      best = std::move(track);
    }
  }
  return best;
}

/// Horizontal image positions of every tree on `side` that stays in front
/// of the camera (depth >= 1 m) in all frames.
inline std::vector<CueTrack> track_trees(const SimulationRun& run, const render::CameraModel& cam,
                                         const std::vector<double>& times, worldmap::TurnSide side) {
  std::vector<CueTrack> out;
  for (const auto& site : render::tree_sites(run.map)) {
    if (site.side != side) continue;
    CueTrack track{fmt::format("tree@{}:{:.0f}", site.lane_id, site.station), {}};
    bool ok = true;
    for (double t : times) {
      const auto hit = tree_projection(cam, run.ego_pose_at(t), site);
      if (!hit || hit->depth < 1.0) {
        ok = false;
        break;
      }
      track.values.push_back(hit->u);
    }
    if (ok) out.push_back(std::move(track));
  }
  return out;
}

/// Motion-cue violations for one run at one frame count.
inline std::vector<std::string> check_visual_cues(const ScenarioSpec& spec, const SimulationRun& run,
                                                  const GroundTruth& truth, const render::CameraModel& cam,
                                                  int frame_count, double interval = render::kFrameInterval) {
  std::vector<std::string> v;
  auto fail = [&](const std::string& what) { v.push_back(fmt::format("{} [{} frames]: {}", spec.id, frame_count, what)); };
  const auto times = render::frame_times(interval, frame_count);
  if (spec.category == Category::forward_backward) {
    const bool fwd = truth.label == "forward";
    const auto track = track_arrow(run, cam, times);
    if (!track) {
      fail("no ego-lane arrow stays in view");
    } else if (!detail::strictly_monotone(track->values, [](double x) { return x; }, fwd)) {
      fail(track->what + (fwd ? " height not strictly increasing" : " height not strictly decreasing"));
    }
  } else if (spec.category == Category::left_right) {
    const bool left = truth.label == "left";
    // Left turns: right-side trees drift right; right turns: left-side trees drift left.
    const auto tracks = track_trees(run, cam, times, left ? worldmap::TurnSide::right : worldmap::TurnSide::left);
    if (tracks.empty()) fail("no roadside tree stays in view");
    for (const auto& t : tracks) {
      if (!detail::strictly_monotone(t.values, [](double x) { return x; }, left)) {
        fail(t.what + (left ? " does not drift right" : " does not drift left"));
      }
    }
  }
  return v;
}

}  // namespace wmdrive::scenarios
