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

// Procedural scene: flat-coloured triangle lists for the road, paint,
// roadside trees, actors and optional plan overlays.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "wmdrive/actors.hpp"
#include "wmdrive/planning.hpp"
#include "wmdrive/worldmap.hpp"

namespace wmdrive::render {

enum class PrimitiveTag {
  terrain,
  road,
  lane_marking,
  arrow_marking,
  tree,
  vehicle,
  object,
  plane,
  plan_polyline
};

inline const char* to_string(PrimitiveTag t) {
  switch (t) {
    case PrimitiveTag::terrain: return "terrain";
    case PrimitiveTag::road: return "road";
    case PrimitiveTag::lane_marking: return "lane_marking";
    case PrimitiveTag::arrow_marking: return "arrow_marking";
    case PrimitiveTag::tree: return "tree";
    case PrimitiveTag::vehicle: return "vehicle";
    case PrimitiveTag::object: return "object";
    case PrimitiveTag::plane: return "plane";
    case PrimitiveTag::plan_polyline: return "plan_polyline";
  }
  return "unknown";
}

using Triangle = std::array<Vec3, 3>;

struct ScenePrimitive {
  std::vector<Triangle> triangles;
  Rgb color;
  PrimitiveTag tag = PrimitiveTag::road;
};

namespace palette {
inline constexpr Rgb sky{150, 190, 230};
inline constexpr Rgb terrain{96, 140, 72};
inline constexpr Rgb road{70, 70, 76};
inline constexpr Rgb paint{240, 240, 240};
inline constexpr Rgb trunk{105, 70, 40};
inline constexpr Rgb canopy{40, 110, 45};
inline constexpr Rgb pole{90, 90, 95};
inline constexpr Rgb lamp_housing{25, 25, 25};
}  // namespace palette

// Layout of painted markings and trees (metres).
inline constexpr double kArrowFirstStation = 10.0;
inline constexpr double kArrowSpacing = 20.0;
inline constexpr double kArrowLength = 5.0;
inline constexpr double kTreeFirstStation = 6.0;
inline constexpr double kTreeSpacing = 13.0;
inline constexpr double kTreeSetback = 3.0;
inline constexpr double kDashOn = 3.0;
inline constexpr double kDashPeriod = 10.0;
inline constexpr double kLineWidth = 0.15;

inline constexpr double kPaintZ = 0.02;
inline constexpr double kPlanZ = 0.04;
inline constexpr double kTerrainZ = -0.05;

namespace detail {

inline void add_quad(ScenePrimitive& p, Vec3 a, Vec3 b, Vec3 c, Vec3 d) {
  p.triangles.push_back({a, b, c});
  p.triangles.push_back({a, c, d});
}

inline Vec3 lift(Vec2 p, double z) { return {p.x, p.y, z}; }

/// Ribbon of half-width `hw` along `pts` at height z.
inline void add_ribbon(ScenePrimitive& prim, std::span<const Pose2> pts, double hw, double z) {
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const Pose2& a = pts[i - 1];
    const Pose2& b = pts[i];
    const Vec2 na = left_normal(a.heading) * hw;
    const Vec2 nb = left_normal(b.heading) * hw;
    add_quad(prim, lift(a.position() - na, z), lift(b.position() - nb, z), lift(b.position() + nb, z),
             lift(a.position() + na, z));
  }
}

/// Lane-boundary poses between stations [s0, s1] at the given lateral offset.
inline std::vector<Pose2> boundary_poses(const worldmap::LaneSegment& seg, double s0, double s1,
                                         double offset, double step = 1.0) {
  std::vector<Pose2> out;
  for (double s = s0;; s += step) {
    const double ss = std::min(s, s1);
    const auto lp = worldmap::point_at(seg, ss);
    const Vec2 p = lp.pose.position() + left_normal(lp.pose.heading) * offset;
    out.push_back({p.x, p.y, lp.pose.heading});
    if (ss >= s1) break;
  }
  return out;
}

}  // namespace detail

inline Rgb shade(Rgb c, double f) {
  auto ch = [f](std::uint8_t v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v * f, 0.0, 255.0))); };
  return {ch(c.r), ch(c.g), ch(c.b)};
}

/// Box with its base at pose.z: top, long sides and ends as three
/// differently shaded primitives.
inline std::vector<ScenePrimitive> box_primitives(const Pose3& pose, double length, double width,
                                                  double height, Rgb color, PrimitiveTag tag) {
  const Pose2 frame = pose.planar();
  std::array<Vec2, 4> c{to_world(frame, {0.5 * length, 0.5 * width}),
                        to_world(frame, {-0.5 * length, 0.5 * width}),
                        to_world(frame, {-0.5 * length, -0.5 * width}),
                        to_world(frame, {0.5 * length, -0.5 * width})};
  const double z0 = pose.z;
  const double z1 = pose.z + height;
  ScenePrimitive top{{}, color, tag};
  ScenePrimitive sides{{}, shade(color, 0.78), tag};
  ScenePrimitive ends{{}, shade(color, 0.62), tag};
  for (int i = 0; i < 4; ++i) {
    const Vec2 a = c[i];
    const Vec2 b = c[(i + 1) % 4];
    detail::add_quad(i % 2 == 0 ? sides : ends, detail::lift(a, z0), detail::lift(b, z0), detail::lift(b, z1),
                     detail::lift(a, z1));
  }
  detail::add_quad(top, detail::lift(c[0], z1), detail::lift(c[1], z1), detail::lift(c[2], z1),
                   detail::lift(c[3], z1));
  return {std::move(top), std::move(sides), std::move(ends)};
}

/// Two crossed vertical quads, visible from any direction.
inline ScenePrimitive billboard_primitive(const Pose3& pose, double length, double width,
                                          double height, Rgb color, PrimitiveTag tag) {
  ScenePrimitive p{{}, color, tag};
  const Pose2 frame = pose.planar();
  const double z0 = pose.z;
  const double z1 = pose.z + height;
  const double half = 0.5 * std::max(length, width);
  for (Vec2 axis : {Vec2{1.0, 0.0}, Vec2{0.0, 1.0}}) {
    const Vec2 a = to_world(frame, axis * half);
    const Vec2 b = to_world(frame, axis * -half);
    detail::add_quad(p, detail::lift(a, z0), detail::lift(b, z0), detail::lift(b, z1), detail::lift(a, z1));
  }
  return p;
}

/// Fuselage, wings and tail fin sized from the kind's footprint.
inline std::vector<ScenePrimitive> plane_primitives(const Pose3& pose, const actors::ActorKind& kind) {
  const double fuselage_w = 0.12 * kind.length;
  const Pose2 frame = pose.planar();
  std::vector<ScenePrimitive> out;
  auto append = [&](std::vector<ScenePrimitive> prims) {
    for (auto& p : prims) out.push_back(std::move(p));
  };
  append(box_primitives(pose, kind.length, fuselage_w, fuselage_w, kind.color, PrimitiveTag::plane));
  Pose3 wing = pose;
  wing.z = pose.z + 0.3 * fuselage_w;
  append(box_primitives(wing, 0.18 * kind.length, kind.width, 0.1 * fuselage_w, kind.color, PrimitiveTag::plane));
  const Vec2 tail = to_world(frame, {-0.42 * kind.length, 0.0});
  append(box_primitives({tail.x, tail.y, pose.z + fuselage_w, pose.heading}, 0.12 * kind.length, 0.3,
                        kind.height - fuselage_w, kind.color, PrimitiveTag::plane));
  return out;
}

inline std::vector<ScenePrimitive> actor_primitives(const actors::Actor& actor, double t) {
  using actors::ActorCategory;
  using actors::RenderPrimitive;
  const Pose3 pose = actor.pose_at(t);
  const auto& k = actor.kind;
  const PrimitiveTag tag = k.category == ActorCategory::vehicle ? PrimitiveTag::vehicle
                           : k.category == ActorCategory::plane ? PrimitiveTag::plane
                                                                : PrimitiveTag::object;
  switch (k.primitive) {
    case RenderPrimitive::box:
      return box_primitives(pose, k.length, k.width, k.height, k.color, tag);
    case RenderPrimitive::billboard:
      return {billboard_primitive(pose, k.length, k.width, k.height, k.color, tag)};
    case RenderPrimitive::plane_compound:
      return plane_primitives(pose, k);
  }
  return {};
}

struct ArrowSite {
  worldmap::LaneId lane_id;
  double station = 0.0;
  Pose2 base;  // tail of the arrow, pointing along the lane
};

/// Arrow markings every kArrowSpacing metres on every lane.
inline std::vector<ArrowSite> arrow_sites(const worldmap::MapGraph& map) {
  std::vector<ArrowSite> out;
  for (const auto& seg : map.segments()) {
    for (double s = kArrowFirstStation; s + kArrowLength <= seg.length(); s += kArrowSpacing) {
      out.push_back({seg.id, s, worldmap::point_at(seg, s).pose});
    }
  }
  return out;
}

/// Shaft plus triangular head lying flat on the road.
inline ScenePrimitive arrow_primitive(const ArrowSite& site) {
  ScenePrimitive p{{}, palette::paint, PrimitiveTag::arrow_marking};
  auto w = [&](double x, double y) { return detail::lift(to_world(site.base, {x, y}), kPaintZ); };
  constexpr double kShaft = 3.5;
  detail::add_quad(p, w(0.0, -0.15), w(kShaft, -0.15), w(kShaft, 0.15), w(0.0, 0.15));
  p.triangles.push_back({w(kShaft, -0.5), w(kArrowLength, 0.0), w(kShaft, 0.5)});
  return p;
}

/// 3D points spanning an arrow, for analytic projection checks.
inline std::vector<Vec3> arrow_outline(const ArrowSite& site) {
  std::vector<Vec3> pts;
  for (const auto& tri : arrow_primitive(site).triangles) {
    pts.insert(pts.end(), tri.begin(), tri.end());
  }
  return pts;
}

struct TreeSite {
  worldmap::LaneId lane_id;
  double station = 0.0;
  worldmap::TurnSide side = worldmap::TurnSide::left;
  Vec2 position;
};

/// Trees beside every lane edge that is also a road edge.
inline std::vector<TreeSite> tree_sites(const worldmap::MapGraph& map) {
  using worldmap::TurnSide;
  std::vector<TreeSite> out;
  for (const auto& seg : map.segments()) {
    for (TurnSide side : {TurnSide::left, TurnSide::right}) {
      const auto& adj = side == TurnSide::left ? seg.adjacent_left : seg.adjacent_right;
      if (adj) continue;
      const double offset = (side == TurnSide::left ? 1.0 : -1.0) * (0.5 * seg.width + kTreeSetback);
      for (double s = kTreeFirstStation; s <= seg.length(); s += kTreeSpacing) {
        const auto lp = worldmap::point_at(seg, s);
        out.push_back({seg.id, s, side, lp.pose.position() + left_normal(lp.pose.heading) * offset});
      }
    }
  }
  return out;
}

inline constexpr double kTrunkHeight = 2.5;

inline std::vector<ScenePrimitive> tree_primitives(const TreeSite& site) {
  const Pose3 base{site.position.x, site.position.y, 0.0, 0.0};
  Pose3 crown = base;
  crown.z = kTrunkHeight;
  auto out = box_primitives(base, 0.4, 0.4, kTrunkHeight, palette::trunk, PrimitiveTag::tree);
  for (auto& p : box_primitives(crown, 2.4, 2.4, 2.4, palette::canopy, PrimitiveTag::tree)) out.push_back(std::move(p));
  return out;
}

inline ScenePrimitive plan_primitive(const planning::PlanPolyline& pl) {
  ScenePrimitive p{{}, planning::color_of(pl.color), PrimitiveTag::plan_polyline};
  std::vector<Pose2> poses;
  const std::size_t n = pl.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 d = pl.points[std::min(i + 1, n - 1)] - pl.points[i > 0 ? i - 1 : 0];
    const double h = (d.x == 0.0 && d.y == 0.0) ? 0.0 : std::atan2(d.y, d.x);
    poses.push_back({pl.points[i].x, pl.points[i].y, h});
  }
  // Per-colour height offset.
  detail::add_ribbon(p, poses, 0.15, kPlanZ + 0.005 * static_cast<int>(pl.color));
  return p;
}

/// Map-bound scenery: terrain, road, paint, anchors, trees and plans.
inline std::vector<ScenePrimitive> build_static_scene(const worldmap::MapGraph& map,
                                                      std::span<const planning::PlanPolyline> plans = {}) {
  using worldmap::AnchorKind;
  std::vector<ScenePrimitive> out;
  if (!map.empty()) {
    double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
    for (const auto& seg : map.segments()) {
      for (const auto& p : seg.centerline) {
        lo_x = std::min(lo_x, p.pose.x);
        lo_y = std::min(lo_y, p.pose.y);
        hi_x = std::max(hi_x, p.pose.x);
        hi_y = std::max(hi_y, p.pose.y);
      }
    }
    constexpr double kApron = 1000.0;
    ScenePrimitive ground{{}, palette::terrain, PrimitiveTag::terrain};
    detail::add_quad(ground, {lo_x - kApron, lo_y - kApron, kTerrainZ}, {hi_x + kApron, lo_y - kApron, kTerrainZ},
                     {hi_x + kApron, hi_y + kApron, kTerrainZ}, {lo_x - kApron, hi_y + kApron, kTerrainZ});
    out.push_back(std::move(ground));
  }

  for (const auto& seg : map.segments()) {
    ScenePrimitive road{{}, palette::road, PrimitiveTag::road};
    std::vector<Pose2> centre;
    for (const auto& p : seg.centerline) centre.push_back(p.pose);
    detail::add_ribbon(road, centre, 0.5 * seg.width, 0.0);
    out.push_back(std::move(road));

    ScenePrimitive lines{{}, palette::paint, PrimitiveTag::lane_marking};
    const double half = 0.5 * seg.width;
    // Dashed divider on the left when a neighbour exists; solid edge lines otherwise.
    if (seg.adjacent_left) {
      for (double s = 0.0; s < seg.length(); s += kDashPeriod) {
        const auto poses = detail::boundary_poses(seg, s, std::min(s + kDashOn, seg.length()), half);
        detail::add_ribbon(lines, poses, 0.5 * kLineWidth, kPaintZ);
      }
    } else {
      const auto poses = detail::boundary_poses(seg, 0.0, seg.length(), half - kLineWidth);
      detail::add_ribbon(lines, poses, 0.5 * kLineWidth, kPaintZ);
    }
    if (!seg.adjacent_right) {
      const auto poses = detail::boundary_poses(seg, 0.0, seg.length(), -half + kLineWidth);
      detail::add_ribbon(lines, poses, 0.5 * kLineWidth, kPaintZ);
    }
    if (!lines.triangles.empty()) out.push_back(std::move(lines));
  }

  for (const auto& site : arrow_sites(map)) out.push_back(arrow_primitive(site));

  for (const auto& a : map.anchors()) {
    const Pose2& p = a.pose;
    switch (a.kind) {
      case AnchorKind::stop_line: {
        const double hw = 0.5 * map.segment(a.lane_id).width - 0.1;
        ScenePrimitive bar{{}, palette::paint, PrimitiveTag::lane_marking};
        auto w = [&](double x, double y) { return detail::lift(to_world(p, {x, y}), kPaintZ); };
        detail::add_quad(bar, w(-0.2, -hw), w(0.2, -hw), w(0.2, hw), w(-0.2, hw));
        out.push_back(std::move(bar));
        break;
      }
      case AnchorKind::traffic_light:
      case AnchorKind::traffic_sign: {
        for (auto& prim : box_primitives({p.x, p.y, 0.0, p.heading}, 0.2, 0.2, 5.0, palette::pole, PrimitiveTag::object)) {
          out.push_back(std::move(prim));
        }
        const bool light = a.kind == AnchorKind::traffic_light;
        for (auto& prim : box_primitives({p.x, p.y, 5.0, p.heading}, 0.4, light ? 0.4 : 0.8, light ? 1.2 : 0.8,
                                         light ? palette::lamp_housing : Rgb{200, 30, 30}, PrimitiveTag::object)) {
          out.push_back(std::move(prim));
        }
        break;
      }
    }
  }

  for (const auto& site : tree_sites(map)) {
    for (auto& prim : tree_primitives(site)) out.push_back(std::move(prim));
  }
  for (const auto& pl : plans) out.push_back(plan_primitive(pl));
  return out;
}

/// Full scene with actors at time t.
inline std::vector<ScenePrimitive> build_scene(const worldmap::MapGraph& map,
                                               std::span<const actors::Actor> actor_list,
                                               std::span<const planning::PlanPolyline> plans = {},
                                               double t = 0.0) {
  auto out = build_static_scene(map, plans);
  for (const auto& a : actor_list) {
    for (auto& prim : actor_primitives(a, t)) out.push_back(std::move(prim));
  }
  return out;
}

}  // namespace wmdrive::render
