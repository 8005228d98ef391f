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

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <vector>

#include "prop.hpp"
#include "wmdrive/actors.hpp"

namespace {

using namespace wmdrive;
using namespace wmdrive::actors;

ActorKind box_kind(double length, double width) {
  ActorKind k;
  k.name = "probe";
  k.length = length;
  k.width = width;
  return k;
}

TEST(Catalog, JsonRoundTrip) {
  const auto& c = default_catalog();
  const auto back = catalog_from_json(catalog_to_json(c));
  EXPECT_EQ(back.kinds(), c.kinds());
  EXPECT_EQ(back.get("road_block").width, 1.6);
  EXPECT_FALSE(c.of_category(ActorCategory::plane).empty());
}

TEST(Catalog, AssetMatchesBuiltIn) {
  std::ifstream in(std::string(WMDRIVE_SOURCE_DIR) + "/assets/actor_catalog.json");
  ASSERT_TRUE(in);
  EXPECT_EQ(catalog_from_json(nlohmann::json::parse(in)).kinds(), default_catalog().kinds());
}

TEST(Catalog, Errors) {
  try {
    default_catalog().get("unicorn");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
  auto j = catalog_to_json(default_catalog());
  j["format_version"] = 7;
  EXPECT_THROW(catalog_from_json(j), Error);
  EXPECT_THROW(catalog_from_json(nlohmann::json{{"format_version", 1}}), Error);
}

TEST(Placement, StopLineIsAnchorPose) {
  const auto base = worldmap::build_straight_map(200.0, 3.5, 0, 1.0);
  const Pose2 anchor{40.0, 0.0, 0.0};
  const auto map = base.with_anchors({{worldmap::AnchorKind::stop_line, anchor, worldmap::primary_lane()}});
  PlacementRule rule;
  rule.kind = PlacementKind::on_stop_line;
  EXPECT_EQ(place_actor(map, {{10, 0, 0}, 5, 0}, rule, box_kind(1, 1)), Pose3::from(anchor));
}

TEST(Placement, MissingAnchorIsNotFound) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 0, 1.0);
  PlacementRule rule;
  rule.kind = PlacementKind::under_traffic_light;
  try {
    place_actor(map, {{10, 0, 0}, 5, 0}, rule, box_kind(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
}

TEST(Placement, UnreachableDistanceIsOutOfRange) {
  const auto map = worldmap::build_straight_map(50.0, 3.5, 0, 1.0);
  PlacementRule rule;
  rule.along_distance = 100.0;
  try {
    place_actor(map, {{10, 0, 0}, 5, 0}, rule, box_kind(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::out_of_range);
  }
}

TEST(Placement, BesideLaneOffset) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 0, 1.0);
  PlacementRule rule;
  rule.kind = PlacementKind::beside_ego_lane;
  rule.margin = 0.5;
  for (auto side : {worldmap::TurnSide::left, worldmap::TurnSide::right}) {
    rule.side = side;
    const auto p = place_actor(map, {{10, 0, 0}, 5, 0}, rule, box_kind(2.0, 1.0));
    EXPECT_NEAR(std::abs(p.y), 2.75, 1e-9);
    EXPECT_NEAR(p.x, 30.0, 1e-9);
    EXPECT_EQ(p.y > 0, side == worldmap::TurnSide::left);
  }
}

TEST(Placement, OnRoadAheadTouchesEgoLaneAndOffRoadNeverDoes) {
  const auto map = worldmap::build_composite_map(
      {worldmap::StraightPiece{40.0}, worldmap::ArcPiece{30.0, 1.2, worldmap::TurnSide::left},
       worldmap::StraightPiece{60.0}},
      3.5, 2, 1.0);
  prop::for_all(200, [&](prop::Gen& g, int) {
    const auto ego_lp = worldmap::point_at(map.segment(worldmap::primary_lane(0)), g.uniform(0.0, 30.0));
    const VehicleState ego{ego_lp.pose, 5.0, 0.0};
    const auto kind = box_kind(g.uniform(0.5, 6.0), g.uniform(0.3, 3.0));
    PlacementRule rule;
    rule.along_distance = g.uniform(0.0, 80.0);
    rule.margin = g.uniform(0.0, 2.0);
    rule.side = g.coin() ? worldmap::TurnSide::left : worldmap::TurnSide::right;

    rule.kind = PlacementKind::on_road_ahead;
    const auto on = place_actor(map, ego, rule, kind);
    const OrientedBox on_box{{on.x, on.y}, on.heading, kind.length, kind.width};
    const auto lane = worldmap::localize(map, on.planar()).lane_id;
    EXPECT_TRUE(box_overlaps_polygon(on_box, worldmap::lane_polygon(map.segment(lane))));

    rule.kind = PlacementKind::off_road;
    const auto off = place_actor(map, ego, rule, kind);
    const OrientedBox off_box{{off.x, off.y}, off.heading, kind.length, kind.width};
    for (const auto& seg : map.segments()) {
      const auto poly = worldmap::lane_polygon(seg);
      for (const Vec2& c : off_box.corners()) EXPECT_FALSE(point_in_polygon(c, poly));
    }
    EXPECT_FALSE(footprint_on_road(map, off_box));
  });
}

// --- splines ----------------------------------------------------------------

double path_length(const Trajectory& t) {
  double total = 0.0;
  const auto& s = t.samples();
  for (std::size_t i = 1; i < s.size(); ++i) {
    total += distance(s[i - 1].pose.planar().position(), s[i].pose.planar().position());
  }
  return total;
}

TEST(Spline, StartEqualsEndIsConstant) {
  const Pose3 p{3, 4, 0, 1.0};
  const auto t = spline_trajectory(p, p, 2.0, SpeedProfile::ease);
  for (const auto& s : t.samples()) {
    EXPECT_EQ(s.pose, p);
    EXPECT_EQ(s.speed, 0.0);
  }
}

TEST(Spline, EndpointsExact) {
  prop::for_all(100, [](prop::Gen& g, int) {
    const Pose3 a{g.uniform(-50, 50), g.uniform(-50, 50), 0.0, g.uniform(-kPi, kPi)};
    const Pose3 b{g.uniform(-50, 50), g.uniform(-50, 50), 0.0, g.uniform(-kPi, kPi)};
    const double d = g.uniform(0.5, 8.0);
    const auto t = spline_trajectory(a, b, d, g.coin() ? SpeedProfile::uniform : SpeedProfile::ease);
    EXPECT_EQ(t.sample_at(0.0).pose, a);
    EXPECT_NEAR(t.duration(), d, 1e-12);
    const auto e = t.sample_at(d).pose;
    EXPECT_NEAR(e.x, b.x, 1e-9);
    EXPECT_NEAR(e.y, b.y, 1e-9);
    EXPECT_NEAR(e.heading, b.heading, 1e-9);
  });
}

TEST(Spline, StraightUniformMidpoint) {
  prop::for_all(20, [](prop::Gen& g, int) {
    const double h = g.uniform(-kPi, kPi);
    const Pose3 a{g.uniform(-20, 20), g.uniform(-20, 20), 0.0, h};
    const double len = g.uniform(5, 60);
    const Pose3 b{a.x + len * std::cos(h), a.y + len * std::sin(h), 0.0, h};
    const auto t = spline_trajectory(a, b, 4.0, SpeedProfile::uniform);
    const auto mid = t.sample_at(2.0).pose;
    EXPECT_NEAR(mid.x, 0.5 * (a.x + b.x), 1e-6);
    EXPECT_NEAR(mid.y, 0.5 * (a.y + b.y), 1e-6);
    EXPECT_NEAR(path_length(t), len, 1e-6);
  });
}

TEST(Spline, ArcLengthAtLeastChord) {
  prop::for_all(100, [](prop::Gen& g, int) {
    const Pose3 a{0, 0, 0, g.uniform(-kPi, kPi)};
    const Pose3 b{g.uniform(-30, 30), g.uniform(-30, 30), 0.0, g.uniform(-kPi, kPi)};
    const auto t = spline_trajectory(a, b, 3.0, SpeedProfile::ease);
    const double chord = std::hypot(b.x, b.y);
    const double arc = path_length(t);
    EXPECT_GE(arc, chord - 1e-9);
    // Non-collinear headings bend the path.
    const double chord_heading = std::atan2(b.y, b.x);
    if (std::abs(normalize_angle(a.heading - chord_heading)) > 0.1) {
      EXPECT_GT(arc, chord + 1e-6);
    }
  });
}

TEST(Spline, RejectsNonPositiveDuration) {
  EXPECT_THROW(spline_trajectory({}, {1, 0, 0, 0}, 0.0, SpeedProfile::uniform), Error);
}

// --- traffic ----------------------------------------------------------------

Actor vehicle(const std::string& id, double x, double speed, double v0) {
  ControlledMotion m;
  m.state = {{x, 0.0, 0.0}, speed, 0.0};
  m.idm.desired_speed = v0;
  return {id, default_catalog().get("sedan"), m};
}

const ControlledMotion& cm(const Actor& a) { return std::get<ControlledMotion>(a.motion); }

std::vector<Actor> step_all(const std::vector<Actor>& actors, const worldmap::MapGraph& map, double dt) {
  std::vector<Actor> next;
  for (const auto& a : actors) {
    next.push_back(std::holds_alternative<ControlledMotion>(a.motion) ? step_traffic_vehicle(a, map, actors, dt) : a);
  }
  return next;
}

TEST(Traffic, FreeRoadHoldsDesiredSpeed) {
  const auto map = worldmap::build_straight_map(300.0, 3.5, 0, 1.0);
  std::vector<Actor> actors{vehicle("v", 10.0, 12.0, 12.0)};
  for (int i = 0; i < 1000; ++i) {
    actors = step_all(actors, map, 0.01);
    EXPECT_NEAR(cm(actors[0]).state.speed, 12.0, 0.12);
  }
}

TEST(Traffic, StopsBehindStoppedLeader) {
  const auto map = worldmap::build_straight_map(300.0, 3.5, 0, 1.0);
  std::vector<Actor> actors{vehicle("f", 10.0, 10.0, 13.9),
                            {"lead", default_catalog().get("sedan"), StaticMotion{{120.0, 0.0, 0.0, 0.0}}}};
  for (int i = 0; i < 6000; ++i) actors = step_all(actors, map, 0.01);
  const auto& s = cm(actors[0]).state;
  EXPECT_LT(s.speed, 0.05);
  const double gap = 120.0 - s.pose.x - 4.5;
  EXPECT_NEAR(gap, 2.0, 0.2);
}

TEST(Traffic, RecoversLateralOffset) {
  const auto map = worldmap::build_straight_map(300.0, 3.5, 0, 1.0);
  auto v = vehicle("v", 10.0, 5.0, 5.0);
  std::get<ControlledMotion>(v.motion).state.pose.y = 1.0;
  std::vector<Actor> actors{v};
  for (int i = 0; i < 1000; ++i) actors = step_all(actors, map, 0.01);
  EXPECT_LT(std::abs(cm(actors[0]).state.pose.y), 0.05);
}

TEST(Traffic, PlatoonNeverOverlaps) {
  const auto map = worldmap::build_composite_map(
      {worldmap::StraightPiece{100.0}, worldmap::ArcPiece{80.0, 1.0, worldmap::TurnSide::left},
       worldmap::StraightPiece{900.0}},
      3.5, 0, 1.0);
  prop::for_all(10, [&](prop::Gen& g, int) {
    // Start from safe headways: bumper gap at least s0 + v*T of the follower.
    std::vector<Actor> actors;
    double x = 90.0;
    for (int i = 0; i < 5; ++i) {
      const double v0 = i == 0 ? g.uniform(4.0, 8.0) : g.uniform(10.0, 16.0);
      const double v = g.uniform(0.0, v0);
      if (i > 0) x -= 4.5 + 2.0 + 1.5 * v + g.uniform(0.0, 10.0);
      actors.push_back(vehicle("v" + std::to_string(i), x, v, v0));
    }
    for (int step = 0; step < 6000; ++step) {
      actors = step_all(actors, map, 0.01);
      for (std::size_t i = 0; i < actors.size(); ++i) {
        for (std::size_t j = i + 1; j < actors.size(); ++j) {
          ASSERT_FALSE(intersects(actors[i].footprint_at(0), actors[j].footprint_at(0))) << "step " << step;
        }
      }
    }
  });
}

TEST(Traffic, RejectsNonControlledActor) {
  const auto map = worldmap::build_straight_map(100.0, 3.5, 0, 1.0);
  const Actor a{"s", default_catalog().get("sedan"), StaticMotion{}};
  EXPECT_THROW(step_traffic_vehicle(a, map, {}, 0.01), Error);
}

// --- plane ------------------------------------------------------------------

TEST(Plane, OverheadConstantAltitude) {
  const auto map = worldmap::build_straight_map(400.0, 3.5, 0, 1.0);
  const auto t = plane_trajectory(PlaneMode::overhead, map, {{50, 0, 0}, 8, 0}, 40.0, 4.0);
  for (const auto& s : t.samples()) EXPECT_DOUBLE_EQ(s.pose.z, 40.0);
}

TEST(Plane, LandingDescendsToCentreline) {
  const auto map = worldmap::build_composite_map(
      {worldmap::StraightPiece{100.0}, worldmap::ArcPiece{300.0, 0.6, worldmap::TurnSide::right},
       worldmap::StraightPiece{300.0}},
      3.5, 0, 1.0);
  const auto t = plane_trajectory(PlaneMode::landing, map, {{20, 0, 0}, 8, 0}, 60.0, 4.5);
  const auto& s = t.samples();
  EXPECT_DOUBLE_EQ(s.front().pose.z, 60.0);
  EXPECT_EQ(s.back().pose.z, 0.0);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_LE(s[i].pose.z, s[i - 1].pose.z);
  const auto m = worldmap::nearest_sample_point(map, s.back().pose.planar());
  EXPECT_LT(std::abs(m.lateral_offset), 0.5);
}

}  // namespace
