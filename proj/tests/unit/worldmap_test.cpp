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
#include <limits>

#include "prop.hpp"
#include "wmdrive/worldmap.hpp"
#include "wmdrive/worldmap_io.hpp"

namespace {

using namespace wmdrive;
using namespace wmdrive::worldmap;

MapGraph three_piece_map() {
  return build_composite_map({StraightPiece{30.0}, ArcPiece{20.0, kPi / 3, TurnSide::left}, StraightPiece{25.0}},
                             3.5, 2, 1.0);
}

TEST(StraightMap, SampleCountAndNoAdjacents) {
  const auto m = build_straight_map(100.0, 3.5, 0, 1.0);
  ASSERT_EQ(m.segments().size(), 1u);
  const auto& seg = m.segments().front();
  EXPECT_EQ(seg.centerline.size(), 101u);
  EXPECT_FALSE(seg.adjacent_left);
  EXPECT_FALSE(seg.adjacent_right);
  EXPECT_NEAR(seg.length(), 100.0, 1e-12);
}

TEST(StraightMap, AdjacentLaneOffsetAtEverySample) {
  const auto m = build_straight_map(100.0, 3.5, 1, 1.0);
  const auto& c = m.segment(primary_lane());
  ASSERT_TRUE(c.adjacent_left);
  const auto& l = m.segment(*c.adjacent_left);
  ASSERT_EQ(l.centerline.size(), c.centerline.size());
  for (std::size_t i = 0; i < c.centerline.size(); ++i) {
    const Vec2 local = to_local(c.centerline[i].pose, l.centerline[i].pose.position());
    EXPECT_NEAR(local.x, 0.0, 1e-9);
    EXPECT_NEAR(local.y, 3.5, 1e-9);
  }
}

TEST(StraightMap, DegenerateLengthThrows) {
  EXPECT_THROW(build_straight_map(0.0, 3.5, 0, 1.0), Error);
}

TEST(ArcMap, FinalHeadingAndChord) {
  const auto m = build_arc_map(10.0, kPi / 2, 3.5, 0.1, TurnSide::left);
  const auto& seg = m.segments().front();
  const auto& first = seg.centerline.front().pose;
  const auto& last = seg.centerline.back().pose;
  EXPECT_NEAR(normalize_angle(last.heading - first.heading), kPi / 2, 1e-9);
  // Closed-form circle: chord of a quarter turn is r * sqrt(2).
  EXPECT_NEAR(distance(first.position(), last.position()), 10.0 * std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(seg.length(), 10.0 * kPi / 2, 1e-9);
}

TEST(ArcMap, NegativeRadiusThrows) {
  EXPECT_THROW(build_arc_map(-1.0, kPi / 2, 3.5, 0.1, TurnSide::left), Error);
}

TEST(NearestSample, ExactSampleAndSignConvention) {
  const auto m = build_straight_map(50.0, 3.5, 0, 1.0);
  const auto& p = m.segments().front().centerline[7];
  const auto hit = nearest_sample_point(m, p.pose);
  EXPECT_EQ(hit.point, p);
  EXPECT_DOUBLE_EQ(hit.lateral_offset, 0.0);
  EXPECT_DOUBLE_EQ(hit.along_offset, 0.0);

  const auto left = nearest_sample_point(m, {7.0, 1.0, 0.0});
  EXPECT_NEAR(left.lateral_offset, 1.0, 1e-12);
  EXPECT_NEAR(left.point.pose.x, 7.0, 1e-12);
}

TEST(NearestSample, MatchesBruteForceArgmin) {
  const auto m = three_piece_map();
  prop::for_all(1000, [&](prop::Gen& g, int) {
    const Pose2 pose{g.uniform(-10, 70), g.uniform(-20, 40), g.uniform(-kPi, kPi)};
    double best = std::numeric_limits<double>::infinity();
    for (const auto& seg : m.segments()) {
      for (const auto& pt : seg.centerline) best = std::min(best, distance(pt.pose.position(), pose.position()));
    }
    const auto hit = nearest_sample_point(m, pose);
    EXPECT_NEAR(distance(hit.point.pose.position(), pose.position()), best, 1e-12);
    const Vec2 local = to_local(hit.point.pose, pose.position());
    EXPECT_NEAR(hit.lateral_offset, local.y, 1e-12);
    EXPECT_NEAR(hit.along_offset, local.x, 1e-12);
  });
}

TEST(LocalFrame, IdentityRotationAndRoundTrip) {
  const LanePoint at_origin{{0.0, 0.0, 0.0}, 0.0, "x"};
  EXPECT_EQ(local_frame(at_origin), at_origin.pose);
  const Pose2 rotated{0.0, 0.0, kPi / 2};
  const Vec2 l = to_local(rotated, {1.0, 0.0});
  EXPECT_NEAR(l.x, 0.0, 1e-15);
  EXPECT_NEAR(l.y, -1.0, 1e-15);
  prop::for_all(1000, [](prop::Gen& g, int) {
    const Pose2 frame = g.pose(100.0);
    const Vec2 w = g.point(100.0);
    const Vec2 back = to_world(frame, to_local(frame, w));
    EXPECT_NEAR(back.x, w.x, 1e-12);
    EXPECT_NEAR(back.y, w.y, 1e-12);
    const Pose2 p = g.pose(100.0);
    const Pose2 q = compose(frame, relative(frame, p));
    EXPECT_NEAR(q.x, p.x, 1e-12);
    EXPECT_NEAR(q.y, p.y, 1e-12);
    EXPECT_NEAR(normalize_angle(q.heading - p.heading), 0.0, 1e-12);
  });
}

TEST(AdvanceAlongLane, ZeroStraightAndArc) {
  const auto s = build_straight_map(100.0, 3.5, 0, 1.0);
  const auto start = s.segments().front().centerline[3];
  EXPECT_EQ(advance_along_lane(s, start, 0.0), start);
  const auto ten = advance_along_lane(s, start, 10.0);
  EXPECT_NEAR(ten.pose.x, 13.0, 1e-12);
  EXPECT_NEAR(ten.pose.y, 0.0, 1e-12);

  const auto a = build_arc_map(10.0, kPi, 3.5, 0.1, TurnSide::left);
  const auto a0 = a.segments().front().centerline.front();
  const auto a5 = advance_along_lane(a, a0, 5.0);
  EXPECT_NEAR(normalize_angle(a5.pose.heading - a0.pose.heading), 0.5, 1e-9);
}

TEST(AdvanceAlongLane, AdditiveAcrossSegments) {
  const auto m = three_piece_map();
  const auto start = point_at(m.segment(primary_lane(0)), 2.0);
  prop::for_all(500, [&](prop::Gen& g, int) {
    const double a = g.uniform(0.0, 35.0);
    const double b = g.uniform(0.0, 35.0);
    const auto twice = advance_along_lane(m, advance_along_lane(m, start, a), b);
    const auto once = advance_along_lane(m, start, a + b);
    EXPECT_LT(distance(twice.pose.position(), once.pose.position()), 1e-9);
  });
}

TEST(MapGraph, AdjacencyIsSymmetric) {
  const auto m = three_piece_map();
  for (const auto& seg : m.segments()) {
    if (seg.adjacent_left) {
      EXPECT_EQ(m.segment(*seg.adjacent_left).adjacent_right, seg.id);
    }
    if (seg.adjacent_right) {
      EXPECT_EQ(m.segment(*seg.adjacent_right).adjacent_left, seg.id);
    }
  }
}

TEST(MapGraph, UnknownLaneThrowsNotFound) {
  const auto m = build_straight_map(10.0, 3.5, 0, 1.0);
  try {
    m.segment("nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_found);
  }
}

TEST(MapIo, JsonRoundTrip) {
  const auto m = three_piece_map().with_anchors({{AnchorKind::stop_line, {40.0, 0.0, 0.0}, primary_lane(0)}});
  const auto back = map_from_json(nlohmann::json::parse(map_to_json(m).dump()));
  ASSERT_EQ(back.segments().size(), m.segments().size());
  for (std::size_t i = 0; i < m.segments().size(); ++i) EXPECT_EQ(back.segments()[i], m.segments()[i]);
  ASSERT_EQ(back.anchors().size(), 1u);
  EXPECT_EQ(back.anchors()[0], m.anchors()[0]);
}

TEST(MapIo, RejectsWrongVersion) {
  auto j = map_to_json(build_straight_map(10.0, 3.5, 0, 1.0));
  j["format_version"] = 99;
  EXPECT_THROW(map_from_json(j), Error);
}

}  // namespace
