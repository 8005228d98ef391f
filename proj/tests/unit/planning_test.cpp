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

#include <array>
#include <cmath>
#include <vector>

#include "prop.hpp"
#include "wmdrive/planning.hpp"

namespace {

using namespace wmdrive;
using namespace wmdrive::planning;

/// Coefficients from the 6x6 boundary system, solved by Gaussian elimination
/// with partial pivoting.
std::array<double, 6> solve_boundary_system(const BoundaryState& a, const BoundaryState& b, double T) {
  std::array<std::array<double, 7>, 6> m{};
  auto row = [&](int r, double t, int deriv, double rhs) {
    for (int i = 0; i < 6; ++i) {
      double coef = 0.0;
      if (i >= deriv) {
        double f = 1.0;
        for (int d = 0; d < deriv; ++d) f *= i - d;
        coef = f * std::pow(t, i - deriv);
      }
      m[r][i] = coef;
    }
    m[r][6] = rhs;
  };
  row(0, 0.0, 0, a.position);
  row(1, 0.0, 1, a.velocity);
  row(2, 0.0, 2, a.acceleration);
  row(3, T, 0, b.position);
  row(4, T, 1, b.velocity);
  row(5, T, 2, b.acceleration);
  for (int col = 0; col < 6; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 6; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
    }
    std::swap(m[col], m[pivot]);
    for (int r = 0; r < 6; ++r) {
      if (r == col) continue;
      const double f = m[r][col] / m[col][col];
      for (int c = col; c < 7; ++c) m[r][c] -= f * m[col][c];
    }
  }
  std::array<double, 6> out{};
  for (int i = 0; i < 6; ++i) out[i] = m[i][6] / m[i][i];
  return out;
}

BoundaryState random_boundary(prop::Gen& g) {
  return {g.uniform(-10, 10), g.uniform(-5, 5), g.uniform(-3, 3)};
}

TEST(Quintic, ConstantWhenStartEqualsEnd) {
  const auto q = quintic_fit({3.0, 0, 0}, {3.0, 0, 0}, 2.0);
  EXPECT_EQ(q.c[0], 3.0);
  for (int i = 1; i < 6; ++i) EXPECT_EQ(q.c[i], 0.0);
  const auto s = quintic_eval(q, 0.7);
  EXPECT_EQ(s.position, 3.0);
  EXPECT_EQ(s.velocity, 0.0);
  EXPECT_EQ(s.acceleration, 0.0);
}

TEST(Quintic, UnitStepMatchesLinearSolve) {
  const auto q = quintic_fit({0, 0, 0}, {1, 0, 0}, 1.0);
  const auto ref = solve_boundary_system({0, 0, 0}, {1, 0, 0}, 1.0);
  const std::array<double, 6> closed{0, 0, 0, 10, -15, 6};
  for (int i = 0; i < 6; ++i) {
    EXPECT_NEAR(q.c[i], ref[i], 1e-12);
    EXPECT_NEAR(ref[i], closed[i], 1e-12);
  }
}

TEST(Quintic, RandomFitsMatchLinearSolve) {
  prop::for_all(200, [](prop::Gen& g, int) {
    const auto a = random_boundary(g);
    const auto b = random_boundary(g);
    const double T = g.uniform(0.5, 6.0);
    const auto q = quintic_fit(a, b, T);
    const auto ref = solve_boundary_system(a, b, T);
    for (int i = 0; i < 6; ++i) EXPECT_NEAR(q.c[i], ref[i], 1e-9 * (1.0 + std::abs(ref[i])));
  });
}

TEST(Quintic, ReproducesBoundaries) {
  prop::for_all(1000, [](prop::Gen& g, int) {
    const auto a = random_boundary(g);
    const auto b = random_boundary(g);
    const double T = g.uniform(0.5, 6.0);
    const auto q = quintic_fit(a, b, T);
    const auto s0 = quintic_eval(q, 0.0);
    const auto s1 = quintic_eval(q, T);
    EXPECT_NEAR(s0.position, a.position, 1e-9);
    EXPECT_NEAR(s0.velocity, a.velocity, 1e-9);
    EXPECT_NEAR(s0.acceleration, a.acceleration, 1e-9);
    EXPECT_NEAR(s1.position, b.position, 1e-9);
    EXPECT_NEAR(s1.velocity, b.velocity, 1e-9);
    EXPECT_NEAR(s1.acceleration, b.acceleration, 1e-9);
  });
}

TEST(Quintic, DerivativesMatchFiniteDifferences) {
  prop::for_all(200, [](prop::Gen& g, int) {
    const double T = g.uniform(1.0, 5.0);
    const auto q = quintic_fit(random_boundary(g), random_boundary(g), T);
    const double t = g.uniform(0.01, T - 0.01);
    const double h = 1e-5;
    const auto lo = quintic_eval(q, t - h);
    const auto mid = quintic_eval(q, t);
    const auto hi = quintic_eval(q, t + h);
    EXPECT_NEAR(mid.velocity, (hi.position - lo.position) / (2 * h), 1e-6);
    EXPECT_NEAR(mid.acceleration, (hi.velocity - lo.velocity) / (2 * h), 1e-6);
  });
}

TEST(Quintic, TimeScalingCovariance) {
  prop::for_all(200, [](prop::Gen& g, int) {
    const auto a = random_boundary(g);
    const auto b = random_boundary(g);
    const double T = g.uniform(0.5, 4.0);
    const double k = g.uniform(0.3, 3.0);
    const auto q = quintic_fit(a, b, T);
    const auto qk = quintic_fit({a.position, a.velocity / k, a.acceleration / (k * k)},
                                {b.position, b.velocity / k, b.acceleration / (k * k)}, k * T);
    for (int i = 0; i <= 10; ++i) {
      const double t = T * i / 10.0;
      EXPECT_NEAR(quintic_eval(q, t).position, quintic_eval(qk, std::min(k * t, k * T)).position, 1e-9);
    }
  });
}

TEST(Quintic, Errors) {
  EXPECT_THROW(quintic_fit({}, {}, 0.0), Error);
  EXPECT_THROW(quintic_fit({}, {}, -1.0), Error);
  const auto q = quintic_fit({}, {1, 0, 0}, 1.0);
  EXPECT_THROW(quintic_eval(q, 1.1), Error);
  EXPECT_THROW(quintic_eval(q, -0.1), Error);
}

// --- lattice ----------------------------------------------------------------

TEST(Lattice, SingleCentreTarget) {
  const auto map = worldmap::build_straight_map(100.0, 3.5, 0, 1.0);
  PlanConfig cfg;
  cfg.lateral_offsets = {0.0};
  const auto t = lattice_targets(map, {{10, 0, 0}, 7.0, 0}, cfg);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0].pose.x, 30.0, 1e-9);
  EXPECT_NEAR(t[0].pose.y, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(t[0].speed, 7.0);
}

TEST(Lattice, OffsetsMatchGeometryOracle) {
  const auto map = worldmap::build_composite_map(
      {worldmap::StraightPiece{15.0}, worldmap::ArcPiece{40.0, 1.0, worldmap::TurnSide::right}}, 3.5, 0, 1.0);
  PlanConfig cfg;
  const VehicleState ego{{4.0, 0.0, 0.0}, 5.0, 0};
  const auto ahead = worldmap::advance_along_lane(map, worldmap::localize(map, ego.pose), cfg.lookahead);
  const auto t = lattice_targets(map, ego, cfg);
  ASSERT_EQ(t.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec2 expected = to_world(ahead.pose, {0.0, cfg.lateral_offsets[i]});
    EXPECT_NEAR(t[i].pose.x, expected.x, 1e-9);
    EXPECT_NEAR(t[i].pose.y, expected.y, 1e-9);
    EXPECT_NEAR(t[i].pose.heading, ahead.pose.heading, 1e-12);
    EXPECT_NEAR(t[i].ego_lane_lateral, cfg.lateral_offsets[i], 1e-9);
  }
}

TEST(Lattice, ArcTargetHeadingRotates) {
  const auto map = worldmap::build_arc_map(10.0, kPi, 3.5, 0.1, worldmap::TurnSide::left);
  PlanConfig cfg;
  cfg.lookahead = 5.0;
  cfg.lateral_offsets = {0.0};
  const auto t = lattice_targets(map, {{0, 0, 0}, 3.0, 0}, cfg);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0].pose.heading, 0.5, 1e-9);
  EXPECT_NEAR(t[0].pose.x, 10.0 * std::sin(0.5), 1e-6);
  EXPECT_NEAR(t[0].pose.y, 10.0 * (1 - std::cos(0.5)), 1e-6);
}

TEST(Lattice, TooShortThrows) {
  const auto map = worldmap::build_straight_map(20.0, 3.5, 0, 1.0);
  try {
    lattice_targets(map, {{10, 0, 0}, 5.0, 0}, PlanConfig{});
    FAIL() << "expected a throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::out_of_range);
  }
}

TEST(Lattice, CandidateCountScalesWithAdjacents) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 2, 1.0);
  const VehicleState ego{{10, 0, 0}, 8.0, 0};
  for (int n_offsets = 1; n_offsets <= 4; ++n_offsets) {
    PlanConfig cfg;
    cfg.lateral_offsets.assign(static_cast<std::size_t>(n_offsets), 0.0);
    for (int i = 0; i < n_offsets; ++i) cfg.lateral_offsets[static_cast<std::size_t>(i)] = 0.5 * i;
    EXPECT_EQ(plan(map, ego, {}, cfg).ranked.size(), static_cast<std::size_t>(n_offsets));
    cfg.include_adjacent = true;
    EXPECT_EQ(plan(map, ego, {}, cfg).ranked.size(), static_cast<std::size_t>(3 * n_offsets));
  }
  const auto lone = worldmap::build_straight_map(200.0, 3.5, 0, 1.0);
  PlanConfig cfg;
  cfg.include_adjacent = true;
  EXPECT_EQ(plan(lone, ego, {}, cfg).ranked.size(), 3u);
}

// --- plan -------------------------------------------------------------------

OrientedBox block_at(const VehicleState& ego, double along, double lateral) {
  const Vec2 c = to_world(ego.pose, {along, lateral});
  return {c, ego.pose.heading, 1.2, 1.6};
}

/// The four obstacle layouts of the planning scenes.
std::vector<OrientedBox> layout(int config, const VehicleState& ego, double along, double jitter) {
  switch (config) {
    case 2: return {block_at(ego, along, -3.2 + jitter)};
    case 3: return {block_at(ego, along, -0.9 + jitter)};
    case 4: return {block_at(ego, along, 0.9 + jitter)};
    default: return {};
  }
}

TEST(Plan, NoObstaclesPicksGreenCentre) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 2, 1.0);
  const auto r = plan(map, {{30, 0, 0}, 8.0, 0}, {}, PlanConfig{});
  ASSERT_TRUE(r.feasible());
  EXPECT_EQ(r.best()->color_tag, ColorTag::green);
  EXPECT_NEAR(r.best()->cost, 0.0, 1e-12);
}

TEST(Plan, ColourTagsUniqueAndOrderedLeftToRight) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 2, 1.0);
  const auto r = plan(map, {{30, 0, 0}, 8.0, 0}, {}, PlanConfig{});
  ASSERT_EQ(r.ranked.size(), 3u);
  for (const auto& c : r.ranked) {
    ASSERT_TRUE(c.color_tag);
    const double lat = c.target.ego_lane_lateral;
    EXPECT_EQ(*c.color_tag, lat > 0.5 ? ColorTag::blue : lat < -0.5 ? ColorTag::red : ColorTag::green);
  }
  const auto lines = plan_polylines(r);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_NE(lines[0].color, lines[1].color);
  EXPECT_NE(lines[1].color, lines[2].color);
}

TEST(Plan, AnswerKeyOverJitteredLayouts) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 2, 1.0);
  const std::array<ColorTag, 4> key{ColorTag::green, ColorTag::green, ColorTag::blue, ColorTag::red};
  prop::for_all(10, [&](prop::Gen& g, int) {
    const VehicleState ego{{30.0 + g.uniform(-2, 2), 0.0, 0.0}, 8.0, 0};
    const double along = 19.0 + g.uniform(-0.5, 0.5);
    const double jitter = g.uniform(-0.1, 0.1);
    for (int config = 1; config <= 4; ++config) {
      const auto obstacles = layout(config, ego, along, jitter);
      const auto r = plan(map, ego, obstacles, PlanConfig{});
      ASSERT_TRUE(r.feasible()) << "config " << config;
      EXPECT_EQ(r.best()->color_tag, key[static_cast<std::size_t>(config - 1)]) << "config " << config;
    }
  });
}

TEST(Plan, AllCorridorsBlockedIsInfeasible) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 2, 1.0);
  const VehicleState ego{{30, 0, 0}, 8.0, 0};
  const std::vector<OrientedBox> wall{{to_world(ego.pose, {19.0, 0.0}), 0.0, 1.0, 8.0}};
  const auto r = plan(map, ego, wall, PlanConfig{});
  EXPECT_FALSE(r.feasible());
  EXPECT_EQ(r.best(), nullptr);
  EXPECT_EQ(r.ranked.size(), 3u);
  for (const auto& c : r.ranked) EXPECT_TRUE(c.collides);
}

TEST(Plan, Deterministic) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 2, 1.0);
  const VehicleState ego{{30, 0.2, 0.05}, 8.0, 0};
  const auto obstacles = layout(3, ego, 19.0, 0.0);
  const auto a = plan(map, ego, obstacles, PlanConfig{});
  const auto b = plan(map, ego, obstacles, PlanConfig{});
  ASSERT_EQ(a.ranked.size(), b.ranked.size());
  for (std::size_t i = 0; i < a.ranked.size(); ++i) {
    EXPECT_EQ(a.ranked[i].trajectory, b.ranked[i].trajectory);
    EXPECT_EQ(a.ranked[i].color_tag, b.ranked[i].color_tag);
  }
}

TEST(Plan, TiesBrokenBySmallestOffsetThenLeftmost) {
  const auto map = worldmap::build_straight_map(200.0, 3.5, 0, 1.0);
  PlanConfig cfg;
  cfg.w_lat = 0.0;
  cfg.w_dev = 0.0;
  cfg.lateral_offsets = {-1.0, 1.0, 0.0, -2.0};
  const auto r = plan(map, {{30, 0, 0}, 8.0, 0}, {}, cfg);
  ASSERT_EQ(r.ranked.size(), 4u);
  EXPECT_NEAR(r.ranked[0].target.ego_lane_lateral, 0.0, 1e-9);
  EXPECT_NEAR(r.ranked[1].target.ego_lane_lateral, 1.0, 1e-9);
  EXPECT_NEAR(r.ranked[2].target.ego_lane_lateral, -1.0, 1e-9);
  EXPECT_NEAR(r.ranked[3].target.ego_lane_lateral, -2.0, 1e-9);
}

// --- collision --------------------------------------------------------------

Trajectory straight_run(double speed, double duration) {
  std::vector<TrajectorySample> s;
  for (double t : sample_times(duration, 0.05)) s.push_back({t, {speed * t, 0.0, 0.0, 0.0}, speed});
  return Trajectory(std::move(s));
}

bool dense_oracle(const Trajectory& traj, const std::vector<OrientedBox>& obstacles, const Footprint& fp) {
  for (double t : sample_times(traj.duration(), 0.001)) {
    const auto s = traj.sample_at(t);
    const OrientedBox box{{s.pose.x, s.pose.y}, s.pose.heading, fp.length, fp.width};
    for (const auto& ob : obstacles) {
      if (intersects(box, ob)) return true;
    }
  }
  return false;
}

TEST(Collision, Examples) {
  const auto traj = straight_run(8.0, 3.0);
  EXPECT_FALSE(collision_check(traj, {}, {}));
  const std::vector<OrientedBox> mid{{{12.0, 0.0}, 0.0, 1.0, 1.0}};
  EXPECT_TRUE(collision_check(traj, mid, {}));
}

TEST(Collision, NearMissAgreesWithDenseOracle) {
  const Footprint fp;
  prop::for_all(50, [&](prop::Gen& g, int) {
    const double speed = g.uniform(3.0, 12.0);
    const auto traj = straight_run(speed, 3.0);
    const double w = g.uniform(0.5, 2.0);
    const double side = g.coin() ? 1.0 : -1.0;
    const double x = g.uniform(0.0, 3.0 * speed);
    const std::vector<OrientedBox> miss{{{x, side * (0.5 * fp.width + 0.5 * w + 0.05)}, 0.0, 1.0, w}};
    EXPECT_FALSE(collision_check(traj, miss, fp));
    EXPECT_FALSE(dense_oracle(traj, miss, fp));
    const std::vector<OrientedBox> graze{{{x, side * (0.5 * fp.width + 0.5 * w - 0.05)}, 0.0, 1.0, w}};
    EXPECT_TRUE(collision_check(traj, graze, fp));
    EXPECT_TRUE(dense_oracle(traj, graze, fp));
  });
}

}  // namespace
