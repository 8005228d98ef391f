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
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "wmdrive/actors.hpp"
#include "wmdrive/control.hpp"
#include "wmdrive/error.hpp"
#include "wmdrive/planning.hpp"
#include "wmdrive/worldmap.hpp"

namespace wmdrive::control {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PidGains, kp, ki, kd, integral_limit, derivative_filter)
}  // namespace wmdrive::control

namespace wmdrive::planning {
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PlanConfig, lookahead, lateral_offsets, horizon, include_adjacent,
                                                w_lat, w_dev, ego_length, ego_width, sample_dt)
}  // namespace wmdrive::planning

namespace wmdrive::scenarios {

enum class Category {
  forward_backward,
  accel_decel,
  left_right,
  traffic,
  speeding,
  open_set_object,
  plane,
  planning
};

inline constexpr std::array<Category, 8> kAllCategories{
    Category::forward_backward, Category::accel_decel,     Category::left_right, Category::traffic,
    Category::speeding,         Category::open_set_object, Category::plane,      Category::planning};

inline const char* to_string(Category c) {
  switch (c) {
    case Category::forward_backward: return "forward_backward";
    case Category::accel_decel: return "accel_decel";
    case Category::left_right: return "left_right";
    case Category::traffic: return "traffic";
    case Category::speeding: return "speeding";
    case Category::open_set_object: return "open_set_object";
    case Category::plane: return "plane";
    case Category::planning: return "planning";
  }
  return "unknown";
}

inline Category category_from_string(const std::string& s) {
  for (auto c : kAllCategories) {
    if (s == to_string(c)) return c;
  }
  throw Error(ErrorKind::invalid_argument, "unknown category: " + s);
}

inline std::vector<std::string> answer_set(Category c) {
  switch (c) {
    case Category::forward_backward: return {"forward", "backward"};
    case Category::accel_decel: return {"accelerate", "decelerate"};
    case Category::left_right: return {"left", "right"};
    case Category::traffic: return {"traffic", "no_traffic"};
    case Category::speeding: return {"speeding", "no_speeding"};
    case Category::open_set_object: return {"yes", "no"};
    case Category::plane: return {"can_keep_moving", "cannot_keep_moving"};
    case Category::planning: return {"red", "green", "blue"};
  }
  return {};
}

inline const char* question_kind(Category c) {
  switch (c) {
    case Category::forward_backward: return "ego_direction";
    case Category::accel_decel: return "ego_acceleration";
    case Category::left_right: return "ego_turn";
    case Category::traffic: return "traffic_slowdown";
    case Category::speeding: return "other_speeding";
    case Category::open_set_object: return "keep_lane";
    case Category::plane: return "keep_moving";
    case Category::planning: return "pick_trajectory";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Parameters

enum class Level { high, low };
enum class Direction { forward, backward };
enum class Rate { accel, decel };
enum class SpeedLevel { speeding_high, speeding_low, normal_high, normal_low };
enum class ObjectClass { static_object, animal, barrier };

NLOHMANN_JSON_SERIALIZE_ENUM(Level, {{Level::high, "high"}, {Level::low, "low"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Direction, {{Direction::forward, "forward"}, {Direction::backward, "backward"}})
NLOHMANN_JSON_SERIALIZE_ENUM(Rate, {{Rate::accel, "accel"}, {Rate::decel, "decel"}})
NLOHMANN_JSON_SERIALIZE_ENUM(SpeedLevel, {{SpeedLevel::speeding_high, "speeding_high"},
                                          {SpeedLevel::speeding_low, "speeding_low"},
                                          {SpeedLevel::normal_high, "normal_high"},
                                          {SpeedLevel::normal_low, "normal_low"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ObjectClass, {{ObjectClass::static_object, "static_object"},
                                           {ObjectClass::animal, "animal"},
                                           {ObjectClass::barrier, "barrier"}})
}  // namespace wmdrive::scenarios

namespace wmdrive::worldmap {
NLOHMANN_JSON_SERIALIZE_ENUM(TurnSide, {{TurnSide::left, "left"}, {TurnSide::right, "right"}})
}  // namespace wmdrive::worldmap

namespace wmdrive::actors {
NLOHMANN_JSON_SERIALIZE_ENUM(PlaneMode, {{PlaneMode::landing, "landing"}, {PlaneMode::overhead, "overhead"}})
}  // namespace wmdrive::actors

namespace wmdrive::scenarios {

template <typename E>
std::string enum_name(E e) {
  return nlohmann::json(e).get<std::string>();
}

struct ForwardBackwardParams {
  Level level = Level::high;
  Direction direction = Direction::forward;
  friend bool operator==(const ForwardBackwardParams&, const ForwardBackwardParams&) = default;
};
struct AccelDecelParams {
  Level level = Level::high;
  Rate rate = Rate::accel;
  friend bool operator==(const AccelDecelParams&, const AccelDecelParams&) = default;
};
struct LeftRightParams {
  Level curvature = Level::high;
  worldmap::TurnSide side = worldmap::TurnSide::left;
  friend bool operator==(const LeftRightParams&, const LeftRightParams&) = default;
};
struct TrafficParams {
  int level = 1;
  friend bool operator==(const TrafficParams&, const TrafficParams&) = default;
};
struct SpeedingParams {
  SpeedLevel speed_level = SpeedLevel::speeding_high;
  friend bool operator==(const SpeedingParams&, const SpeedingParams&) = default;
};
struct OpenSetParams {
  ObjectClass kind = ObjectClass::static_object;
  bool on_road = true;
  friend bool operator==(const OpenSetParams&, const OpenSetParams&) = default;
};
struct PlaneParams {
  actors::PlaneMode mode = actors::PlaneMode::landing;
  friend bool operator==(const PlaneParams&, const PlaneParams&) = default;
};
struct PlanningParams {
  int config = 1;
  friend bool operator==(const PlanningParams&, const PlanningParams&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ForwardBackwardParams, level, direction)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AccelDecelParams, level, rate)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(LeftRightParams, curvature, side)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TrafficParams, level)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SpeedingParams, speed_level)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(OpenSetParams, kind, on_road)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PlaneParams, mode)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PlanningParams, config)

/// Alternative index matches the Category enumerator order.
using ScenarioParams = std::variant<ForwardBackwardParams, AccelDecelParams, LeftRightParams, TrafficParams,
                                    SpeedingParams, OpenSetParams, PlaneParams, PlanningParams>;

inline Category category_of(const ScenarioParams& p) { return kAllCategories[p.index()]; }

inline void validate_params(const ScenarioParams& p) {
  if (const auto* t = std::get_if<TrafficParams>(&p); t && (t->level < 1 || t->level > 4)) {
    throw Error(ErrorKind::invalid_argument, "traffic level must be 1..4");
  }
  if (const auto* c = std::get_if<PlanningParams>(&p); c && (c->config < 1 || c->config > 4)) {
    throw Error(ErrorKind::invalid_argument, "planning config must be 1..4");
  }
}

inline nlohmann::json params_to_json(const ScenarioParams& p) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, p);
}

inline ScenarioParams params_from_json(Category c, const nlohmann::json& j) {
  try {
    ScenarioParams p;
    switch (c) {
      case Category::forward_backward: p = j.get<ForwardBackwardParams>(); break;
      case Category::accel_decel: p = j.get<AccelDecelParams>(); break;
      case Category::left_right: p = j.get<LeftRightParams>(); break;
      case Category::traffic: p = j.get<TrafficParams>(); break;
      case Category::speeding: p = j.get<SpeedingParams>(); break;
      case Category::open_set_object: p = j.get<OpenSetParams>(); break;
      case Category::plane: p = j.get<PlaneParams>(); break;
      case Category::planning: p = j.get<PlanningParams>(); break;
    }
    validate_params(p);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("bad scenario params: ") + e.what());
  }
}

/// Breakdown key for the parameter level of a scene.
inline std::string level_key(const ScenarioParams& p) {
  struct Visitor {
    std::string operator()(const ForwardBackwardParams& v) const { return enum_name(v.level); }
    std::string operator()(const AccelDecelParams& v) const {
      return enum_name(v.level) + "_" + enum_name(v.rate);
    }
    std::string operator()(const LeftRightParams& v) const { return enum_name(v.curvature); }
    std::string operator()(const TrafficParams& v) const { return "level_" + std::to_string(v.level); }
    std::string operator()(const SpeedingParams& v) const { return enum_name(v.speed_level); }
    std::string operator()(const OpenSetParams& v) const {
      return enum_name(v.kind) + (v.on_road ? "_on_road" : "_off_road");
    }
    std::string operator()(const PlaneParams& v) const { return enum_name(v.mode); }
    std::string operator()(const PlanningParams& v) const { return "config_" + std::to_string(v.config); }
  };
  return std::visit(Visitor{}, p);
}

struct GroundTruth {
  std::string question_kind;
  std::string label;
  std::vector<std::string> answer_set;
  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

/// Label the simulator guarantees for a parameterisation.
inline GroundTruth label_for(const ScenarioParams& params) {
  struct Visitor {
    std::string operator()(const ForwardBackwardParams& v) const {
      return v.direction == Direction::forward ? "forward" : "backward";
    }
    std::string operator()(const AccelDecelParams& v) const {
      return v.rate == Rate::accel ? "accelerate" : "decelerate";
    }
    std::string operator()(const LeftRightParams& v) const {
      return v.side == worldmap::TurnSide::left ? "left" : "right";
    }
    std::string operator()(const TrafficParams& v) const { return v.level >= 3 ? "traffic" : "no_traffic"; }
    std::string operator()(const SpeedingParams& v) const {
      return v.speed_level == SpeedLevel::speeding_high || v.speed_level == SpeedLevel::speeding_low
                 ? "speeding"
                 : "no_speeding";
    }
    std::string operator()(const OpenSetParams& v) const {
      if (v.kind == ObjectClass::animal) return "no";
      return v.on_road ? "no" : "yes";
    }
    std::string operator()(const PlaneParams& v) const {
      return v.mode == actors::PlaneMode::landing ? "cannot_keep_moving" : "can_keep_moving";
    }
    std::string operator()(const PlanningParams& v) const {
      static const std::array<const char*, 4> key{"green", "green", "blue", "red"};
      return key[static_cast<std::size_t>(v.config - 1)];
    }
  };
  validate_params(params);
  const Category c = category_of(params);
  return {question_kind(c), std::visit(Visitor{}, params), answer_set(c)};
}

struct ScenarioSpec {
  std::string id;
  Category category = Category::forward_backward;
  ScenarioParams params;
  std::uint64_t seed = 0;
  std::vector<int> frame_counts{3, 6, 9};
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

inline void validate_spec(const ScenarioSpec& s) {
  if (s.id.empty()) throw Error(ErrorKind::invalid_argument, "scenario id is empty");
  if (category_of(s.params) != s.category) {
    throw Error(ErrorKind::invalid_argument, "params do not match category for " + s.id);
  }
  validate_params(s.params);
  if (s.frame_counts.empty()) throw Error(ErrorKind::invalid_argument, "no frame counts for " + s.id);
  for (int n : s.frame_counts) {
    const bool ok = s.category == Category::planning ? n == 1 : (n == 3 || n == 6 || n == 9);
    if (!ok) throw Error(ErrorKind::invalid_argument, "unsupported frame count for " + s.id);
  }
}

inline nlohmann::json spec_to_json(const ScenarioSpec& s) {
  return {{"id", s.id},
          {"category", to_string(s.category)},
          {"params", params_to_json(s.params)},
          {"seed", s.seed},
          {"frame_counts", s.frame_counts}};
}

inline ScenarioSpec spec_from_json(const nlohmann::json& j) {
  try {
    ScenarioSpec s;
    s.id = j.at("id").get<std::string>();
    s.category = category_from_string(j.at("category").get<std::string>());
    s.params = params_from_json(s.category, j.at("params"));
    s.seed = j.at("seed").get<std::uint64_t>();
    s.frame_counts = j.at("frame_counts").get<std::vector<int>>();
    validate_spec(s);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("bad scenario spec: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Level constants (m, m/s, m/s^2)

struct TrafficLevelConstants {
  int adjacent_vehicles = 3;   // level 1, all in the neighbouring lane
  double adjacent_speed = 12.0;
  double lead_speed = 16.0;    // level 2
  double lead_gap = 35.0;
  int platoon3_count = 6;
  double platoon3_speed = 5.0;
  int platoon4_count = 8;
  double platoon4_speed = 1.5;
};

struct ScenarioConstants {
  double speed_limit = 13.9;
  double fb_speed_high = 12.0;
  double fb_speed_low = 6.0;
  double accel_high = 2.5;
  double accel_low = 1.0;
  double decel_high = 2.5;
  double decel_low = 1.0;
  double accel_start_speed = 3.0;
  double decel_start_speed = 14.0;
  double radius_high = 25.0;
  double radius_low = 80.0;
  double turn_speed = 7.0;
  TrafficLevelConstants traffic;
  double speeding_high = 25.0;
  double speeding_low = 18.0;
  double normal_high = 13.9;
  double normal_low = 10.0;
  double open_set_speed = 6.0;
  double plane_ego_speed = 8.0;
  double plane_cruise_altitude = 40.0;
  double planning_speed = 8.0;
  double lane_width = 3.5;
  control::PidGains steering;
  planning::PlanConfig planner;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(TrafficLevelConstants, adjacent_vehicles, adjacent_speed,
                                                lead_speed, lead_gap, platoon3_count, platoon3_speed,
                                                platoon4_count, platoon4_speed)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ScenarioConstants, speed_limit, fb_speed_high, fb_speed_low,
                                                accel_high, accel_low, decel_high, decel_low,
                                                accel_start_speed, decel_start_speed, radius_high, radius_low,
                                                turn_speed, traffic, speeding_high, speeding_low, normal_high,
                                                normal_low, open_set_speed, plane_ego_speed,
                                                plane_cruise_altitude, planning_speed, lane_width, steering,
                                                planner)

inline double rollout_duration(const std::vector<int>& frame_counts, double interval = 0.5) {
  int most = 1;
  for (int n : frame_counts) most = std::max(most, n);
  return (most - 1) * interval + 1.0;
}

// ---------------------------------------------------------------------------
// Seeding

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Portable uniform draws from a 64-bit engine.
template <typename Engine>
double uniform(Engine& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

// ---------------------------------------------------------------------------
// Suites

struct SuiteConfig {
  std::uint64_t seed = 2024;
  std::map<std::string, int> counts;  // per category name; missing = default
  std::vector<int> frame_counts{3, 6, 9};
  std::vector<std::string> categories;  // empty = all
};

inline int default_count(Category c) { return c == Category::speeding ? 60 : 20; }

/// Parameter combinations cycled by build_suite. Each full cycle holds every
/// label of the category's answer set.
inline std::vector<ScenarioParams> param_cycle(Category c) {
  using worldmap::TurnSide;
  switch (c) {
    case Category::forward_backward:
      return {ForwardBackwardParams{Level::high, Direction::forward}, ForwardBackwardParams{Level::high, Direction::backward},
              ForwardBackwardParams{Level::low, Direction::forward}, ForwardBackwardParams{Level::low, Direction::backward}};
    case Category::accel_decel:
      return {AccelDecelParams{Level::high, Rate::accel}, AccelDecelParams{Level::high, Rate::decel},
              AccelDecelParams{Level::low, Rate::accel}, AccelDecelParams{Level::low, Rate::decel}};
    case Category::left_right:
      return {LeftRightParams{Level::high, TurnSide::left}, LeftRightParams{Level::high, TurnSide::right},
              LeftRightParams{Level::low, TurnSide::left}, LeftRightParams{Level::low, TurnSide::right}};
    case Category::traffic:
      return {TrafficParams{1}, TrafficParams{3}, TrafficParams{2}, TrafficParams{4}};
    case Category::speeding:
      return {SpeedingParams{SpeedLevel::speeding_high}, SpeedingParams{SpeedLevel::normal_high},
              SpeedingParams{SpeedLevel::speeding_low}, SpeedingParams{SpeedLevel::normal_low}};
    case Category::open_set_object:
      return {OpenSetParams{ObjectClass::static_object, false}, OpenSetParams{ObjectClass::static_object, true},
              OpenSetParams{ObjectClass::barrier, false},       OpenSetParams{ObjectClass::animal, true},
              OpenSetParams{ObjectClass::static_object, false}, OpenSetParams{ObjectClass::barrier, true},
              OpenSetParams{ObjectClass::barrier, false},       OpenSetParams{ObjectClass::animal, false}};
    case Category::plane:
      return {PlaneParams{actors::PlaneMode::landing}, PlaneParams{actors::PlaneMode::overhead}};
    case Category::planning:
      return {PlanningParams{1}, PlanningParams{2}, PlanningParams{3}, PlanningParams{4}};
  }
  return {};
}

inline std::string scenario_id(Category c, int index) {
  return fmt::format("{}_{:03d}", to_string(c), index);
}

inline std::vector<ScenarioSpec> build_suite(const SuiteConfig& cfg) {
  std::vector<Category> cats;
  if (cfg.categories.empty()) {
    cats.assign(kAllCategories.begin(), kAllCategories.end());
  } else {
    for (const auto& name : cfg.categories) cats.push_back(category_from_string(name));
  }
  for (const auto& [name, n] : cfg.counts) {
    category_from_string(name);
    if (n < 1) throw Error(ErrorKind::invalid_argument, "suite count for " + name + " must be >= 1");
  }
  std::vector<ScenarioSpec> out;
  for (Category c : kAllCategories) {
    if (std::find(cats.begin(), cats.end(), c) == cats.end()) continue;
    const auto it = cfg.counts.find(to_string(c));
    const int n = it == cfg.counts.end() ? default_count(c) : it->second;
    const auto cycle = param_cycle(c);
    std::uint64_t state = splitmix64(cfg.seed ^ (0xC0FFEEULL * (static_cast<std::uint64_t>(c) + 1)));
    for (int i = 0; i < n; ++i) {
      state = splitmix64(state);
      ScenarioSpec s;
      s.id = scenario_id(c, i);
      s.category = c;
      s.params = cycle[static_cast<std::size_t>(i) % cycle.size()];
      s.seed = state;
      s.frame_counts = c == Category::planning ? std::vector<int>{1} : cfg.frame_counts;
      validate_spec(s);
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace wmdrive::scenarios
