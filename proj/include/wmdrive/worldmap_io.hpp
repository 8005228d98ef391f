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

#include <json.hpp>

#include "wmdrive/worldmap.hpp"

namespace wmdrive::worldmap {

inline constexpr int kMapFormatVersion = 1;

inline nlohmann::json map_to_json(const MapGraph& map) {
  using nlohmann::json;
  json segs = json::array();
  for (const auto& seg : map.segments()) {
    json pts = json::array();
    for (const auto& p : seg.centerline) {
      pts.push_back({p.pose.x, p.pose.y, p.pose.heading, p.arc_length});
    }
    segs.push_back({{"id", seg.id},
                    {"width", seg.width},
                    {"successors", seg.successors},
                    {"adjacent_left", seg.adjacent_left ? json(*seg.adjacent_left) : json()},
                    {"adjacent_right", seg.adjacent_right ? json(*seg.adjacent_right) : json()},
                    {"centerline", std::move(pts)}});
  }
  json anchors = json::array();
  for (const auto& a : map.anchors()) {
    anchors.push_back({{"kind", to_string(a.kind)},
                       {"lane_id", a.lane_id},
                       {"pose", {a.pose.x, a.pose.y, a.pose.heading}}});
  }
  return {{"format_version", kMapFormatVersion}, {"segments", std::move(segs)},
          {"anchors", std::move(anchors)}};
}

inline MapGraph map_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kMapFormatVersion) {
      throw Error(ErrorKind::invalid_argument,
                  "unsupported map format_version " + std::to_string(version));
    }
    std::vector<LaneSegment> segs;
    for (const auto& js : j.at("segments")) {
      LaneSegment seg;
      seg.id = js.at("id").get<std::string>();
      seg.width = js.at("width").get<double>();
      seg.successors = js.at("successors").get<std::vector<LaneId>>();
      if (!js.at("adjacent_left").is_null()) seg.adjacent_left = js["adjacent_left"].get<LaneId>();
      if (!js.at("adjacent_right").is_null()) seg.adjacent_right = js["adjacent_right"].get<LaneId>();
      for (const auto& p : js.at("centerline")) {
        seg.centerline.push_back(
            {{p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()},
             p.at(3).get<double>(),
             seg.id});
      }
      segs.push_back(std::move(seg));
    }
    std::vector<SemanticAnchor> anchors;
    for (const auto& ja : j.at("anchors")) {
      const auto& p = ja.at("pose");
      anchors.push_back({anchor_kind_from_string(ja.at("kind").get<std::string>()),
                         {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()},
                         ja.at("lane_id").get<LaneId>()});
    }
    return MapGraph(std::move(segs), std::move(anchors));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed map document: ") + e.what());
  }
}

}  // namespace wmdrive::worldmap
