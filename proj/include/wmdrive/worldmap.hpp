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

// Procedural lane graph: centerline samples, local frames, semantic anchors.
//
// Lateral offsets are positive to the left of the lane direction everywhere
// in this library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "wmdrive/error.hpp"
#include "wmdrive/geometry.hpp"

namespace wmdrive::worldmap {

using LaneId = std::string;

struct LanePoint {
  Pose2 pose;
  double arc_length = 0.0;
  LaneId lane_id;
  friend bool operator==(const LanePoint&, const LanePoint&) = default;
};

struct LaneSegment {
  LaneId id;
  std::vector<LanePoint> centerline;
  double width = 0.0;
  std::vector<LaneId> successors;
  std::optional<LaneId> adjacent_left;
  std::optional<LaneId> adjacent_right;

  double length() const { return centerline.empty() ? 0.0 : centerline.back().arc_length; }
  friend bool operator==(const LaneSegment&, const LaneSegment&) = default;
};

enum class AnchorKind { stop_line, traffic_sign, traffic_light };

inline const char* to_string(AnchorKind k) {
  switch (k) {
    case AnchorKind::stop_line: return "stop_line";
    case AnchorKind::traffic_sign: return "traffic_sign";
    case AnchorKind::traffic_light: return "traffic_light";
  }
  return "unknown";
}

inline AnchorKind anchor_kind_from_string(const std::string& s) {
  if (s == "stop_line") return AnchorKind::stop_line;
  if (s == "traffic_sign") return AnchorKind::traffic_sign;
  if (s == "traffic_light") return AnchorKind::traffic_light;
  throw Error(ErrorKind::invalid_argument, "unknown anchor kind: " + s);
}

struct SemanticAnchor {
  AnchorKind kind = AnchorKind::stop_line;
  Pose2 pose;
  LaneId lane_id;
  friend bool operator==(const SemanticAnchor&, const SemanticAnchor&) = default;
};

/// Result of matching a pose against map samples. Offsets are expressed in
/// the matched point's local frame.
struct SampleMatch {
  LanePoint point;
  double lateral_offset = 0.0;
  double along_offset = 0.0;
};

/// Immutable lane graph. Segments are kept sorted by id.
class MapGraph {
 public:
  MapGraph() = default;

  MapGraph(std::vector<LaneSegment> segments, std::vector<SemanticAnchor> anchors)
      : segments_(std::move(segments)), anchors_(std::move(anchors)) {
    std::sort(segments_.begin(), segments_.end(),
              [](const LaneSegment& a, const LaneSegment& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      if (!by_id_.emplace(segments_[i].id, i).second) {
        throw Error(ErrorKind::invalid_argument, "duplicate lane id: " + segments_[i].id);
      }
    }
    validate();
    build_index();
  }

  bool empty() const { return segments_.empty(); }
  std::span<const LaneSegment> segments() const { return segments_; }
  std::span<const SemanticAnchor> anchors() const { return anchors_; }

  bool contains(const LaneId& id) const { return by_id_.count(id) != 0; }

  const LaneSegment& segment(const LaneId& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end()) {
      throw Error(ErrorKind::not_found, "unknown lane id: " + id);
    }
    return segments_[it->second];
  }

  MapGraph with_anchors(std::vector<SemanticAnchor> extra) const {
    std::vector<SemanticAnchor> all = anchors_;
    all.insert(all.end(), extra.begin(), extra.end());
    return MapGraph(segments_, std::move(all));
  }

  /// Index-accelerated nearest sample; ties resolve to the lowest (lane, index).
  std::optional<std::pair<std::size_t, std::size_t>> nearest_sample_index(Vec2 p) const {
    if (segments_.empty()) {
      return std::nullopt;
    }
    const std::int64_t cx = cell_of(p.x);
    const std::int64_t cy = cell_of(p.y);
    const std::int64_t max_ring =
        std::max({std::abs(cx - min_cell_x_), std::abs(max_cell_x_ - cx), std::abs(cy - min_cell_y_),
                  std::abs(max_cell_y_ - cy)});
    double best_d2 = std::numeric_limits<double>::infinity();
    std::pair<std::size_t, std::size_t> best{0, 0};
    auto visit = [&](std::int64_t ix, std::int64_t iy) {
      auto it = grid_.find(key(ix, iy));
      if (it == grid_.end()) return;
      for (const auto& ref : it->second) {
        const Vec2 q = segments_[ref.first].centerline[ref.second].pose.position();
        const double d2 = (q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y);
        if (d2 < best_d2 || (d2 == best_d2 && ref < best)) {
          best_d2 = d2;
          best = ref;
        }
      }
    };
    for (std::int64_t r = 0; r <= max_ring; ++r) {
      if (r == 0) {
        visit(cx, cy);
      } else {
        for (std::int64_t i = -r; i <= r; ++i) {
          visit(cx + i, cy - r);
          visit(cx + i, cy + r);
        }
        for (std::int64_t i = -r + 1; i <= r - 1; ++i) {
          visit(cx - r, cy + i);
          visit(cx + r, cy + i);
        }
      }
      // Cells in ring r + 1 are at least r * cell away from p.
      const double reach = static_cast<double>(r) * kCell;
      if (best_d2 < reach * reach) {
        break;
      }
    }
    return best;
  }

  friend bool operator==(const MapGraph& a, const MapGraph& b) {
    return a.segments_ == b.segments_ && a.anchors_ == b.anchors_;
  }

 private:
  static constexpr double kCell = 4.0;

  static std::int64_t cell_of(double v) { return static_cast<std::int64_t>(std::floor(v / kCell)); }
  static std::int64_t key(std::int64_t ix, std::int64_t iy) {
    return (ix << 32) ^ (iy & 0xffffffffLL);
  }

  void validate() const {
    auto check_ref = [&](const LaneId& id, const LaneSegment& from) {
      if (!by_id_.count(id)) {
        throw Error(ErrorKind::invalid_argument,
                    "lane " + from.id + " references unknown lane " + id);
      }
    };
    for (const auto& seg : segments_) {
      if (seg.centerline.size() < 2) {
        throw Error(ErrorKind::invalid_argument, "lane " + seg.id + " needs >= 2 centerline points");
      }
      if (!(seg.width > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "lane " + seg.id + " has non-positive width");
      }
      for (std::size_t i = 0; i < seg.centerline.size(); ++i) {
        const auto& pt = seg.centerline[i];
        if (pt.lane_id != seg.id) {
          throw Error(ErrorKind::invalid_argument, "lane point carries wrong lane id in " + seg.id);
        }
        if (i == 0 ? pt.arc_length != 0.0
                   : !(pt.arc_length > seg.centerline[i - 1].arc_length)) {
          throw Error(ErrorKind::invalid_argument,
                      "lane " + seg.id + " arc lengths must start at 0 and increase strictly");
        }
      }
      for (const auto& s : seg.successors) check_ref(s, seg);
      if (seg.adjacent_left) {
        check_ref(*seg.adjacent_left, seg);
        if (segment(*seg.adjacent_left).adjacent_right != seg.id) {
          throw Error(ErrorKind::invalid_argument, "asymmetric adjacency at " + seg.id);
        }
      }
      if (seg.adjacent_right) {
        check_ref(*seg.adjacent_right, seg);
        if (segment(*seg.adjacent_right).adjacent_left != seg.id) {
          throw Error(ErrorKind::invalid_argument, "asymmetric adjacency at " + seg.id);
        }
      }
    }
    for (const auto& a : anchors_) {
      if (!by_id_.count(a.lane_id)) {
        throw Error(ErrorKind::invalid_argument, "anchor references unknown lane " + a.lane_id);
      }
    }
  }

  void build_index() {
    min_cell_x_ = min_cell_y_ = std::numeric_limits<std::int64_t>::max();
    max_cell_x_ = max_cell_y_ = std::numeric_limits<std::int64_t>::min();
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      const auto& pts = segments_[s].centerline;
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const std::int64_t ix = cell_of(pts[i].pose.x);
        const std::int64_t iy = cell_of(pts[i].pose.y);
        min_cell_x_ = std::min(min_cell_x_, ix);
        max_cell_x_ = std::max(max_cell_x_, ix);
        min_cell_y_ = std::min(min_cell_y_, iy);
        max_cell_y_ = std::max(max_cell_y_, iy);
        grid_[key(ix, iy)].emplace_back(s, i);
      }
    }
  }

  std::vector<LaneSegment> segments_;
  std::vector<SemanticAnchor> anchors_;
  std::map<LaneId, std::size_t> by_id_;
  std::unordered_map<std::int64_t, std::vector<std::pair<std::size_t, std::size_t>>> grid_;
  std::int64_t min_cell_x_ = 0, max_cell_x_ = 0, min_cell_y_ = 0, max_cell_y_ = 0;
};

// ---------------------------------------------------------------------------
// Construction

enum class TurnSide { left, right };

struct StraightPiece {
  double length = 0.0;
};

struct ArcPiece {
  double radius = 0.0;
  double sweep = 0.0;
  TurnSide side = TurnSide::left;
};

using MapPiece = std::variant<StraightPiece, ArcPiece>;

/// Lane tag for the k-th adjacent lane: adjacents alternate left, right, left, ...
inline std::string lane_tag(int adjacent_index) {
  if (adjacent_index == 0) return "c";
  const int level = (adjacent_index + 1) / 2;
  return (adjacent_index % 2 == 1 ? "l" : "r") + std::to_string(level);
}

inline double lane_tag_offset(int adjacent_index, double lane_width) {
  if (adjacent_index == 0) return 0.0;
  const int level = (adjacent_index + 1) / 2;
  return (adjacent_index % 2 == 1 ? 1.0 : -1.0) * level * lane_width;
}

inline LaneId lane_id(const std::string& tag, std::size_t piece) {
  return tag + "_" + std::to_string(piece);
}

/// Primary (ego) lane id of piece `piece`.
inline LaneId primary_lane(std::size_t piece = 0) { return lane_id("c", piece); }

/// Chains straight and arc pieces into a multi-lane road. Lane `c_<k>` is the
/// primary lane of piece k; `l<j>_<k>` / `r<j>_<k>` are the j-th lanes to its
/// left / right.
inline MapGraph build_composite_map(const std::vector<MapPiece>& pieces, double lane_width,
                                    int adjacent_lanes, double sample_spacing,
                                    const Pose2& origin = {}) {
  if (pieces.empty()) {
    throw Error(ErrorKind::invalid_argument, "composite map needs at least one piece");
  }
  if (!(lane_width > 0.0) || !(sample_spacing > 0.0) || adjacent_lanes < 0) {
    throw Error(ErrorKind::invalid_argument, "non-positive map dimensions");
  }
  std::vector<LaneSegment> segments;
  Pose2 start = origin;
  for (std::size_t k = 0; k < pieces.size(); ++k) {
    double length = 0.0;
    double curvature = 0.0;  // signed, + = left
    if (const auto* s = std::get_if<StraightPiece>(&pieces[k])) {
      if (!(s->length > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "straight piece needs positive length");
      }
      length = s->length;
    } else {
      const auto& a = std::get<ArcPiece>(pieces[k]);
      if (!(a.radius > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "arc piece needs positive radius");
      }
      if (!(a.sweep > 0.0) || a.sweep > kPi) {
        throw Error(ErrorKind::invalid_argument, "arc sweep must lie in (0, pi]");
      }
      length = a.radius * a.sweep;
      curvature = (a.side == TurnSide::left ? 1.0 : -1.0) / a.radius;
    }
    const Pose2 piece_start = start;
    auto primary_at = [&](double s) -> Pose2 {
      if (curvature == 0.0) {
        return compose(piece_start, {s, 0.0, 0.0});
      }
      const double phi = s * curvature;
      const double r = 1.0 / curvature;
      return compose(piece_start, {r * std::sin(phi), r * (1.0 - std::cos(phi)), phi});
    };

    auto n = static_cast<std::size_t>(std::ceil(length / sample_spacing - 1e-9));
    n = std::max<std::size_t>(n, 1);
    for (int adj = 0; adj <= adjacent_lanes; ++adj) {
      const double offset = lane_tag_offset(adj, lane_width);
      const double stretch = 1.0 - offset * curvature;
      if (!(stretch > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "adjacent lane offset exceeds arc radius");
      }
      LaneSegment seg;
      seg.id = lane_id(lane_tag(adj), k);
      seg.width = lane_width;
      for (std::size_t i = 0; i <= n; ++i) {
        const double s = (i == n) ? length : static_cast<double>(i) * sample_spacing;
        const Pose2 c = primary_at(s);
        const Vec2 p = c.position() + left_normal(c.heading) * offset;
        seg.centerline.push_back({{p.x, p.y, c.heading}, s * stretch, seg.id});
      }
      if (k + 1 < pieces.size()) {
        seg.successors.push_back(lane_id(lane_tag(adj), k + 1));
      }
      segments.push_back(std::move(seg));
    }
    // Adjacency: c <-> l1 <-> l2 ... and c <-> r1 <-> r2 ...
    auto find = [&](const std::string& tag) -> LaneSegment* {
      const LaneId id = lane_id(tag, k);
      for (auto& s : segments) {
        if (s.id == id) return &s;
      }
      return nullptr;
    };
    for (int adj = 1; adj <= adjacent_lanes; ++adj) {
      const int level = (adj + 1) / 2;
      const bool left = adj % 2 == 1;
      const std::string inner = level == 1 ? "c" : std::string(left ? "l" : "r") + std::to_string(level - 1);
      LaneSegment* outer_seg = find(lane_tag(adj));
      LaneSegment* inner_seg = find(inner);
      if (left) {
        inner_seg->adjacent_left = outer_seg->id;
        outer_seg->adjacent_right = inner_seg->id;
      } else {
        inner_seg->adjacent_right = outer_seg->id;
        outer_seg->adjacent_left = inner_seg->id;
      }
    }
    start = primary_at(length);
  }
  return MapGraph(std::move(segments), {});
}

/// Straight road along +x of `origin`.
inline MapGraph build_straight_map(double length, double lane_width, int adjacent_lanes,
                                   double sample_spacing, const Pose2& origin = {}) {
  if (!(length > 0.0) || !(lane_width > 0.0) || !(sample_spacing > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "non-positive map dimensions");
  }
  return build_composite_map({StraightPiece{length}}, lane_width, adjacent_lanes, sample_spacing,
                             origin);
}

/// Single circular-arc lane starting at `origin` (heading 0 by default).
inline MapGraph build_arc_map(double radius, double sweep, double lane_width,
                              double sample_spacing, TurnSide side, const Pose2& origin = {}) {
  if (!(radius > 0.0)) {
    throw Error(ErrorKind::invalid_argument, "non-positive radius");
  }
  return build_composite_map({ArcPiece{radius, sweep, side}}, lane_width, 0, sample_spacing,
                             origin);
}

// ---------------------------------------------------------------------------
// Queries

/// Frame origin at the point, x-axis along the lane heading.
inline Pose2 local_frame(const LanePoint& point) { return point.pose; }

inline SampleMatch match_against(const LanePoint& point, Vec2 p) {
  const Vec2 local = to_local(local_frame(point), p);
  return {point, local.y, local.x};
}

inline SampleMatch nearest_sample_point(const MapGraph& map, const Pose2& pose) {
  const auto idx = map.nearest_sample_index(pose.position());
  if (!idx) {
    throw Error(ErrorKind::invalid_argument, "nearest_sample_point on an empty map");
  }
  const LanePoint& pt = map.segments()[idx->first].centerline[idx->second];
  return match_against(pt, pose.position());
}

/// Nearest sample restricted to one lane (linear scan).
inline SampleMatch nearest_on_lane(const LaneSegment& seg, Vec2 p) {
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < seg.centerline.size(); ++i) {
    const Vec2 q = seg.centerline[i].pose.position();
    const double d2 = (q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return match_against(seg.centerline[best], p);
}

/// Point at arc length `s` (clamped to the segment), linear in position and
/// shortest-arc in heading between samples.
inline LanePoint point_at(const LaneSegment& seg, double s) {
  const auto& pts = seg.centerline;
  s = std::clamp(s, 0.0, seg.length());
  auto hi = std::upper_bound(pts.begin(), pts.end(), s,
                             [](double v, const LanePoint& p) { return v < p.arc_length; });
  if (hi == pts.end()) {
    LanePoint out = pts.back();
    out.arc_length = s;
    return out;
  }
  if (hi == pts.begin()) {
    return pts.front();
  }
  const LanePoint& b = *hi;
  const LanePoint& a = *(hi - 1);
  const double u = (s - a.arc_length) / (b.arc_length - a.arc_length);
  LanePoint out;
  out.lane_id = seg.id;
  out.arc_length = s;
  out.pose.x = a.pose.x + u * (b.pose.x - a.pose.x);
  out.pose.y = a.pose.y + u * (b.pose.y - a.pose.y);
  out.pose.heading = lerp_angle(a.pose.heading, b.pose.heading, u);
  return out;
}

/// Continuous station of a position on a lane: nearest sample plus its along offset.
inline LanePoint project_onto_lane(const LaneSegment& seg, Vec2 p) {
  const SampleMatch m = nearest_on_lane(seg, p);
  return point_at(seg, m.point.arc_length + m.along_offset);
}

/// Ego station: the map's nearest lane, refined by the along-lane offset.
inline LanePoint localize(const MapGraph& map, const Pose2& pose) {
  const SampleMatch m = nearest_sample_point(map, pose);
  return point_at(map.segment(m.point.lane_id), m.point.arc_length + m.along_offset);
}

/// Walks `distance` metres forward, following the first successor across
/// segment ends.
inline LanePoint advance_along_lane(const MapGraph& map, const LanePoint& start, double distance) {
  if (distance < 0.0) {
    throw Error(ErrorKind::invalid_argument, "advance_along_lane needs a non-negative distance");
  }
  const LaneSegment* seg = &map.segment(start.lane_id);
  double s = start.arc_length + distance;
  for (;;) {
    const double len = seg->length();
    if (s <= len) {
      return point_at(*seg, s);
    }
    if (seg->successors.empty()) {
      throw Error(ErrorKind::out_of_range, "advance_along_lane ran off the end of lane " + seg->id);
    }
    s -= len;
    seg = &map.segment(seg->successors.front());
  }
}

/// Signed curvature (1/m, + = left) of the lane around arc length `s`.
inline double lane_curvature(const LaneSegment& seg, double s) {
  const auto& pts = seg.centerline;
  auto hi = std::upper_bound(pts.begin(), pts.end(), s,
                             [](double v, const LanePoint& p) { return v < p.arc_length; });
  std::size_t i = static_cast<std::size_t>(hi - pts.begin());
  i = std::clamp<std::size_t>(i, 1, pts.size() - 1);
  const LanePoint& a = pts[i - 1];
  const LanePoint& b = pts[i];
  return normalize_angle(b.pose.heading - a.pose.heading) / (b.arc_length - a.arc_length);
}

/// Lane outline: left edge forward, then right edge backward.
inline std::vector<Vec2> lane_polygon(const LaneSegment& seg) {
  std::vector<Vec2> poly;
  poly.reserve(seg.centerline.size() * 2);
  const double h = 0.5 * seg.width;
  for (const auto& p : seg.centerline) {
    poly.push_back(p.pose.position() + left_normal(p.pose.heading) * h);
  }
  for (auto it = seg.centerline.rbegin(); it != seg.centerline.rend(); ++it) {
    poly.push_back(it->pose.position() - left_normal(it->pose.heading) * h);
  }
  return poly;
}

/// Distance from a lane's centerline to the outer road edge on one side,
/// walking the adjacency chain.
inline double road_edge_offset(const MapGraph& map, const LaneSegment& seg, TurnSide side) {
  double edge = 0.5 * seg.width;
  const LaneSegment* cur = &seg;
  std::set<LaneId> seen{seg.id};
  for (;;) {
    const auto& next = side == TurnSide::left ? cur->adjacent_left : cur->adjacent_right;
    if (!next || !seen.insert(*next).second) break;
    cur = &map.segment(*next);
    edge += cur->width;
  }
  return edge;
}

}  // namespace wmdrive::worldmap
