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
#include <utility>
#include <vector>

#include "wmdrive/error.hpp"
#include "wmdrive/geometry.hpp"

namespace wmdrive {

struct TrajectorySample {
  double time = 0.0;
  Pose3 pose;
  double speed = 0.0;
  friend bool operator==(const TrajectorySample&, const TrajectorySample&) = default;
};

/// Timed pose sequence starting at t = 0 with strictly increasing times.
class Trajectory {
 public:
  Trajectory() = default;

  explicit Trajectory(std::vector<TrajectorySample> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
      throw Error(ErrorKind::invalid_argument, "trajectory needs at least one sample");
    }
    if (samples_.front().time != 0.0) {
      throw Error(ErrorKind::invalid_argument, "trajectory must start at t = 0");
    }
    for (std::size_t i = 1; i < samples_.size(); ++i) {
      if (!(samples_[i].time > samples_[i - 1].time)) {
        throw Error(ErrorKind::invalid_argument, "trajectory times must be strictly increasing");
      }
    }
  }

  const std::vector<TrajectorySample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  double duration() const { return samples_.empty() ? 0.0 : samples_.back().time; }

  /// Linear in position and speed, shortest arc in heading. Clamps outside [0, duration].
  TrajectorySample sample_at(double t) const {
    if (samples_.empty()) {
      throw Error(ErrorKind::out_of_range, "empty trajectory");
    }
    if (t <= samples_.front().time) {
      return samples_.front();
    }
    if (t >= samples_.back().time) {
      return samples_.back();
    }
    auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double v, const TrajectorySample& s) { return v < s.time; });
    const auto& b = *hi;
    const auto& a = *(hi - 1);
    const double u = (t - a.time) / (b.time - a.time);
    TrajectorySample out;
    out.time = t;
    out.pose.x = a.pose.x + u * (b.pose.x - a.pose.x);
    out.pose.y = a.pose.y + u * (b.pose.y - a.pose.y);
    out.pose.z = a.pose.z + u * (b.pose.z - a.pose.z);
    out.pose.heading = lerp_angle(a.pose.heading, b.pose.heading, u);
    out.speed = a.speed + u * (b.speed - a.speed);
    return out;
  }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<TrajectorySample> samples_;
};

/// Sample times 0, step, 2*step, ... with `duration` appended exactly.
inline std::vector<double> sample_times(double duration, double step) {
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor(duration / step + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * step;
    if (t < duration - 1e-9) {
      out.push_back(t);
    }
  }
  out.push_back(duration);
  if (duration <= 0.0) {
    out.assign(1, 0.0);
  }
  return out;
}

}  // namespace wmdrive
