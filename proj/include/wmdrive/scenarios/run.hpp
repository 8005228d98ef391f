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

#include <vector>

#include "wmdrive/actors.hpp"
#include "wmdrive/dynamics.hpp"
#include "wmdrive/planning.hpp"
#include "wmdrive/worldmap.hpp"

namespace wmdrive::scenarios {

/// A finished rollout. Controller-driven actors are recorded into
/// trajectories, so every actor here is static or trajectory-driven.
struct SimulationRun {
  worldmap::MapGraph map;
  std::vector<dynamics::TimedState> ego;
  std::vector<actors::Actor> actors;
  std::vector<planning::PlanPolyline> plans;
  double duration = 0.0;

  Pose3 ego_pose_at(double t) const {
    return Pose3::from(dynamics::state_at(ego, t).pose);
  }
  double ego_speed_at(double t) const { return dynamics::state_at(ego, t).speed; }
};

}  // namespace wmdrive::scenarios
