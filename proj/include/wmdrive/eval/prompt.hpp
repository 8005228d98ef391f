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

#include <cstdint>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "wmdrive/render/frames.hpp"
#include "wmdrive/scenarios/spec.hpp"

namespace wmdrive::eval {

using scenarios::Category;

struct PromptOverrides {
  bool avoid_obstacles = false;               // planning only
  std::optional<std::string> question;        // replaces the category question
  std::optional<std::string> free_text;       // replaces the whole prompt; no scoring label
};

inline const char* camera_statement(Category c) {
  return c == Category::speeding
             ? "All are taken from the same camera that is fixed on a moving car going at the speed limit."
             : "The frames come from a camera fixed on a moving car.";
}

inline std::string category_question(Category c, const PromptOverrides& o = {}) {
  switch (c) {
    case Category::forward_backward: return "Is the car moving forward or backward?";
    case Category::accel_decel: return "Is the car accelerating or decelerating?";
    case Category::left_right: return "Is the car turning left or right?";
    case Category::traffic: return "is there traffic causing the car to slow down?";
    case Category::speeding: return "Is the other car on the road speeding?";
    case Category::open_set_object: return "Can the car keep moving in the same lane?";
    case Category::plane: return "Can the car keep moving along the road?";
    case Category::planning:
      return std::string("The coloured lines drawn on the road are candidate trajectories for the car. "
                         "Which trajectory (red, green or blue) should the car follow to stay in the same lane") +
             (o.avoid_obstacles ? " while avoiding obstacles?" : "?");
  }
  return {};
}

inline std::string grid_statement(int frame_count) {
  if (frame_count == 1) return "The image is a single camera frame.";
  const int cols = render::grid_columns(frame_count);
  const int rows = frame_count / cols;
  return fmt::format(
      "The image is a grid of {} video frames in {} row{} of {}, ordered left to right and top to bottom; "
      "the number in the corner of each frame gives its position. Each frame is half a second apart.",
      frame_count, rows, rows == 1 ? "" : "s", cols);
}

inline std::string answer_instruction(Category c) {
  std::string labels;
  for (const auto& l : scenarios::answer_set(c)) {
    if (!labels.empty()) labels += ", ";
    labels += l;
  }
  return "End your reply with a final line of the form \"ANSWER: <label>\" where <label> is one of: " + labels + ".";
}

/// Deterministic prompt text for a category and frame count.
inline std::string build_prompt(Category c, int frame_count, const PromptOverrides& o = {}) {
  if (o.free_text) return *o.free_text;
  const std::string question = o.question ? *o.question : category_question(c, o);
  const std::string describe = frame_count == 1 ? "Describe what is likely going on in the frame."
                                                : "Describe what is likely going on in each frame.";
  return fmt::format("{}\n{}\n{}\n{}\n{}", grid_statement(frame_count), camera_statement(c), describe, question,
                     answer_instruction(c));
}

/// 64-bit FNV-1a, hex.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace wmdrive::eval
