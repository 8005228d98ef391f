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
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wmdrive/actors.hpp"
#include "wmdrive/error.hpp"
#include "wmdrive/eval/client.hpp"
#include "wmdrive/eval/prompt.hpp"
#include "wmdrive/render/camera.hpp"
#include "wmdrive/scenarios/spec.hpp"

namespace wmdrive::cli {

struct ModelConfig {
  std::string kind = "oracle";  // oracle | adversarial | scripted | live
  std::string tag;              // scripted: model tag to replay
  std::string responses;        // scripted: JSONL path
  eval::LiveConfig live;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(ModelConfig, kind, tag, responses, live)

struct PromptConfig {
  bool avoid_obstacles = false;
  std::string question;   // empty = category question
  std::string free_text;  // empty = structured prompt
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(PromptConfig, avoid_obstacles, question, free_text)

struct RunConfig {
  std::uint64_t seed = 2024;
  std::string out = "out";
  int jobs = 0;  // 0 = hardware concurrency
  scenarios::SuiteConfig suite;
  scenarios::ScenarioConstants constants;
  render::CameraModel camera;
  std::string catalog;  // actor catalog JSON; empty = built-in
  ModelConfig model;
  eval::RetryPolicy retry;
  PromptConfig prompt;

  std::filesystem::path out_dir() const { return out; }
  std::filesystem::path dataset_dir() const { return out_dir() / "dataset"; }
  std::filesystem::path manifest_path() const { return dataset_dir() / "manifest.json"; }
  std::filesystem::path log_path() const { return out_dir() / "eval" / "responses.jsonl"; }
  std::filesystem::path report_dir() const { return out_dir() / "report"; }

  eval::PromptOverrides prompt_overrides() const {
    eval::PromptOverrides o;
    o.avoid_obstacles = prompt.avoid_obstacles;
    if (!prompt.question.empty()) o.question = prompt.question;
    if (!prompt.free_text.empty()) o.free_text = prompt.free_text;
    return o;
  }
};

namespace detail {

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(ErrorKind::config, where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!known.count(k)) throw Error(ErrorKind::config, "unknown key '" + k + "' in " + where);
  }
}

}  // namespace detail

inline nlohmann::json camera_to_json(const render::CameraModel& c) {
  return {{"fx", c.fx},
          {"fy", c.fy},
          {"cx", c.cx},
          {"cy", c.cy},
          {"width", c.width},
          {"height", c.height},
          {"mount", {c.mount.x, c.mount.y, c.mount.z, c.mount.heading}},
          {"near_plane", c.near_plane}};
}

inline render::CameraModel camera_from_json(const nlohmann::json& j) {
  detail::reject_unknown(j, {"fx", "fy", "cx", "cy", "width", "height", "mount", "near_plane"}, "camera");
  render::CameraModel c;
  c.fx = j.value("fx", c.fx);
  c.fy = j.value("fy", c.fy);
  c.cx = j.value("cx", c.cx);
  c.cy = j.value("cy", c.cy);
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.near_plane = j.value("near_plane", c.near_plane);
  if (j.contains("mount")) {
    const auto& m = j["mount"];
    c.mount = {m.at(0).get<double>(), m.at(1).get<double>(), m.at(2).get<double>(), m.at(3).get<double>()};
  }
  return c;
}

inline nlohmann::json config_to_json(const RunConfig& c) {
  return {{"seed", c.seed},
          {"out", c.out},
          {"jobs", c.jobs},
          {"suite", {{"counts", c.suite.counts}, {"frame_counts", c.suite.frame_counts}, {"categories", c.suite.categories}}},
          {"constants", c.constants},
          {"camera", camera_to_json(c.camera)},
          {"catalog", c.catalog},
          {"model", c.model},
          {"retry", c.retry},
          {"prompt", c.prompt}};
}

/// Missing keys keep their defaults; unknown top-level keys are errors.
inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    detail::reject_unknown(j, {"seed", "out", "jobs", "suite", "constants", "camera", "catalog", "model", "retry",
                               "prompt"},
                           "config");
    c.seed = j.value("seed", c.seed);
    c.out = j.value("out", c.out);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("suite")) {
      const auto& s = j["suite"];
      detail::reject_unknown(s, {"counts", "frame_counts", "categories"}, "suite");
      c.suite.counts = s.value("counts", c.suite.counts);
      c.suite.frame_counts = s.value("frame_counts", c.suite.frame_counts);
      c.suite.categories = s.value("categories", c.suite.categories);
    }
    if (j.contains("constants")) c.constants = j["constants"].get<scenarios::ScenarioConstants>();
    if (j.contains("camera")) c.camera = camera_from_json(j["camera"]);
    c.catalog = j.value("catalog", c.catalog);
    if (j.contains("model")) {
      detail::reject_unknown(j["model"], {"kind", "tag", "responses", "live"}, "model");
      c.model = j["model"].get<ModelConfig>();
    }
    if (j.contains("retry")) c.retry = j["retry"].get<eval::RetryPolicy>();
    if (j.contains("prompt")) c.prompt = j["prompt"].get<PromptConfig>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, std::string("bad config: ") + e.what());
  }
  c.suite.seed = c.seed;
  return c;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_json(nlohmann::json::parse(ss.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::config, "config " + path.string() + ": " + e.what());
  }
}

/// Comma-separated integers, e.g. "3,6,9".
inline std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::config, "not an integer list: " + text);
    }
  }
  if (out.empty()) throw Error(ErrorKind::config, "empty integer list");
  return out;
}

inline std::vector<std::string> parse_name_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// "kind" or "kind:tag".
inline void apply_model_flag(RunConfig& c, const std::string& flag) {
  const auto colon = flag.find(':');
  const std::string kind = flag.substr(0, colon);
  if (kind != "oracle" && kind != "adversarial" && kind != "scripted" && kind != "live") {
    throw Error(ErrorKind::config, "unknown model kind " + kind);
  }
  c.model.kind = kind;
  if (colon != std::string::npos) {
    const std::string tag = flag.substr(colon + 1);
    if (kind == "live") {
      c.model.live.model = tag;
    } else {
      c.model.tag = tag;
    }
  }
}

/// Checks everything that can be checked before any work starts.
inline void validate_config(const RunConfig& c) {
  try {
    c.camera.validate();
    if (c.out.empty()) throw Error(ErrorKind::config, "output root is empty");
    if (c.jobs < 0) throw Error(ErrorKind::config, "jobs must be >= 0");
    for (int n : c.suite.frame_counts) {
      if (n != 3 && n != 6 && n != 9) throw Error(ErrorKind::config, "frame counts must be drawn from 3, 6, 9");
    }
    for (const auto& name : c.suite.categories) scenarios::category_from_string(name);
    for (const auto& [name, n] : c.suite.counts) {
      scenarios::category_from_string(name);
      if (n < 1) throw Error(ErrorKind::config, "suite count for " + name + " must be >= 1");
    }
    if (c.retry.max_retries < 0 || c.retry.max_in_flight < 1 || c.retry.initial_backoff < 0.0 ||
        c.retry.min_interval < 0.0) {
      throw Error(ErrorKind::config, "invalid retry policy");
    }
    if (c.model.kind != "oracle" && c.model.kind != "adversarial" && c.model.kind != "scripted" &&
        c.model.kind != "live") {
      throw Error(ErrorKind::config, "unknown model kind " + c.model.kind);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config) throw;
    throw Error(ErrorKind::config, e.what());
  }
}

inline actors::ActorCatalog load_catalog(const RunConfig& c) {
  if (c.catalog.empty()) return actors::default_catalog();
  std::ifstream in(c.catalog);
  if (!in) throw Error(ErrorKind::config, "cannot read actor catalog " + c.catalog);
  try {
    return actors::catalog_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::config, "actor catalog " + c.catalog + ": " + e.what());
  } catch (const Error& e) {
    throw Error(ErrorKind::config, "actor catalog " + c.catalog + ": " + e.what());
  }
}

}  // namespace wmdrive::cli
