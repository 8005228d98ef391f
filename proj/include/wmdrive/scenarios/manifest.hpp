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
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wmdrive/error.hpp"
#include "wmdrive/scenarios/spec.hpp"

namespace wmdrive::scenarios {

inline constexpr int kManifestFormatVersion = 1;

inline std::string prompt_id(Category c, int frame_count) {
  return std::string(to_string(c)) + "_f" + std::to_string(frame_count);
}

/// One (scenario, frame count) pair. Paths are relative to the dataset root.
struct ManifestRecord {
  std::string scenario_id;
  std::string category;
  nlohmann::json params;
  std::uint64_t seed = 0;
  int frame_count = 0;
  std::string question_kind;
  std::string label;
  std::vector<std::string> answer_set;
  std::string prompt_id;
  std::string grid_path;
  std::vector<std::string> frame_paths;
  std::string probe;  // empty unless a probe variant
  friend bool operator==(const ManifestRecord&, const ManifestRecord&) = default;
};

struct Manifest {
  int format_version = kManifestFormatVersion;
  std::vector<ManifestRecord> records;
  friend bool operator==(const Manifest&, const Manifest&) = default;

  /// Record key: scenario id plus frame count.
  static std::string key(const std::string& scenario_id, int frame_count) {
    return scenario_id + "#" + std::to_string(frame_count);
  }
};

struct FrameArtifacts {
  std::string grid_path;
  std::vector<std::string> frame_paths;
};

struct ManifestEntry {
  ScenarioSpec spec;
  GroundTruth truth;
  std::map<int, FrameArtifacts> artifacts;  // keyed by frame count
  std::string probe;
};

inline std::string grid_file(const std::string& scenario_id, int count) {
  return scenario_id + "/grid_" + std::to_string(count) + ".png";
}

inline std::string frame_file(const std::string& scenario_id, int k) {
  return scenario_id + "/frame_" + std::to_string(k) + ".png";
}

/// One record per (scenario, frame count); every referenced file must exist under `root`.
inline Manifest export_manifest(const std::vector<ManifestEntry>& entries, const std::filesystem::path& root) {
  Manifest m;
  auto require = [&](const std::string& rel) {
    if (!std::filesystem::exists(root / rel)) {
      throw Error(ErrorKind::io, "manifest references missing file " + (root / rel).string());
    }
  };
  for (const auto& e : entries) {
    for (int n : e.spec.frame_counts) {
      const auto it = e.artifacts.find(n);
      if (it == e.artifacts.end()) {
        throw Error(ErrorKind::io, "no artifacts for " + e.spec.id + " at " + std::to_string(n) + " frames");
      }
      require(it->second.grid_path);
      for (const auto& f : it->second.frame_paths) require(f);
      ManifestRecord r;
      r.scenario_id = e.spec.id;
      r.category = to_string(e.spec.category);
      r.params = params_to_json(e.spec.params);
      r.seed = e.spec.seed;
      r.frame_count = n;
      r.question_kind = e.truth.question_kind;
      r.label = e.truth.label;
      r.answer_set = e.truth.answer_set;
      r.prompt_id = prompt_id(e.spec.category, n);
      r.grid_path = it->second.grid_path;
      r.frame_paths = it->second.frame_paths;
      r.probe = e.probe;
      m.records.push_back(std::move(r));
    }
  }
  return m;
}

inline nlohmann::json manifest_to_json(const Manifest& m) {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : m.records) {
    nlohmann::json j{{"scenario_id", r.scenario_id},
                     {"category", r.category},
                     {"params", r.params},
                     {"seed", r.seed},
                     {"frame_count", r.frame_count},
                     {"question_kind", r.question_kind},
                     {"label", r.label},
                     {"answer_set", r.answer_set},
                     {"prompt_id", r.prompt_id},
                     {"grid_path", r.grid_path},
                     {"frame_paths", r.frame_paths}};
    if (!r.probe.empty()) j["probe"] = r.probe;
    recs.push_back(std::move(j));
  }
  return {{"format_version", m.format_version}, {"records", std::move(recs)}};
}

inline Manifest manifest_from_json(const nlohmann::json& j) {
  try {
    Manifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kManifestFormatVersion) {
      throw Error(ErrorKind::invalid_argument, "unsupported manifest format_version");
    }
    for (const auto& jr : j.at("records")) {
      ManifestRecord r;
      r.scenario_id = jr.at("scenario_id").get<std::string>();
      r.category = jr.at("category").get<std::string>();
      category_from_string(r.category);
      r.params = jr.at("params");
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.frame_count = jr.at("frame_count").get<int>();
      r.question_kind = jr.at("question_kind").get<std::string>();
      r.label = jr.at("label").get<std::string>();
      r.answer_set = jr.at("answer_set").get<std::vector<std::string>>();
      r.prompt_id = jr.at("prompt_id").get<std::string>();
      r.grid_path = jr.at("grid_path").get<std::string>();
      r.frame_paths = jr.at("frame_paths").get<std::vector<std::string>>();
      r.probe = jr.value("probe", std::string{});
      m.records.push_back(std::move(r));
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::invalid_argument, std::string("malformed manifest: ") + e.what());
  }
}

/// Stable text form: two-space indent, trailing newline.
inline std::string dump_manifest(const Manifest& m) { return manifest_to_json(m).dump(2) + "\n"; }

inline Manifest parse_manifest(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::invalid_argument, std::string("manifest is not JSON: ") + e.what());
  }
  return manifest_from_json(j);
}

/// Scenario spec reconstructed from a record.
inline ScenarioSpec spec_of(const ManifestRecord& r, std::vector<int> frame_counts) {
  ScenarioSpec s;
  s.id = r.scenario_id;
  s.category = category_from_string(r.category);
  s.params = params_from_json(s.category, r.params);
  s.seed = r.seed;
  s.frame_counts = std::move(frame_counts);
  return s;
}

}  // namespace wmdrive::scenarios
