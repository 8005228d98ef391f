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
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "wmdrive/cli/config.hpp"
#include "wmdrive/eval/parse.hpp"
#include "wmdrive/eval/report.hpp"
#include "wmdrive/eval/score.hpp"
#include "wmdrive/render/frames.hpp"
#include "wmdrive/render/image.hpp"
#include "wmdrive/scenarios/checks.hpp"
#include "wmdrive/scenarios/generate.hpp"
#include "wmdrive/scenarios/manifest.hpp"
#include "wmdrive/version.hpp"

namespace wmdrive::cli {

/// Process exit status for an error kind.
inline int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config:
    case ErrorKind::invalid_argument: return 2;
    case ErrorKind::generation: return 3;
    case ErrorKind::transport:
    case ErrorKind::auth:
    case ErrorKind::payload_too_large: return 4;
    case ErrorKind::scoring: return 5;
    default: return 1;
  }
}

inline std::string config_hash(const RunConfig& cfg) { return eval::fnv1a_hex(config_to_json(cfg).dump()); }

/// run_meta_<command>.json under the output root.
inline nlohmann::json write_run_meta(const RunConfig& cfg, const std::string& command) {
  const nlohmann::json meta{{"command", command},
                            {"tool_version", kVersion},
                            {"seed", cfg.seed},
                            {"config_hash", config_hash(cfg)},
                            {"config", config_to_json(cfg)}};
  eval::detail::write_text(cfg.out_dir() / ("run_meta_" + command + ".json"), meta.dump(2) + "\n");
  return meta;
}

inline int worker_count(int jobs) {
  if (jobs > 0) return jobs;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. If any call throws,
/// the exception from the lowest index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(worker_count(jobs)), n);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Renders the largest frame count once and cuts every grid from its prefix.
inline std::map<int, scenarios::FrameArtifacts> render_artifacts(const scenarios::SimulationRun& run,
                                                                 const std::string& id,
                                                                 const std::vector<int>& frame_counts,
                                                                 const render::CameraModel& cam,
                                                                 const std::filesystem::path& root) {
  const int most = *std::max_element(frame_counts.begin(), frame_counts.end());
  const auto frames = render::sample_frames(run, cam, render::kFrameInterval, most);
  std::vector<std::string> frame_paths;
  for (int k = 1; k <= most; ++k) {
    frame_paths.push_back(scenarios::frame_file(id, k));
    render::write_png(root / frame_paths.back(), frames[static_cast<std::size_t>(k - 1)].pixels);
  }
  std::map<int, scenarios::FrameArtifacts> out;
  for (int n : frame_counts) {
    const auto grid = render::compose_grid(std::span(frames).first(static_cast<std::size_t>(n)));
    scenarios::FrameArtifacts a;
    a.grid_path = scenarios::grid_file(id, n);
    a.frame_paths.assign(frame_paths.begin(), frame_paths.begin() + n);
    render::write_png(root / a.grid_path, grid.pixels);
    out[n] = std::move(a);
  }
  return out;
}

inline void write_manifest(const std::filesystem::path& path, const scenarios::Manifest& m) {
  eval::detail::write_text(path, scenarios::dump_manifest(m));
}

inline scenarios::Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return scenarios::parse_manifest(ss.str());
}

/// Simulates, checks and renders the suite; writes images and manifest.json.
inline scenarios::Manifest cmd_gen(const RunConfig& cfg) {
  validate_config(cfg);
  const auto catalog = load_catalog(cfg);
  auto suite_cfg = cfg.suite;
  suite_cfg.seed = cfg.seed;
  const auto suite = scenarios::build_suite(suite_cfg);
  const auto root = cfg.dataset_dir();
  std::vector<scenarios::ManifestEntry> entries(suite.size());
  parallel_for(suite.size(), cfg.jobs, [&](std::size_t i) {
    const auto& spec = suite[i];
    scenarios::GeneratedScenario g;
    try {
      g = scenarios::generate(spec, cfg.constants, catalog);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::io) throw;
      throw Error(ErrorKind::generation, spec.id + ": " + e.what());
    }
    const auto violations = scenarios::check_label_soundness(spec, g.run, g.truth, cfg.constants);
    if (!violations.empty()) {
      throw Error(ErrorKind::generation, spec.id + " breaks its label contract: " + violations.front());
    }
    entries[i].spec = spec;
    entries[i].truth = g.truth;
    entries[i].artifacts = render_artifacts(g.run, spec.id, spec.frame_counts, cfg.camera, root);
  });
  auto manifest = scenarios::export_manifest(entries, root);
  write_manifest(cfg.manifest_path(), manifest);
  write_run_meta(cfg, "gen");
  return manifest;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}.{:03d}Z", tm.tm_year + 1900, tm.tm_mon + 1,
                     tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
}

/// Records selected by the category and frame-count filters. Single-frame
/// records (planning) pass the frame filter.
inline bool selected(const RunConfig& cfg, const scenarios::ManifestRecord& r) {
  const auto& cats = cfg.suite.categories;
  if (!cats.empty() && std::find(cats.begin(), cats.end(), r.category) == cats.end()) return false;
  const auto& fc = cfg.suite.frame_counts;
  return r.frame_count == 1 || std::find(fc.begin(), fc.end(), r.frame_count) != fc.end();
}

struct EvalSummary {
  std::size_t queried = 0;
  std::size_t skipped = 0;
  std::vector<std::string> failures;
};

/// Queries every selected manifest record once and appends to the response log.
/// With `resume`, records already logged for this model are skipped; without
/// it, any logged record for this model is a config error. Per-record transport
/// errors are collected and the run continues; authentication and configuration
/// errors stop it.
inline EvalSummary cmd_eval(const RunConfig& cfg, eval::ModelClient& client, bool resume, bool rate_limited,
                            std::ostream* progress = nullptr) {
  validate_config(cfg);
  const auto manifest = read_manifest(cfg.manifest_path());
  const auto log_path = cfg.log_path();
  const std::string model = client.model_tag();
  std::set<std::string> done;
  if (std::filesystem::exists(log_path)) {
    for (const auto& r : eval::read_log(log_path)) {
      if (!resume && r.model == model) {
        throw Error(ErrorKind::config, "response log already holds records for " + model +
                                           "; pass --resume or remove " + log_path.string());
      }
      done.insert(eval::resume_key(r));
    }
  }
  std::vector<const scenarios::ManifestRecord*> todo;
  EvalSummary summary;
  for (const auto& r : manifest.records) {
    if (!selected(cfg, r)) continue;
    if (done.count(eval::resume_key(r.scenario_id, r.frame_count, model))) {
      ++summary.skipped;
      continue;
    }
    todo.push_back(&r);
  }
  write_run_meta(cfg, "eval");

  const auto overrides = cfg.prompt_overrides();
  std::unique_ptr<eval::RateGate> gate;
  if (rate_limited) gate = std::make_unique<eval::RateGate>(cfg.retry.min_interval, cfg.retry.max_in_flight);
  std::mutex mu;
  std::atomic<bool> fatal{false};
  auto one = [&](std::size_t i) {
    if (fatal) return;
    const auto& r = *todo[i];
    eval::QueryRequest req;
    req.scenario_id = r.scenario_id;
    req.frame_count = r.frame_count;
    req.category = scenarios::category_from_string(r.category);
    req.prompt = eval::build_prompt(req.category, r.frame_count, overrides);
    const auto bytes = render::read_bytes(cfg.dataset_dir() / r.grid_path);
    req.png.assign(bytes.begin(), bytes.end());
    req.label = r.label;
    try {
      const auto res = eval::query_model(client, req, cfg.retry, gate.get());
      eval::LogRecord rec;
      rec.scenario_id = r.scenario_id;
      rec.frame_count = r.frame_count;
      rec.model = model;
      rec.category = r.category;
      rec.prompt_hash = eval::fnv1a_hex(req.prompt);
      rec.raw_response = res.text;
      rec.parsed_label = eval::parse_answer(res.text, req.category).label;
      rec.latency = res.latency;
      rec.timestamp = utc_timestamp();
      std::lock_guard lock(mu);
      eval::append_log(log_path, rec);
      ++summary.queried;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::auth || e.kind() == ErrorKind::config || e.kind() == ErrorKind::io) {
        fatal = true;
        throw;
      }
      std::lock_guard lock(mu);
      summary.failures.push_back(fmt::format("{} frames={}: {}", r.scenario_id, r.frame_count, e.what()));
      if (progress) *progress << "failed " << summary.failures.back() << "\n";
    }
  };
  parallel_for(todo.size(), rate_limited ? cfg.retry.max_in_flight : 1, one);
  return summary;
}

/// Reads the log and manifest, scores, and writes the report files.
inline eval::MetricsReport cmd_score(const std::filesystem::path& log_path, const std::filesystem::path& manifest_path,
                                     const std::filesystem::path& report_dir) {
  const auto log = eval::read_log(log_path);
  if (log.empty()) throw Error(ErrorKind::scoring, "response log is empty: " + log_path.string());
  const auto records = eval::join_records(log, read_manifest(manifest_path));
  auto report = eval::score(records);
  eval::render_report(report, report_dir);
  return report;
}

/// Accuracy per model and category plus forward/backward shares, as Markdown.
inline std::string summary_table(const eval::MetricsReport& report) {
  std::string out = "| model |";
  std::string rule = "|---|";
  for (auto c : scenarios::kAllCategories) {
    out += fmt::format(" {} |", scenarios::to_string(c));
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (const auto& m : report.cells) {
    if (m.category != scenarios::kAllCategories.front()) continue;
    const std::string name = m.probe.empty() ? m.model : m.model + " (" + m.probe + ")";
    out += "| " + name + " |";
    for (auto c : scenarios::kAllCategories) {
      const auto& cell = report.cell(m.model, c, m.probe);
      out += cell.total ? fmt::format(" {:.2f} |", cell.accuracy().value()) : " - |";
    }
    out += "\n";
  }
  out += "\n| model | forward | backward |\n|---|---|---|\n";
  for (const auto& m : report.cells) {
    if (m.category != scenarios::Category::forward_backward || m.total == 0) continue;
    const std::string name = m.probe.empty() ? m.model : m.model + " (" + m.probe + ")";
    out += fmt::format("| {} | {:.1f}% | {:.1f}% |\n", name, 100.0 * m.share("forward").value(),
                       100.0 * m.share("backward").value());
  }
  return out;
}

/// Regenerates one scenario with a probe element and adds it to the manifest.
inline scenarios::Manifest cmd_probe(const RunConfig& cfg, const std::string& scenario_id,
                                     scenarios::ProbeVariant probe) {
  validate_config(cfg);
  const auto catalog = load_catalog(cfg);
  auto manifest = read_manifest(cfg.manifest_path());
  std::vector<int> counts;
  const scenarios::ManifestRecord* base = nullptr;
  for (const auto& r : manifest.records) {
    if (r.scenario_id == scenario_id && r.probe.empty()) {
      base = &r;
      counts.push_back(r.frame_count);
    }
  }
  if (!base) throw Error(ErrorKind::not_found, "scenario " + scenario_id + " not in manifest");
  const auto spec = scenarios::spec_of(*base, counts);
  const std::string probe_name = nlohmann::json(probe).get<std::string>();
  auto g = scenarios::generate(spec, cfg.constants, catalog);
  const auto run = scenarios::apply_probe(spec, g.run, probe, catalog);

  scenarios::ManifestEntry entry;
  entry.spec = spec;
  entry.spec.id = scenario_id + "__" + probe_name;
  entry.truth = g.truth;
  entry.probe = probe_name;
  entry.artifacts = render_artifacts(run, entry.spec.id, counts, cfg.camera, cfg.dataset_dir());
  const auto added = scenarios::export_manifest({entry}, cfg.dataset_dir());
  std::erase_if(manifest.records, [&](const auto& r) { return r.scenario_id == entry.spec.id; });
  manifest.records.insert(manifest.records.end(), added.records.begin(), added.records.end());
  write_manifest(cfg.manifest_path(), manifest);
  write_run_meta(cfg, "probe");
  return added;
}

}  // namespace wmdrive::cli
