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
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "wmdrive/error.hpp"
#include "wmdrive/eval/parse.hpp"
#include "wmdrive/scenarios/manifest.hpp"

namespace wmdrive::eval {

// ---------------------------------------------------------------------------
// Response log

struct LogRecord {
  std::string scenario_id;
  int frame_count = 0;
  std::string model;
  std::string category;
  std::string prompt_hash;
  std::string raw_response;
  std::string parsed_label;
  double latency = 0.0;
  std::string timestamp;
  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LogRecord, scenario_id, frame_count, model, category, prompt_hash,
                                                raw_response, parsed_label, latency, timestamp)

inline std::string resume_key(const std::string& scenario_id, int frame_count, const std::string& model) {
  return scenario_id + "#" + std::to_string(frame_count) + "#" + model;
}

inline std::string resume_key(const LogRecord& r) { return resume_key(r.scenario_id, r.frame_count, r.model); }

/// Appends one line and flushes.
inline void append_log(const std::filesystem::path& path, const LogRecord& r) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot append to " + path.string());
  out << nlohmann::json(r).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed on " + path.string());
}

/// All records; a torn final line (interrupted write) is dropped.
inline std::vector<LogRecord> read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open response log " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  std::vector<LogRecord> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(lines[i]).get<LogRecord>());
    } catch (const nlohmann::json::exception& e) {
      if (i + 1 == lines.size()) break;
      throw Error(ErrorKind::config, fmt::format("{}:{}: {}", path.string(), i + 1, e.what()));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Records and metrics

struct EvalRecord {
  std::string scenario_id;
  int frame_count = 0;
  std::string model;
  Category category = Category::forward_backward;
  std::string level;
  std::string probe;
  std::string truth;
  ParsedAnswer parsed;
  std::string raw_response;
  double latency = 0.0;
  std::string timestamp;
};

/// Joins log lines with their manifest records; labels are re-parsed from the raw text.
inline std::vector<EvalRecord> join_records(const std::vector<LogRecord>& log, const scenarios::Manifest& manifest) {
  std::map<std::string, const scenarios::ManifestRecord*> index;
  for (const auto& r : manifest.records) index[scenarios::Manifest::key(r.scenario_id, r.frame_count)] = &r;
  std::vector<EvalRecord> out;
  out.reserve(log.size());
  for (const auto& l : log) {
    const auto it = index.find(scenarios::Manifest::key(l.scenario_id, l.frame_count));
    if (it == index.end()) {
      throw Error(ErrorKind::scoring,
                  fmt::format("log record {} frames={} not in manifest", l.scenario_id, l.frame_count));
    }
    const auto& m = *it->second;
    EvalRecord e;
    e.scenario_id = l.scenario_id;
    e.frame_count = l.frame_count;
    e.model = l.model;
    e.category = scenarios::category_from_string(m.category);
    e.level = scenarios::level_key(scenarios::params_from_json(e.category, m.params));
    e.probe = m.probe;
    e.truth = m.label;
    e.parsed = parse_answer(l.raw_response, e.category);
    e.raw_response = l.raw_response;
    e.latency = l.latency;
    e.timestamp = l.timestamp;
    out.push_back(std::move(e));
  }
  return out;
}

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 0;
  bool defined() const { return den != 0; }
  double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
  /// Six decimals, empty when undefined.
  std::string decimal() const { return den == 0 ? std::string() : fmt::format("{:.6f}", value()); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Scores for one (model, category, probe) cell.
struct CategoryMetrics {
  std::string model;
  Category category = Category::forward_backward;
  std::string probe;
  std::vector<std::string> truth_labels;     // answer set
  std::vector<std::string> response_labels;  // answer set + unparseable
  std::vector<std::vector<std::int64_t>> confusion;  // [truth][response]
  std::int64_t total = 0;

  std::int64_t correct() const {
    std::int64_t c = 0;
    for (std::size_t i = 0; i < truth_labels.size(); ++i) c += confusion[i][i];
    return c;
  }
  Rational accuracy() const { return {correct(), total}; }
  std::int64_t row_total(std::size_t truth) const {
    return std::accumulate(confusion[truth].begin(), confusion[truth].end(), std::int64_t{0});
  }
  std::int64_t column_total(std::size_t response) const {
    std::int64_t c = 0;
    for (const auto& row : confusion) c += row[response];
    return c;
  }
  /// Share of all responses that were `label`.
  Rational share(const std::string& label) const {
    const auto it = std::find(response_labels.begin(), response_labels.end(), label);
    if (it == response_labels.end()) throw Error(ErrorKind::not_found, "no response label " + label);
    return {column_total(static_cast<std::size_t>(it - response_labels.begin())), total};
  }
  /// Fraction of `label` scenes answered correctly.
  Rational recall(const std::string& label) const {
    const auto it = std::find(truth_labels.begin(), truth_labels.end(), label);
    if (it == truth_labels.end()) throw Error(ErrorKind::not_found, "no truth label " + label);
    const auto i = static_cast<std::size_t>(it - truth_labels.begin());
    return {confusion[i][i], row_total(i)};
  }
};

struct BreakdownCell {
  std::string model;
  Category category = Category::forward_backward;
  std::string probe;
  std::string level;
  int frame_count = 0;
  std::int64_t correct = 0;
  std::int64_t total = 0;
  Rational accuracy() const { return {correct, total}; }
};

struct MetricsReport {
  std::vector<CategoryMetrics> cells;  // sorted by model, probe, category
  std::vector<BreakdownCell> breakdown;
  std::int64_t record_count = 0;
  std::int64_t unparseable_count = 0;

  const CategoryMetrics& cell(const std::string& model, Category c, const std::string& probe = "") const {
    for (const auto& m : cells) {
      if (m.model == model && m.category == c && m.probe == probe) return m;
    }
    throw Error(ErrorKind::not_found, fmt::format("no metrics for {} / {}", model, scenarios::to_string(c)));
  }
  std::vector<std::string> models() const {
    std::vector<std::string> out;
    for (const auto& m : cells) {
      if (std::find(out.begin(), out.end(), m.model) == out.end()) out.push_back(m.model);
    }
    return out;
  }
};

inline CategoryMetrics empty_cell(const std::string& model, Category c, const std::string& probe) {
  CategoryMetrics m;
  m.model = model;
  m.category = c;
  m.probe = probe;
  m.truth_labels = scenarios::answer_set(c);
  m.response_labels = m.truth_labels;
  m.response_labels.push_back(kUnparseable);
  m.confusion.assign(m.truth_labels.size(), std::vector<std::int64_t>(m.response_labels.size(), 0));
  return m;
}

/// Pure fold over the records. Every (model, probe) group gets all categories,
/// zero-count ones included.
inline MetricsReport score(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::scoring, "no records to score");
  using CellKey = std::tuple<std::string, std::string, int>;  // model, probe, category
  std::map<CellKey, CategoryMetrics> cells;
  std::set<std::pair<std::string, std::string>> groups;
  using BreakKey = std::tuple<std::string, std::string, int, std::string, int>;
  std::map<BreakKey, BreakdownCell> breakdown;
  MetricsReport report;

  for (const auto& r : records) {
    groups.insert({r.model, r.probe});
    const CellKey key{r.model, r.probe, static_cast<int>(r.category)};
    auto it = cells.find(key);
    if (it == cells.end()) it = cells.emplace(key, empty_cell(r.model, r.category, r.probe)).first;
    auto& cell = it->second;
    const auto ti = std::find(cell.truth_labels.begin(), cell.truth_labels.end(), r.truth);
    if (ti == cell.truth_labels.end()) {
      throw Error(ErrorKind::scoring, fmt::format("truth label '{}' outside the answer set of {}", r.truth,
                                                  scenarios::to_string(r.category)));
    }
    auto ri = std::find(cell.response_labels.begin(), cell.response_labels.end(), r.parsed.label);
    if (ri == cell.response_labels.end()) ri = cell.response_labels.end() - 1;  // unparseable
    ++cell.confusion[static_cast<std::size_t>(ti - cell.truth_labels.begin())]
                    [static_cast<std::size_t>(ri - cell.response_labels.begin())];
    ++cell.total;
    ++report.record_count;
    if (!r.parsed.parsed()) ++report.unparseable_count;

    const BreakKey bk{r.model, r.probe, static_cast<int>(r.category), r.level, r.frame_count};
    auto& b = breakdown[bk];
    b.model = r.model;
    b.category = r.category;
    b.probe = r.probe;
    b.level = r.level;
    b.frame_count = r.frame_count;
    ++b.total;
    if (r.parsed.label == r.truth) ++b.correct;
  }
  for (const auto& [model, probe] : groups) {
    for (Category c : scenarios::kAllCategories) {
      const CellKey key{model, probe, static_cast<int>(c)};
      if (!cells.count(key)) cells.emplace(key, empty_cell(model, c, probe));
    }
  }
  for (auto& [k, v] : cells) report.cells.push_back(std::move(v));
  for (auto& [k, v] : breakdown) report.breakdown.push_back(std::move(v));
  return report;
}

}  // namespace wmdrive::eval
