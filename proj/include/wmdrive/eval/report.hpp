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

// CSV tables, a JSON summary and SVG charts for a MetricsReport. Output
// depends only on the report, so equal reports give identical bytes.

#pragma once

#include <array>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "wmdrive/eval/score.hpp"

namespace wmdrive::eval {

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::io, "write failed on " + path.string());
}

inline std::string slug(const std::string& s) {
  std::string out;
  for (char ch : s) out += std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '.' ? ch : '_';
  return out;
}

inline std::string stem(const std::string& model, const std::string& probe) {
  return probe.empty() ? slug(model) : slug(model) + "_probe-" + slug(probe);
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

inline constexpr std::array<const char*, 8> kSeriesColours{"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                                                          "#59a14f", "#edc948", "#b07aa1", "#9c755f"};

struct Bar {
  std::string group;
  std::string series;
  double value = 0.0;  // in [0, 1]
};

/// Grouped vertical bars on a 0..1 axis.
inline std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& groups,
                                 const std::vector<std::string>& series, const std::vector<Bar>& bars) {
  const double left = 50, top = 40, plot_h = 240, group_w = std::max(60.0, 22.0 * series.size() + 20.0);
  const double width = left + group_w * groups.size() + 170, height = top + plot_h + 90;
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{:.0f}\" y=\"20\" font-size=\"14\">{}</text>\n",
      width, height, left, xml_escape(title));
  for (int k = 0; k <= 4; ++k) {
    const double y = top + plot_h * (1.0 - k / 4.0);
    s += fmt::format("<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n", left, y,
                     left + group_w * groups.size(), y);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n", left - 4, y + 4,
                     k / 4.0);
  }
  const double bar_w = (group_w - 20.0) / std::max<std::size_t>(series.size(), 1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const double gx = left + group_w * g + 10.0;
    for (const auto& b : bars) {
      if (b.group != groups[g]) continue;
      const auto si = static_cast<std::size_t>(std::find(series.begin(), series.end(), b.series) - series.begin());
      const double h = plot_h * std::clamp(b.value, 0.0, 1.0);
      s += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\"><title>{} {}: "
          "{:.3f}</title></rect>\n",
          gx + bar_w * si, top + plot_h - h, bar_w - 2.0, h, kSeriesColours[si % kSeriesColours.size()],
          xml_escape(b.series), xml_escape(b.group), b.value);
    }
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" transform=\"rotate(-35 {:.1f} {:.1f})\">{}</text>\n",
                     gx + group_w / 2.0, top + plot_h + 14, gx + group_w / 2.0, top + plot_h + 14,
                     xml_escape(groups[g]));
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double x = left + group_w * groups.size() + 20, y = top + 16.0 * i;
    s += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", x, y,
                     kSeriesColours[i % kSeriesColours.size()]);
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", x + 14, y + 9, xml_escape(series[i]));
  }
  return s + "</svg>\n";
}

/// Heatmap of row-normalised counts with the raw count printed in each cell.
inline std::string confusion_svg(const CategoryMetrics& m) {
  const double cell = 70, left = 130, top = 60;
  const double width = left + cell * m.response_labels.size() + 20;
  const double height = top + cell * m.truth_labels.size() + 40;
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" font-family=\"sans-serif\" "
      "font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"10\" y=\"20\" font-size=\"14\">{} / {}{}</text>\n"
      "<text x=\"{:.0f}\" y=\"{:.0f}\" text-anchor=\"middle\">response</text>\n",
      width, height, xml_escape(m.model), scenarios::to_string(m.category),
      m.probe.empty() ? "" : " (" + xml_escape(m.probe) + ")", left + cell * m.response_labels.size() / 2.0,
      top - 22);
  for (std::size_t j = 0; j < m.response_labels.size(); ++j) {
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + cell * (j + 0.5),
                     top - 6, xml_escape(m.response_labels[j]));
  }
  for (std::size_t i = 0; i < m.truth_labels.size(); ++i) {
    const double row = static_cast<double>(m.row_total(i));
    s += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6,
                     top + cell * (i + 0.5) + 4, xml_escape(m.truth_labels[i]));
    for (std::size_t j = 0; j < m.response_labels.size(); ++j) {
      const double f = row > 0 ? static_cast<double>(m.confusion[i][j]) / row : 0.0;
      const int shade = static_cast<int>(std::lround(255.0 - 200.0 * f));
      s += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.0f}\" height=\"{:.0f}\" fill=\"rgb({},{},255)\" "
          "stroke=\"#888\"/>\n<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
          left + cell * j, top + cell * i, cell, cell, shade, shade, left + cell * (j + 0.5),
          top + cell * (i + 0.5) + 4, m.confusion[i][j]);
    }
  }
  return s + "</svg>\n";
}

}  // namespace detail

inline nlohmann::json rational_json(const Rational& r) {
  return {{"numerator", r.num}, {"denominator", r.den}, {"decimal", r.defined() ? nlohmann::json(r.value()) : nlohmann::json()}};
}

inline nlohmann::json metrics_to_json(const MetricsReport& report) {
  using nlohmann::json;
  json cells = json::array();
  for (const auto& m : report.cells) {
    json dist = json::object();
    for (const auto& l : m.response_labels) dist[l] = rational_json(m.share(l));
    cells.push_back({{"model", m.model},
                     {"category", scenarios::to_string(m.category)},
                     {"probe", m.probe},
                     {"total", m.total},
                     {"accuracy", rational_json(m.accuracy())},
                     {"truth_labels", m.truth_labels},
                     {"response_labels", m.response_labels},
                     {"confusion", m.confusion},
                     {"distribution", dist}});
  }
  json breakdown = json::array();
  for (const auto& b : report.breakdown) {
    breakdown.push_back({{"model", b.model},
                         {"category", scenarios::to_string(b.category)},
                         {"probe", b.probe},
                         {"level", b.level},
                         {"frame_count", b.frame_count},
                         {"accuracy", rational_json(b.accuracy())}});
  }
  return {{"format_version", 1},
          {"record_count", report.record_count},
          {"unparseable_count", report.unparseable_count},
          {"cells", cells},
          {"breakdown", breakdown}};
}

/// Writes accuracy.csv, confusion_<category>.csv, distribution.csv,
/// breakdown.csv, metrics.json and plots/*.svg under out_dir.
inline std::vector<std::filesystem::path> render_report(const MetricsReport& report,
                                                        const std::filesystem::path& out_dir) {
  using detail::csv_row;
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::filesystem::path& rel, const std::string& text) {
    detail::write_text(out_dir / rel, text);
    written.push_back(out_dir / rel);
  };

  std::string acc = csv_row({"model", "probe", "category", "numerator", "denominator", "accuracy"});
  std::string dist = csv_row({"model", "probe", "category", "response", "count", "total", "share"});
  std::map<Category, std::string> confusion;
  for (const auto& m : report.cells) {
    const std::string cat = scenarios::to_string(m.category);
    const auto a = m.accuracy();
    acc += csv_row({m.model, m.probe, cat, std::to_string(a.num), std::to_string(a.den), a.decimal()});
    for (const auto& l : m.response_labels) {
      const auto sh = m.share(l);
      dist += csv_row({m.model, m.probe, cat, l, std::to_string(sh.num), std::to_string(sh.den), sh.decimal()});
    }
    auto& c = confusion[m.category];
    if (c.empty()) {
      c = csv_row({"model", "probe", "truth", "response", "count", "row_total", "row_share"});
    }
    for (std::size_t i = 0; i < m.truth_labels.size(); ++i) {
      for (std::size_t j = 0; j < m.response_labels.size(); ++j) {
        const Rational r{m.confusion[i][j], m.row_total(i)};
        c += csv_row({m.model, m.probe, m.truth_labels[i], m.response_labels[j], std::to_string(r.num),
                      std::to_string(r.den), r.decimal()});
      }
    }
  }
  std::string brk = csv_row({"model", "probe", "category", "level", "frame_count", "numerator", "denominator",
                             "accuracy"});
  for (const auto& b : report.breakdown) {
    const auto a = b.accuracy();
    brk += csv_row({b.model, b.probe, scenarios::to_string(b.category), b.level, std::to_string(b.frame_count),
                    std::to_string(a.num), std::to_string(a.den), a.decimal()});
  }
  emit("accuracy.csv", acc);
  emit("distribution.csv", dist);
  emit("breakdown.csv", brk);
  for (const auto& [c, text] : confusion) emit(fmt::format("confusion_{}.csv", scenarios::to_string(c)), text);
  emit("metrics.json", metrics_to_json(report).dump(2) + "\n");

  // Plots skip empty cells.
  std::vector<std::string> series;
  std::vector<std::string> groups;
  std::vector<detail::Bar> bars;
  for (const auto& m : report.cells) {
    if (m.total == 0) continue;
    const std::string name = m.probe.empty() ? m.model : m.model + " (" + m.probe + ")";
    const std::string cat = scenarios::to_string(m.category);
    if (std::find(series.begin(), series.end(), name) == series.end()) series.push_back(name);
    bars.push_back({cat, name, m.accuracy().value()});
  }
  for (Category c : scenarios::kAllCategories) {
    const std::string cat = scenarios::to_string(c);
    if (std::any_of(bars.begin(), bars.end(), [&](const detail::Bar& b) { return b.group == cat; })) {
      groups.push_back(cat);
    }
  }
  if (!bars.empty()) emit("plots/accuracy.svg", detail::bar_chart_svg("Accuracy by category", groups, series, bars));
  for (const auto& m : report.cells) {
    if (m.total == 0) continue;
    emit(fmt::format("plots/confusion_{}_{}.svg", detail::stem(m.model, m.probe), scenarios::to_string(m.category)),
         detail::confusion_svg(m));
    std::vector<std::string> levels;
    std::vector<std::string> frames;
    std::vector<detail::Bar> bb;
    for (const auto& b : report.breakdown) {
      if (b.model != m.model || b.probe != m.probe || b.category != m.category || b.total == 0) continue;
      const std::string fc = fmt::format("{} frames", b.frame_count);
      if (std::find(levels.begin(), levels.end(), b.level) == levels.end()) levels.push_back(b.level);
      if (std::find(frames.begin(), frames.end(), fc) == frames.end()) frames.push_back(fc);
      bb.push_back({b.level, fc, b.accuracy().value()});
    }
    emit(fmt::format("plots/breakdown_{}_{}.svg", detail::stem(m.model, m.probe), scenarios::to_string(m.category)),
         detail::bar_chart_svg(fmt::format("{} / {}: accuracy by level and frame count", m.model,
                                           scenarios::to_string(m.category)),
                               levels, frames, bb));
  }
  return written;
}

}  // namespace wmdrive::eval
