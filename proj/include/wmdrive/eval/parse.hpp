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
#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wmdrive/scenarios/spec.hpp"

namespace wmdrive::eval {

using scenarios::Category;

inline constexpr const char* kUnparseable = "unparseable";

struct ParsedAnswer {
  std::string label = kUnparseable;
  std::string rationale_text;
  std::vector<std::string> per_frame_descriptions;
  bool parsed() const { return label != kUnparseable; }
};

struct Synonym {
  std::string phrase;  // lower case
  std::string label;
};

/// Phrases that count as each label, including the label spelled with spaces.
inline std::vector<Synonym> synonyms(scenarios::Category c) {
  using scenarios::Category;
  std::vector<Synonym> s;
  for (const auto& l : scenarios::answer_set(c)) {
    s.push_back({l, l});
    std::string spaced = l;
    std::replace(spaced.begin(), spaced.end(), '_', ' ');
    if (spaced != l) s.push_back({spaced, l});
  }
  auto add = [&](const char* label, std::initializer_list<const char*> phrases) {
    for (const char* p : phrases) s.push_back({p, label});
  };
  switch (c) {
    case Category::forward_backward:
      add("forward", {"forwards", "moving ahead", "driving ahead"});
      add("backward", {"backwards", "reversing", "in reverse", "moving back"});
      break;
    case Category::accel_decel:
      add("accelerate", {"accelerating", "accelerates", "accelerated", "acceleration", "speeding up", "speeds up"});
      add("decelerate", {"decelerating", "decelerates", "decelerated", "deceleration", "slowing down", "slows down",
                         "braking"});
      break;
    case Category::left_right:
      add("left", {"turning left", "turns left", "to the left"});
      add("right", {"turning right", "turns right", "to the right"});
      break;
    case Category::traffic:
      add("no_traffic", {"no traffic", "not traffic", "there is no traffic", "free-flowing", "free flowing"});
      add("traffic", {"heavy traffic", "traffic jam", "congestion"});
      break;
    case Category::speeding:
      add("no_speeding", {"not speeding", "no speeding", "isn't speeding", "is not speeding", "within the speed limit"});
      add("speeding", {"is speeding", "exceeding the speed limit", "over the speed limit"});
      break;
    case Category::open_set_object:
      add("yes", {"can keep moving", "can continue"});
      add("no", {"cannot keep moving", "can not keep moving", "can't keep moving", "cannot continue",
                 "should stop", "must stop", "slow down"});
      break;
    case Category::plane:
      add("can_keep_moving", {"can keep moving", "yes", "can continue"});
      add("cannot_keep_moving", {"cannot keep moving", "can not keep moving", "can't keep moving", "no",
                                 "should stop", "must stop", "cannot continue"});
      break;
    case Category::planning:
      add("red", {"red trajectory", "red line", "red path"});
      add("green", {"green trajectory", "green line", "green path"});
      add("blue", {"blue trajectory", "blue line", "blue path"});
      break;
  }
  return s;
}

namespace detail {

inline std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

inline bool word_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '\'';
}

struct Mention {
  std::size_t begin, end;
  std::string label;
};

/// Whole-word mentions, dropping any mention nested inside a longer one.
inline std::vector<Mention> mentions(const std::string& text, const std::vector<Synonym>& table) {
  std::vector<Mention> all;
  for (const auto& syn : table) {
    for (std::size_t pos = text.find(syn.phrase); pos != std::string::npos; pos = text.find(syn.phrase, pos + 1)) {
      const std::size_t end = pos + syn.phrase.size();
      const bool left_ok = pos == 0 || !word_char(text[pos - 1]);
      const bool right_ok = end == text.size() || !word_char(text[end]);
      if (left_ok && right_ok) all.push_back({pos, end, syn.label});
    }
  }
  std::vector<Mention> kept;
  for (const auto& m : all) {
    const bool nested = std::any_of(all.begin(), all.end(), [&](const Mention& o) {
      return o.begin <= m.begin && m.end <= o.end && (o.end - o.begin) > (m.end - m.begin);
    });
    if (!nested) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end(), [](const Mention& a, const Mention& b) {
    return a.begin != b.begin ? a.begin < b.begin : (a.end - a.begin) > (b.end - b.begin);
  });
  return kept;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

/// Lines of the form "Frame 3: ..." or "3. ...".
inline std::vector<std::string> frame_descriptions(const std::string& raw) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= raw.size()) {
    std::size_t nl = raw.find('\n', start);
    if (nl == std::string::npos) nl = raw.size();
    std::string line = trim(raw.substr(start, nl - start));
    std::string l = lower(line);
    while (!l.empty() && (l[0] == '*' || l[0] == '-' || l[0] == '#')) {
      l.erase(0, 1);
      line.erase(0, 1);
    }
    std::size_t i = 0;
    if (l.rfind("frame", 0) == 0) i = 5;
    while (i < l.size() && l[i] == ' ') ++i;
    const std::size_t digits = i;
    while (i < l.size() && std::isdigit(static_cast<unsigned char>(l[i]))) ++i;
    if (i > digits && i < l.size() && (l[i] == ':' || l[i] == '.' || l[i] == ')' || l[i] == '-')) {
      out.push_back(trim(line.substr(i + 1)));
    }
    start = nl + 1;
  }
  return out;
}

}  // namespace detail

/// Label from a free-form reply. Never throws.
inline ParsedAnswer parse_answer(const std::string& raw, scenarios::Category c) noexcept {
  ParsedAnswer out;
  try {
    const auto table = synonyms(c);
    const std::string text = detail::lower(raw);
    // Last "answer:" line wins; its first mention is the answer.
    std::size_t answer_pos = std::string::npos;
    for (std::size_t p = text.find("answer"); p != std::string::npos; p = text.find("answer", p + 1)) {
      std::size_t q = p + 6;
      while (q < text.size() && (text[q] == ' ' || text[q] == '*')) ++q;
      if (q < text.size() && text[q] == ':' && (p == 0 || !detail::word_char(text[p - 1]))) answer_pos = p;
    }
    out.rationale_text = detail::trim(answer_pos == std::string::npos ? raw : raw.substr(0, answer_pos));
    out.per_frame_descriptions = detail::frame_descriptions(raw);
    if (answer_pos != std::string::npos) {
      std::size_t eol = text.find('\n', answer_pos);
      if (eol == std::string::npos) eol = text.size();
      const std::string line = text.substr(answer_pos + 6, eol - answer_pos - 6);
      const auto m = detail::mentions(line, table);
      if (!m.empty()) {
        out.label = m.front().label;
        return out;
      }
    }
    const auto m = detail::mentions(text, table);
    if (!m.empty()) {
      // Last mention; on equal starts the longest (sorted first).
      std::size_t best = m.size() - 1;
      while (best > 0 && m[best - 1].begin == m[best].begin) --best;
      out.label = m[best].label;
    }
  } catch (...) {
    out.label = kUnparseable;
  }
  return out;
}

}  // namespace wmdrive::eval
