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
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "wmdrive/error.hpp"
#include "wmdrive/scenarios/spec.hpp"

namespace wmdrive::eval {

using scenarios::Category;

struct QueryRequest {
  std::string scenario_id;
  int frame_count = 0;
  Category category = Category::forward_backward;
  std::string prompt;
  std::string png;                   // encoded grid image bytes
  std::optional<std::string> label;  // ground truth; only the oracle reads it
};

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  virtual std::string model_tag() const = 0;
  virtual std::string complete(const QueryRequest& req) = 0;
};

/// Answers from ground truth.
class OracleClient : public ModelClient {
 public:
  std::string model_tag() const override { return "oracle"; }
  std::string complete(const QueryRequest& req) override {
    if (!req.label) throw Error(ErrorKind::invalid_argument, "oracle client needs a ground-truth label");
    return fmt::format("The frames are consistent with the simulated ground truth.\nANSWER: {}", *req.label);
  }
};

/// Fixed answer per category, ignoring the image.
inline std::string adversarial_label(Category c) {
  switch (c) {
    case Category::forward_backward: return "forward";
    case Category::accel_decel: return "decelerate";
    case Category::left_right: return "left";
    case Category::traffic: return "no_traffic";
    case Category::speeding: return "no_speeding";
    case Category::open_set_object: return "yes";
    case Category::plane: return "cannot_keep_moving";
    case Category::planning: return "green";
  }
  return {};
}

class AdversarialClient : public ModelClient {
 public:
  std::string model_tag() const override { return "adversarial"; }
  std::string complete(const QueryRequest& req) override {
    return "It looks like a normal drive.\nANSWER: " + adversarial_label(req.category);
  }
};

inline std::string response_key(const std::string& scenario_id, int frame_count) {
  return scenario_id + "#" + std::to_string(frame_count);
}

/// Canned replies keyed by (scenario id, frame count), read from JSONL lines
/// {"scenario_id", "frame_count", "response" or "raw_response", optional "model"}.
/// Response logs therefore replay as scripts.
class ScriptedClient : public ModelClient {
 public:
  ScriptedClient(std::string tag, std::map<std::string, std::string> responses)
      : tag_(std::move(tag)), responses_(std::move(responses)) {}

  static ScriptedClient from_jsonl(const std::string& path, const std::string& tag) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, "cannot open scripted responses " + path);
    std::map<std::string, std::string> responses;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        if (j.contains("model") && j["model"].get<std::string>() != tag) continue;
        const auto& text = j.contains("response") ? j.at("response") : j.at("raw_response");
        responses[response_key(j.at("scenario_id").get<std::string>(), j.at("frame_count").get<int>())] =
            text.get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::config, fmt::format("{}:{}: {}", path, line_no, e.what()));
      }
    }
    return ScriptedClient(tag, std::move(responses));
  }

  std::string model_tag() const override { return tag_; }
  std::string complete(const QueryRequest& req) override {
    const auto it = responses_.find(response_key(req.scenario_id, req.frame_count));
    if (it == responses_.end()) {
      throw Error(ErrorKind::not_found, "no scripted response for " + response_key(req.scenario_id, req.frame_count));
    }
    return it->second;
  }
  std::size_t size() const { return responses_.size(); }

 private:
  std::string tag_;
  std::map<std::string, std::string> responses_;
};

/// Endpoint settings for the live HTTP client.
struct LiveConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-4o";
  std::string api_key_env = "WMDRIVE_API_KEY";
  std::string payload_style = "openai";  // or "anthropic"
  int max_tokens = 1024;
  double timeout = 120.0;  // s
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(LiveConfig, endpoint, model, api_key_env, payload_style, max_tokens,
                                                timeout)

// ---------------------------------------------------------------------------
// Retry and rate limiting

struct RetryPolicy {
  int max_retries = 3;
  double initial_backoff = 1.0;  // s
  double backoff_factor = 2.0;
  double min_interval = 1.0;     // s between request starts
  int max_in_flight = 2;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RetryPolicy, max_retries, initial_backoff, backoff_factor,
                                                min_interval, max_in_flight)

using Sleeper = std::function<void(double seconds)>;
using Clock = std::function<double()>;

inline void real_sleep(double seconds) {
  if (seconds > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

inline double steady_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

/// Bounds concurrent requests and spaces their start times.
class RateGate {
 public:
  RateGate(double min_interval, int max_in_flight, Sleeper sleep = real_sleep, Clock clock = steady_seconds)
      : min_interval_(std::max(min_interval, 0.0)),
        max_in_flight_(std::max(max_in_flight, 1)),
        sleep_(std::move(sleep)),
        clock_(std::move(clock)) {}

  void acquire() {
    double wait = 0.0;
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return in_flight_ < max_in_flight_; });
      ++in_flight_;
      const double now = clock_();
      const double start = started_ ? std::max(now, last_start_ + min_interval_) : now;
      wait = start - now;
      last_start_ = start;
      started_ = true;
    }
    sleep_(wait);
  }

  void release() {
    {
      std::lock_guard lock(mu_);
      --in_flight_;
    }
    cv_.notify_one();
  }

  int in_flight() const {
    std::lock_guard lock(mu_);
    return in_flight_;
  }

 private:
  double min_interval_;
  int max_in_flight_;
  Sleeper sleep_;
  Clock clock_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  bool started_ = false;
  double last_start_ = 0.0;
};

struct QueryResult {
  std::string text;
  double latency = 0.0;  // s, successful attempt only
  int attempts = 0;
};

/// Queries with retries on transport errors; auth and payload errors are final.
inline QueryResult query_model(ModelClient& client, const QueryRequest& req, const RetryPolicy& policy,
                               RateGate* gate = nullptr, const Sleeper& sleep = real_sleep,
                               const Clock& clock = steady_seconds) {
  double backoff = policy.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    if (gate) gate->acquire();
    const double t0 = clock();
    try {
      QueryResult r;
      r.text = client.complete(req);
      r.latency = clock() - t0;
      r.attempts = attempt + 1;
      if (gate) gate->release();
      return r;
    } catch (const Error& e) {
      if (gate) gate->release();
      if (e.kind() != ErrorKind::transport) throw;
      if (attempt >= policy.max_retries) {
        throw Error(ErrorKind::transport,
                    fmt::format("retries exhausted after {} attempts: {}", attempt + 1, e.what()));
      }
    } catch (...) {
      if (gate) gate->release();
      throw;
    }
    sleep(backoff);
    backoff *= policy.backoff_factor;
  }
}

}  // namespace wmdrive::eval
