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

// HTTP chat-with-image client. Only the CLI includes this header, so the
// core library does not depend on OpenSSL.

#pragma once

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <cstdlib>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "wmdrive/eval/client.hpp"

namespace wmdrive::eval {

/// Request body for one prompt plus one PNG.
inline nlohmann::json live_payload(const LiveConfig& cfg, const std::string& prompt, const std::string& png) {
  using nlohmann::json;
  const std::string b64 = httplib::detail::base64_encode(png);
  if (cfg.payload_style == "anthropic") {
    return {{"model", cfg.model},
            {"max_tokens", cfg.max_tokens},
            {"messages",
             json::array({{{"role", "user"},
                           {"content", json::array({{{"type", "image"},
                                                     {"source", {{"type", "base64"},
                                                                 {"media_type", "image/png"},
                                                                 {"data", b64}}}},
                                                    {{"type", "text"}, {"text", prompt}}})}}})}};
  }
  if (cfg.payload_style != "openai") {
    throw Error(ErrorKind::config, "unknown payload_style " + cfg.payload_style);
  }
  return {{"model", cfg.model},
          {"max_tokens", cfg.max_tokens},
          {"messages",
           json::array({{{"role", "user"},
                         {"content", json::array({{{"type", "text"}, {"text", prompt}},
                                                  {{"type", "image_url"},
                                                   {"image_url", {{"url", "data:image/png;base64," + b64}}}}})}}})}};
}

/// Reply text from a response body.
inline std::string live_reply_text(const LiveConfig& cfg, const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    if (cfg.payload_style == "anthropic") {
      std::string out;
      for (const auto& part : j.at("content")) {
        if (part.value("type", "") == "text") out += part.at("text").get<std::string>();
      }
      return out;
    }
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::transport, std::string("malformed model response: ") + e.what());
  }
}

/// Maps an HTTP status to the error contract; 2xx returns normally.
inline void check_status(int status, const std::string& body) {
  if (status >= 200 && status < 300) return;
  const std::string msg = fmt::format("HTTP {}: {}", status, body.substr(0, 200));
  if (status == 401 || status == 403) throw Error(ErrorKind::auth, msg);
  if (status == 413) throw Error(ErrorKind::payload_too_large, msg);
  if (status == 408 || status == 429 || status >= 500) throw Error(ErrorKind::transport, msg);
  throw Error(ErrorKind::invalid_argument, msg);
}

class LiveClient : public ModelClient {
 public:
  explicit LiveClient(LiveConfig cfg) : cfg_(std::move(cfg)) {
    const auto scheme_end = cfg_.endpoint.find("://");
    const auto path_start =
        cfg_.endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (scheme_end == std::string::npos || path_start == std::string::npos) {
      throw Error(ErrorKind::config, "endpoint must be a full URL: " + cfg_.endpoint);
    }
    base_ = cfg_.endpoint.substr(0, path_start);
    path_ = cfg_.endpoint.substr(path_start);
  }

  std::string model_tag() const override { return cfg_.model; }

  std::string complete(const QueryRequest& req) override {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorKind::auth, "credential variable " + cfg_.api_key_env + " is not set");
    }
    httplib::Client http(base_);
    const auto secs = static_cast<time_t>(cfg_.timeout);
    http.set_connection_timeout(secs, 0);
    http.set_read_timeout(secs, 0);
    http.set_write_timeout(secs, 0);
    httplib::Headers headers;
    if (cfg_.payload_style == "anthropic") {
      headers.emplace("x-api-key", key);
      headers.emplace("anthropic-version", "2023-06-01");
    } else {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    const auto res = http.Post(path_, headers, live_payload(cfg_, req.prompt, req.png).dump(), "application/json");
    if (!res) {
      throw Error(ErrorKind::transport, "connection failed: " + httplib::to_string(res.error()));
    }
    check_status(res->status, res->body);
    return live_reply_text(cfg_, res->body);
  }

 private:
  LiveConfig cfg_;
  std::string base_;
  std::string path_;
};

}  // namespace wmdrive::eval
