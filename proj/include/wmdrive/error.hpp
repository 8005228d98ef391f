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

#include <stdexcept>
#include <string>

namespace wmdrive {

enum class ErrorKind {
  invalid_argument,
  not_found,
  out_of_range,
  io,
  config,
  generation,
  transport,          // transient; callers may retry
  auth,               // never retried
  payload_too_large,  // never retried
  scoring,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::out_of_range: return "out_of_range";
    case ErrorKind::io: return "io";
    case ErrorKind::config: return "config";
    case ErrorKind::generation: return "generation";
    case ErrorKind::transport: return "transport";
    case ErrorKind::auth: return "auth";
    case ErrorKind::payload_too_large: return "payload_too_large";
    case ErrorKind::scoring: return "scoring";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wmdrive
