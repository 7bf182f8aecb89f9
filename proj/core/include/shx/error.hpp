/*
 * Copyright 2026 The shx Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shx {

enum class ErrorCode {
  NotFound,
  InvalidParam,
  EmptySharedItems,
  DomainMismatch,
  CapExceeded,
  Divergence,
  Ingest,
  EmptyDomain,
  EmptyEvalSet,
  InvalidRanking,
  Coverage,
  VersionMismatch,
  Io,
};

constexpr std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::EmptySharedItems: return "EmptySharedItems";
    case ErrorCode::DomainMismatch: return "DomainMismatch";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::Divergence: return "DivergenceError";
    case ErrorCode::Ingest: return "IngestError";
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::EmptyEvalSet: return "EmptyEvalSet";
    case ErrorCode::InvalidRanking: return "InvalidRanking";
    case ErrorCode::Coverage: return "CoverageError";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

/// Base error type for everything the library throws on purpose.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(to_string(code)) + ": " + msg), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace shx
