// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lazycell {

enum class ErrorCode {
  CycleDetected,
  UnknownNode,
  NotARoot,
  IndexOutOfBounds,
  ShapeMismatch,
  KernelFailure,
  OutOfRange,
  InvalidArgument,
  EmptyInput,
  ParseError,
  ValidationError,
  MetricMismatch,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for the library. `code()` identifies the failure class;
/// `field()` is set for configuration errors and names the offending key.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "cycle-detected";
    case ErrorCode::UnknownNode: return "unknown-node";
    case ErrorCode::NotARoot: return "not-a-root";
    case ErrorCode::IndexOutOfBounds: return "index-out-of-bounds";
    case ErrorCode::ShapeMismatch: return "shape-mismatch";
    case ErrorCode::KernelFailure: return "kernel-failure";
    case ErrorCode::OutOfRange: return "out-of-range";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::EmptyInput: return "empty-input";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::ValidationError: return "validation-error";
    case ErrorCode::MetricMismatch: return "metric-mismatch";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

}  // namespace lazycell
