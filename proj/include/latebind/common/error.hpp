// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace latebind {

enum class ErrorCode {
  invalid_argument,  // malformed input or invalid render spec
  not_found,
  conflict,
  content_expired,
  unauthorized,
  forbidden,
  network,
  extract,
  io,
  internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Domain failure carrying a stable code that the HTTP layer and the CLI map
/// onto status codes and exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace latebind
