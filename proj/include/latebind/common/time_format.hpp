// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "latebind/common/clock.hpp"

namespace latebind {

/// "2026-10-16T08:30:00.250Z"
std::string format_iso8601(TimePoint t);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)".
std::optional<TimePoint> parse_iso8601(std::string_view text);

/// Duration literals: "250ms", "30s", "15m", "3h", "3d", or a bare number of
/// milliseconds. Compound forms ("1h30m") are accepted.
std::optional<Duration> parse_duration(std::string_view text);

std::string format_duration(Duration d);

}  // namespace latebind
