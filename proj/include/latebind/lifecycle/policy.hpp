// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "latebind/common/clock.hpp"

namespace latebind::lifecycle {

/// Expiry conditions. Any satisfied condition expires the content; an empty
/// policy never expires.
struct LifecyclePolicy {
  std::optional<TimePoint> absolute_expiry;
  std::optional<Duration> after_first_view;
  std::optional<std::uint64_t> max_views;

  bool empty() const noexcept {
    return !absolute_expiry && !after_first_view && !max_views;
  }
  /// Throws Error(invalid_argument) for max_views == 0 or a non-positive duration.
  void validate() const;

  friend bool operator==(const LifecyclePolicy&, const LifecyclePolicy&) = default;
};

struct ViewState {
  std::uint64_t view_count = 0;
  std::optional<TimePoint> first_viewed_at;
  std::optional<TimePoint> last_viewed_at;

  friend bool operator==(const ViewState&, const ViewState&) = default;
};

enum class ExpiryReason { absolute_expiry, after_first_view, view_limit };

std::string_view to_string(ExpiryReason reason) noexcept;
std::optional<ExpiryReason> parse_expiry_reason(std::string_view text) noexcept;

struct PolicyVerdict {
  enum class Status { active, expired };
  Status status = Status::active;
  std::optional<ExpiryReason> reason;

  bool expired() const noexcept { return status == Status::expired; }
  static PolicyVerdict active() { return {}; }
  static PolicyVerdict expired_by(ExpiryReason r) { return {Status::expired, r}; }

  friend bool operator==(const PolicyVerdict&, const PolicyVerdict&) = default;
};

/// Conditions are checked in declaration order; the first satisfied one is
/// reported. Deadlines are inclusive.
PolicyVerdict evaluate(const LifecyclePolicy& policy, const ViewState& state, TimePoint now) noexcept;

/// Fraction of the content's lifetime that has elapsed, in [0, 1]. The
/// relative deadline runs from the first view and the absolute one from
/// creation; the larger fraction wins. 0 when neither deadline is set.
double elapsed_fraction(const LifecyclePolicy& policy, const ViewState& state, TimePoint created_at,
                        TimePoint now) noexcept;

}  // namespace latebind::lifecycle
