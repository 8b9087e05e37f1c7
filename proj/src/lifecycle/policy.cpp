// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/lifecycle/policy.hpp"

#include <algorithm>

#include "latebind/common/error.hpp"

namespace latebind::lifecycle {

void LifecyclePolicy::validate() const {
  if (max_views && *max_views == 0) {
    throw Error(ErrorCode::invalid_argument, "max_views must be positive");
  }
  if (after_first_view && after_first_view->count() <= 0) {
    throw Error(ErrorCode::invalid_argument, "after_first_view must be positive");
  }
}

std::string_view to_string(ExpiryReason reason) noexcept {
  switch (reason) {
    case ExpiryReason::absolute_expiry: return "absolute-expiry";
    case ExpiryReason::after_first_view: return "after-first-view";
    case ExpiryReason::view_limit: return "view-limit";
  }
  return "unknown";
}

std::optional<ExpiryReason> parse_expiry_reason(std::string_view text) noexcept {
  for (auto r : {ExpiryReason::absolute_expiry, ExpiryReason::after_first_view,
                 ExpiryReason::view_limit}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

PolicyVerdict evaluate(const LifecyclePolicy& policy, const ViewState& state, TimePoint now) noexcept {
  if (policy.absolute_expiry && now >= *policy.absolute_expiry) {
    return PolicyVerdict::expired_by(ExpiryReason::absolute_expiry);
  }
  if (policy.after_first_view && state.first_viewed_at &&
      now >= *state.first_viewed_at + *policy.after_first_view) {
    return PolicyVerdict::expired_by(ExpiryReason::after_first_view);
  }
  if (policy.max_views && state.view_count >= *policy.max_views) {
    return PolicyVerdict::expired_by(ExpiryReason::view_limit);
  }
  return PolicyVerdict::active();
}

namespace {

double ratio(TimePoint start, Duration span, TimePoint now) {
  if (span.count() <= 0) return now >= start ? 1.0 : 0.0;
  const double r = static_cast<double>((now - start).count()) / static_cast<double>(span.count());
  return std::clamp(r, 0.0, 1.0);
}

}  // namespace

double elapsed_fraction(const LifecyclePolicy& policy, const ViewState& state, TimePoint created_at,
                        TimePoint now) noexcept {
  double f = 0.0;
  if (policy.after_first_view && state.first_viewed_at) {
    f = std::max(f, ratio(*state.first_viewed_at, *policy.after_first_view, now));
  }
  if (policy.absolute_expiry) {
    f = std::max(f, ratio(created_at, *policy.absolute_expiry - created_at, now));
  }
  return f;
}

}  // namespace latebind::lifecycle
