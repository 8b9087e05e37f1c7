// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "latebind/authz/token.hpp"
#include "latebind/common/clock.hpp"
#include "latebind/lifecycle/policy.hpp"
#include "latebind/render/renderer.hpp"
#include "latebind/store/content_store.hpp"

namespace latebind::lifecycle {

struct ViewOutcome {
  ViewState state;
  bool counted = false;
  /// True on the one view that revoked a continuous-edit token.
  bool revocation = false;
};

struct FetchOutcome {
  render::ImageAsset asset;
  bool counted = false;
  bool revocation = false;
  bool notification = false;
};

/// View accounting and expiry on top of the store. Every operation runs
/// under the content lock.
class Lifecycle {
 public:
  Lifecycle(store::ContentStore& store, authz::TokenRegistry& tokens,
            const render::Renderer& renderer);

  /// A presented token that matches the content's token (active or revoked)
  /// marks the sender and is not counted. Errors: not_found.
  ViewOutcome record_view(const std::string& id, std::optional<std::string_view> token,
                          TimePoint now);

  /// Image fetch: the policy is evaluated on the state before this fetch,
  /// expired content is retired and answered with the notification, and
  /// otherwise the view is recorded. Only segment 0 counts as a view, and
  /// the view limit is enforced on segment 0 only, so a multi-image open
  /// counts once and is shown whole.
  FetchOutcome fetch(const std::string& id, std::size_t segment,
                     std::optional<std::string_view> token, TimePoint now);

  /// Idempotent; returns true if this call retired the content.
  bool expire_content(const std::string& id, ExpiryReason reason, TimePoint now);
  bool delete_content(const std::string& id, TimePoint now);

  /// Evaluates the policy and expires the content if due.
  PolicyVerdict enforce(const std::string& id, TimePoint now);
  /// enforce() over every live content; returns how many expired.
  std::size_t sweep(TimePoint now);

  bool is_owner(const std::string& id, std::optional<std::string_view> token) const;

  /// Cached, deterministic notification image.
  render::ImageAsset notification(render::NotificationKind kind, const render::RenderSpec& spec,
                                  render::ImageFormat format) const;

 private:
  bool retire(const std::string& id, store::ContentStatus status,
              std::optional<ExpiryReason> reason, TimePoint now);

  store::ContentStore& store_;
  authz::TokenRegistry& tokens_;
  const render::Renderer& renderer_;
  mutable std::mutex cache_mu_;
  mutable std::map<std::string, render::ImageAsset> cache_;
};

}  // namespace latebind::lifecycle
