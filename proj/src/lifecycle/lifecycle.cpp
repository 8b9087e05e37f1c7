// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/lifecycle/lifecycle.hpp"

#include "latebind/common/error.hpp"

namespace latebind::lifecycle {

Lifecycle::Lifecycle(store::ContentStore& store, authz::TokenRegistry& tokens,
                     const render::Renderer& renderer)
    : store_(store), tokens_(tokens), renderer_(renderer) {}

bool Lifecycle::is_owner(const std::string& id, std::optional<std::string_view> token) const {
  if (!token) return false;
  return tokens_.validate(*token, id) != authz::Validation::invalid;
}

render::ImageAsset Lifecycle::notification(render::NotificationKind kind,
                                           const render::RenderSpec& spec,
                                           render::ImageFormat format) const {
  const std::string key = std::to_string(static_cast<int>(kind)) + "/" +
                          std::string(render::file_extension(format)) + "/" +
                          store::spec_to_json(spec).dump();
  {
    std::lock_guard lock(cache_mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  render::ImageAsset asset = renderer_.render_notification(kind, spec, format);
  std::lock_guard lock(cache_mu_);
  return cache_.emplace(key, std::move(asset)).first->second;
}

ViewOutcome Lifecycle::record_view(const std::string& id, std::optional<std::string_view> token,
                                   TimePoint now) {
  auto lock = store_.lock(id);
  ViewOutcome out;
  if (is_owner(id, token)) {
    out.state = store_.get(id).view_state;
    return out;
  }
  bool revoke = false;
  store_.update(id, [&](store::BoundContent& c) {
    auto& vs = c.view_state;
    ++vs.view_count;
    if (!vs.first_viewed_at) vs.first_viewed_at = now;
    vs.last_viewed_at = std::max(now, *vs.first_viewed_at);
    revoke = c.kind == store::ContentKind::continuous_edit && c.token &&
             c.token->status == authz::TokenStatus::active;
    out.state = vs;
  });
  out.counted = true;
  if (revoke) {
    tokens_.revoke(id);
    out.revocation = true;
  }
  return out;
}

FetchOutcome Lifecycle::fetch(const std::string& id, std::size_t segment,
                              std::optional<std::string_view> token, TimePoint now) {
  auto lock = store_.lock(id);
  const store::BoundContent c = store_.get(id);
  FetchOutcome out;
  if (c.live()) {
    LifecyclePolicy policy = c.policy;
    if (segment != 0) policy.max_views.reset();
    const PolicyVerdict verdict = evaluate(policy, c.view_state, now);
    if (verdict.expired()) {
      retire(id, store::ContentStatus::expired, verdict.reason, now);
    } else if (segment == 0) {
      const ViewOutcome v = record_view(id, token, now);
      out.counted = v.counted;
      out.revocation = v.revocation;
    }
  }
  out.asset = store_.get_latest_asset(id, segment);
  out.notification = !store_.get(id).live();
  return out;
}

bool Lifecycle::retire(const std::string& id, store::ContentStatus status,
                       std::optional<ExpiryReason> reason, TimePoint now) {
  auto lock = store_.lock(id);
  const store::BoundContent c = store_.get(id);
  if (!c.live()) return false;
  const render::ImageFormat format =
      c.revisions.empty() || c.latest().assets.empty() ? render::ImageFormat::static_raster
                                                       : c.latest().assets.front().format;
  const auto kind = status == store::ContentStatus::deleted ? render::NotificationKind::deleted
                                                            : render::NotificationKind::expired;
  return store_.retire(id, status, reason, notification(kind, c.spec, format), now);
}

bool Lifecycle::expire_content(const std::string& id, ExpiryReason reason, TimePoint now) {
  return retire(id, store::ContentStatus::expired, reason, now);
}

bool Lifecycle::delete_content(const std::string& id, TimePoint now) {
  return retire(id, store::ContentStatus::deleted, std::nullopt, now);
}

PolicyVerdict Lifecycle::enforce(const std::string& id, TimePoint now) {
  auto lock = store_.lock(id);
  const store::BoundContent c = store_.get(id);
  if (!c.live()) {
    if (c.status == store::ContentStatus::expired) {
      return PolicyVerdict::expired_by(c.expiry_reason.value_or(ExpiryReason::absolute_expiry));
    }
    return PolicyVerdict::active();
  }
  const PolicyVerdict verdict = evaluate(c.policy, c.view_state, now);
  if (verdict.expired()) expire_content(id, *verdict.reason, now);
  return verdict;
}

std::size_t Lifecycle::sweep(TimePoint now) {
  std::size_t expired = 0;
  for (const auto& id : store_.list()) {
    try {
      const store::BoundContent c = store_.get(id);
      if (!c.live() || c.policy.empty()) continue;
      auto lock = store_.lock(id);
      if (store_.get(id).live() && enforce(id, now).expired()) ++expired;
    } catch (const Error&) {
      // content vanished or failed to persist; the next sweep retries
    }
  }
  return expired;
}

}  // namespace latebind::lifecycle
