// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "latebind/authz/token.hpp"
#include "latebind/common/clock.hpp"
#include "latebind/lifecycle/policy.hpp"
#include "latebind/render/layout.hpp"
#include "latebind/render/renderer.hpp"

namespace latebind::store {

enum class ContentKind { static_text, self_destruct, continuous_edit, dashboard, web_reference };
enum class ContentStatus { live, expired, deleted };

std::string_view to_string(ContentKind kind) noexcept;
std::optional<ContentKind> parse_content_kind(std::string_view text) noexcept;
std::string_view to_string(ContentStatus status) noexcept;
std::optional<ContentStatus> parse_content_status(std::string_view text) noexcept;

/// Kinds whose revisions come from a data binding rather than from edits.
bool is_bound_kind(ContentKind kind) noexcept;

struct AssetRef {
  std::size_t segment_index = 0;
  std::string digest;  // sha256 hex of the payload, also the file stem
  render::ImageFormat format = render::ImageFormat::static_raster;
  int width = 0;
  int height = 0;
  std::size_t byte_length = 0;
  int frame_count = 1;

  friend bool operator==(const AssetRef&, const AssetRef&) = default;
};

struct RevisionRecord {
  std::uint64_t revision = 0;
  std::optional<std::string> source;  // absent for snapshots and after purge
  TimePoint created_at{};
  std::vector<AssetRef> assets;
  bool notification = false;
};

struct CropRect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const CropRect&, const CropRect&) = default;
};

enum class BindingSource { http_json, snapshot };
enum class BindingRender { text, bar_chart };

struct DataBinding {
  std::string binding_id;
  std::string content_id;
  BindingSource source = BindingSource::http_json;
  std::string url;
  // http-json
  std::string path;
  std::string value_template = "{value}";
  BindingRender render = BindingRender::text;
  std::vector<std::string> labels;  // bar chart labels, one per value
  // snapshot
  std::string provider;
  std::optional<CropRect> crop;

  Duration refresh_interval{60'000};
  std::optional<TimePoint> last_refreshed_at;
  std::optional<std::string> last_error;
};

struct BoundContent {
  std::string content_id;
  ContentKind kind = ContentKind::static_text;
  render::RenderSpec spec;
  lifecycle::LifecyclePolicy policy;
  lifecycle::ViewState view_state;
  std::vector<RevisionRecord> revisions;  // oldest retained first
  bool kt_enabled = false;
  ContentStatus status = ContentStatus::live;
  std::optional<lifecycle::ExpiryReason> expiry_reason;
  TimePoint created_at{};
  /// Segment count of revision 1; image URLs in sent mail are fixed to it.
  std::size_t segment_slots = 0;
  std::optional<authz::TokenRecord> token;
  std::optional<DataBinding> binding;

  bool live() const noexcept { return status == ContentStatus::live; }
  const RevisionRecord& latest() const;
  std::uint64_t latest_revision() const noexcept {
    return revisions.empty() ? 0 : revisions.back().revision;
  }
};

nlohmann::json spec_to_json(const render::RenderSpec& spec);
/// Overlays the fields present in `j` onto `base`. Unknown keys are errors.
render::RenderSpec spec_from_json(const nlohmann::json& j, render::RenderSpec base = {});

nlohmann::json policy_to_json(const lifecycle::LifecyclePolicy& policy);
lifecycle::LifecyclePolicy policy_from_json(const nlohmann::json& j);

nlohmann::json binding_to_json(const DataBinding& binding);
/// Parses a binding definition; refresh_interval accepts "90s"-style strings
/// or refresh_interval_ms.
DataBinding binding_from_json(const nlohmann::json& j);

nlohmann::json content_to_json(const BoundContent& content);
BoundContent content_from_json(const nlohmann::json& j);

}  // namespace latebind::store
