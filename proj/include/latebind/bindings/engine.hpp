// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latebind/bindings/fetcher.hpp"
#include "latebind/bindings/scheduler.hpp"
#include "latebind/bindings/snapshot.hpp"
#include "latebind/render/renderer.hpp"
#include "latebind/store/content_store.hpp"

namespace latebind::bindings {

struct EngineOptions {
  /// How often blur animations are regenerated.
  Duration kt_interval{3 * 3'600'000};
  /// Smallest refresh_interval a binding may ask for.
  Duration min_refresh_interval{60'000};
};

enum class RefreshStatus { updated, unchanged, failed, skipped };

std::string_view to_string(RefreshStatus s) noexcept;

struct RefreshOutcome {
  RefreshStatus status = RefreshStatus::skipped;
  std::string reason;  // failure or skip reason
  std::uint64_t revision = 0;
};

/// Images for `text` as the content's kind renders it: a blur animation at
/// the current elapsed fraction for self-destruct content with KT, a
/// strikethrough history for continuous-edit content with KT (`history` is
/// the earlier sources, oldest first), static PNGs otherwise.
std::vector<render::ImageAsset> render_for(const render::Renderer& renderer,
                                           const store::BoundContent& content, std::string_view text,
                                           std::span<const std::string> history, TimePoint now);

/// Revision payload produced from a binding.
struct Produced {
  std::optional<std::string> source;
  std::vector<render::ImageAsset> assets;
};

/// Refreshes dashboards and web references from their bindings, and blur
/// animations of self-destruct content as implicit jobs every kt_interval.
class BindingEngine {
 public:
  BindingEngine(store::ContentStore& store, const render::Renderer& renderer, HttpFetcher& fetcher,
                SnapshotRegistry& snapshots, Scheduler& scheduler, EngineOptions options = {});

  const EngineOptions& options() const noexcept { return options_; }

  /// Errors: invalid_argument (interval below the floor, bad path/template,
  /// unknown provider).
  void validate(const store::DataBinding& binding) const;

  /// Fetches and renders without committing. Throws Error(network|extract).
  Produced produce(const store::DataBinding& binding, const render::RenderSpec& spec) const;

  /// Stores the binding on the content (replacing any previous one) and
  /// schedules it; the first run is immediate unless `immediate` is false.
  /// Errors: not_found, conflict (kind has no binding), invalid_argument.
  std::string register_binding(const std::string& content_id, store::DataBinding binding,
                               bool immediate = true);

  RefreshOutcome refresh_once(const std::string& content_id, TimePoint now);
  RefreshOutcome regenerate_kt(const std::string& content_id, TimePoint now);

  void schedule_kt(const std::string& content_id);
  void unschedule(const std::string& content_id);
  /// Schedules jobs for everything in the store (service start-up).
  void restore();

  static std::string binding_job(const std::string& content_id) { return "binding:" + content_id; }
  static std::string kt_job(const std::string& content_id) { return "kt:" + content_id; }

 private:
  void schedule_binding(const std::string& content_id, Duration interval, bool immediate);

  store::ContentStore& store_;
  const render::Renderer& renderer_;
  HttpFetcher& fetcher_;
  SnapshotRegistry& snapshots_;
  Scheduler& scheduler_;
  EngineOptions options_;
};

}  // namespace latebind::bindings
