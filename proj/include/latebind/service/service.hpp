// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "latebind/authz/token.hpp"
#include "latebind/bindings/engine.hpp"
#include "latebind/bindings/fetcher.hpp"
#include "latebind/bindings/scheduler.hpp"
#include "latebind/bindings/snapshot.hpp"
#include "latebind/common/clock.hpp"
#include "latebind/lifecycle/lifecycle.hpp"
#include "latebind/render/renderer.hpp"
#include "latebind/service/api_json.hpp"
#include "latebind/service/snippet.hpp"
#include "latebind/store/content_store.hpp"

namespace latebind::service {

inline constexpr std::string_view kCacheControl = "no-cache, no-store, max-age=0";

struct ServiceConfig {
  std::string base_url = "http://127.0.0.1:8080";
  std::filesystem::path data_dir = "latebind-data";
  std::filesystem::path font_path;  // empty: the bundled font
  double max_blur_radius = 8.0;
  Duration kt_interval{3 * 3'600'000};
  std::size_t revision_cap = 20;
  Duration min_refresh_interval{60'000};
  Duration sweep_interval{60'000};
  std::size_t scheduler_workers = 2;
  /// Root of the local-file snapshot provider; unset disables it.
  std::optional<std::filesystem::path> snapshot_root;
  /// Static files served under /ui/.
  std::optional<std::filesystem::path> ui_dir;
  bool durable = true;
};

/// Checks base_url is an absolute http(s) URL; throws Error(invalid_argument).
void validate_base_url(std::string_view base_url);

/// Test seams. Null members get the production implementation.
struct ServiceDeps {
  const Clock* clock = nullptr;
  bindings::HttpFetcher* fetcher = nullptr;
};

struct ImageResult {
  int status = 200;
  std::string content_type;
  std::vector<std::uint8_t> body;
};

/// Transport-independent core of the HTTP service. Every handler is safe to
/// call concurrently.
class LateBindService {
 public:
  explicit LateBindService(ServiceConfig config, ServiceDeps deps = {});
  ~LateBindService();
  LateBindService(const LateBindService&) = delete;
  LateBindService& operator=(const LateBindService&) = delete;

  /// Starts the scheduler (bindings, blur regeneration, expiry sweep).
  void start_background();
  void stop_background();

  /// GET /i/{id}/{file}; `file` is "<segment>.<png|gif>".
  ImageResult get_image(const std::string& content_id, std::string_view file,
                        const std::optional<std::string>& token);

  ApiResult create_content(const nlohmann::json& body);
  ApiResult get_content(const std::string& content_id, const std::optional<std::string>& token);
  ApiResult patch_content(const std::string& content_id, const std::optional<std::string>& token,
                          const nlohmann::json& body);
  ApiResult delete_content(const std::string& content_id, const std::optional<std::string>& token);
  ApiResult create_binding(const nlohmann::json& body, const std::optional<std::string>& token);
  ApiResult scrub(const nlohmann::json& body) const;

  const ServiceConfig& config() const noexcept { return config_; }
  const Clock& clock() const noexcept { return *clock_; }
  const render::Renderer& renderer() const noexcept { return *renderer_; }
  store::ContentStore& store() noexcept { return *store_; }
  authz::TokenRegistry& tokens() noexcept { return *tokens_; }
  lifecycle::Lifecycle& lifecycle() noexcept { return *lifecycle_; }
  bindings::Scheduler& scheduler() noexcept { return *scheduler_; }
  bindings::BindingEngine& engine() noexcept { return *engine_; }
  bindings::SnapshotRegistry& snapshots() noexcept { return snapshots_; }

  static constexpr std::string_view kSweepJob = "sweep";
  static constexpr std::string_view kPlaceholderText = "Waiting for data…";

 private:
  /// Throws unauthorized/forbidden. Returns the validation result otherwise.
  authz::Validation require_token(const std::string& id, const std::optional<std::string>& token,
                                  bool allow_revoked);
  nlohmann::json describe(const store::BoundContent& c, TimePoint now) const;
  nlohmann::json urls_and_snippet(const std::string& id, const SnippetOptions& options);

  ServiceConfig config_;
  std::unique_ptr<SystemClock> own_clock_;
  const Clock* clock_;
  std::unique_ptr<bindings::HttplibFetcher> own_fetcher_;
  bindings::HttpFetcher* fetcher_;
  std::shared_ptr<const render::Font> font_;
  std::unique_ptr<render::Renderer> renderer_;
  std::unique_ptr<store::ContentStore> store_;
  std::unique_ptr<authz::TokenRegistry> tokens_;
  std::unique_ptr<lifecycle::Lifecycle> lifecycle_;
  bindings::SnapshotRegistry snapshots_;
  std::unique_ptr<bindings::Scheduler> scheduler_;
  std::unique_ptr<bindings::BindingEngine> engine_;
};

}  // namespace latebind::service
