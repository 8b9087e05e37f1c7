// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "latebind/authz/token.hpp"
#include "latebind/render/renderer.hpp"
#include "latebind/store/content.hpp"

namespace latebind::store {

struct StoreOptions {
  std::filesystem::path data_dir;
  /// Revisions (and their asset files) kept per content.
  std::size_t revision_cap = 20;
  /// fsync asset and metadata files on revision commits.
  bool durable = true;
};

/// Called under the content lock just before a revision commits; throw to
/// abort the commit.
using RevisionGuard = std::function<void(const BoundContent&)>;

/// File-backed content repository.
///
///   <data_dir>/salt
///   <data_dir>/contents/<id>/meta.json
///   <data_dir>/contents/<id>/assets/<sha256>.<png|gif>
///
/// meta.json is replaced by write-then-rename after the asset files of a
/// revision are on disk, so a crash leaves either the old or the new
/// revision. Every content has its own recursive mutex; lock() lets callers
/// group several operations into one atomic step.
class ContentStore final : public authz::TokenRepository {
 public:
  explicit ContentStore(StoreOptions options);
  ~ContentStore() override;

  const StoreOptions& options() const noexcept { return options_; }
  std::filesystem::path salt_path() const { return options_.data_dir / "salt"; }

  /// Fresh 160-bit base32 identifier not used by any stored content.
  std::string new_content_id() const;

  /// Stores `content` with revision 1 made of `assets`. segment_slots is set
  /// to assets.size(). Errors: conflict if the id exists.
  std::uint64_t create(BoundContent content, std::optional<std::string> source,
                       std::vector<render::ImageAsset> assets, TimePoint now);

  /// Appends a revision. Errors: not_found, content_expired (not live),
  /// conflict (more segments than the content's slots), or whatever `guard`
  /// throws.
  std::uint64_t put_revision(const std::string& id, std::optional<std::string> source,
                             std::vector<render::ImageAsset> assets, TimePoint now,
                             const RevisionGuard& guard = {});

  /// Asset of the highest committed revision. Slots beyond the revision's
  /// segment count get a 1x1 transparent image; after retirement every slot
  /// serves the notification. Errors: not_found.
  render::ImageAsset get_latest_asset(const std::string& id, std::size_t segment) const;
  std::vector<render::ImageAsset> latest_assets(const std::string& id) const;

  BoundContent get(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::vector<std::string> list() const;

  /// Metadata-only change (view state, binding, token). Persisted without fsync.
  void update(const std::string& id, const std::function<void(BoundContent&)>& fn);

  /// Commits `notification` as a new revision, marks the content expired or
  /// deleted and purges its source. Returns false (and changes nothing) when
  /// the content is already retired.
  bool retire(const std::string& id, ContentStatus status,
              std::optional<lifecycle::ExpiryReason> reason, render::ImageAsset notification,
              TimePoint now);

  /// Drops source text and pre-retirement assets. Idempotent. Errors:
  /// not_found, conflict for live content.
  void purge_source(const std::string& id);

  std::unique_lock<std::recursive_mutex> lock(const std::string& id) const;

  // authz::TokenRepository
  bool has_subject(const std::string& content_id) const override;
  bool insert_token(const std::string& content_id, const authz::TokenRecord& record) override;
  std::optional<authz::TokenRecord> find_token(const std::string& content_id) const override;
  void mark_revoked(const std::string& content_id) override;

 private:
  struct Entry {
    mutable std::recursive_mutex mu;
    BoundContent meta;
    std::vector<std::shared_ptr<const render::ImageAsset>> latest;
  };

  Entry& entry(const std::string& id) const;
  std::filesystem::path content_dir(const std::string& id) const;
  std::filesystem::path asset_path(const std::string& id, const AssetRef& ref) const;
  void load_all();
  void persist(const Entry& e, bool durable) const;
  RevisionRecord write_revision(const std::string& id, std::uint64_t revision,
                                std::optional<std::string> source,
                                std::vector<render::ImageAsset>& assets, TimePoint now) const;
  void install_latest(Entry& e, std::vector<render::ImageAsset> assets) const;
  std::vector<RevisionRecord> trim(BoundContent& meta) const;
  void remove_unreferenced(const Entry& e, const std::vector<RevisionRecord>& dropped) const;

  StoreOptions options_;
  mutable std::shared_mutex index_mu_;
  std::map<std::string, std::unique_ptr<Entry>> index_;
};

}  // namespace latebind::store
