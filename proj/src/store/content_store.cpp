// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/store/content_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <iterator>
#include <set>

#include "latebind/common/encoding.hpp"
#include "latebind/common/error.hpp"
#include "latebind/render/gif.hpp"
#include "latebind/render/png.hpp"

namespace latebind::store {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kIdBits = 160;

void write_file(const fs::path& path, const void* data, std::size_t size, bool durable) {
  const std::string tmp = path.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::io, "cannot open " + tmp);
  const auto* p = static_cast<const char*>(data);
  std::size_t left = size;
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      throw Error(ErrorCode::io, "cannot write " + tmp);
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (durable && ::fsync(fd) != 0) {
    ::close(fd);
    throw Error(ErrorCode::io, "fsync failed on " + tmp);
  }
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io, "cannot rename " + tmp + ": " + ec.message());
}

void sync_dir(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

render::ImageAsset placeholder(render::ImageFormat format) {
  render::ImageAsset a;
  a.format = format;
  a.width = 1;
  a.height = 1;
  a.payload = format == render::ImageFormat::animated ? render::transparent_gif()
                                                      : render::transparent_png();
  a.byte_length = a.payload.size();
  return a;
}

}  // namespace

ContentStore::ContentStore(StoreOptions options) : options_(std::move(options)) {
  if (options_.data_dir.empty()) throw Error(ErrorCode::invalid_argument, "data_dir is required");
  if (options_.revision_cap == 0) throw Error(ErrorCode::invalid_argument, "revision_cap must be >= 1");
  std::error_code ec;
  fs::create_directories(options_.data_dir / "contents", ec);
  if (ec) throw Error(ErrorCode::io, "cannot create " + options_.data_dir.string() + ": " + ec.message());
  load_all();
}

ContentStore::~ContentStore() = default;

fs::path ContentStore::content_dir(const std::string& id) const {
  return options_.data_dir / "contents" / id;
}

fs::path ContentStore::asset_path(const std::string& id, const AssetRef& ref) const {
  return content_dir(id) / "assets" / (ref.digest + "." + std::string(render::file_extension(ref.format)));
}

void ContentStore::load_all() {
  for (const auto& dirent : fs::directory_iterator(options_.data_dir / "contents")) {
    if (!dirent.is_directory()) continue;
    const fs::path meta = dirent.path() / "meta.json";
    if (!fs::exists(meta)) continue;  // crashed before the first commit
    const auto bytes = read_file(meta);
    auto e = std::make_unique<Entry>();
    e->meta = content_from_json(nlohmann::json::parse(bytes.begin(), bytes.end()));
    if (!e->meta.revisions.empty()) {
      std::vector<render::ImageAsset> assets;
      for (const auto& ref : e->meta.latest().assets) {
        render::ImageAsset a;
        a.segment_index = ref.segment_index;
        a.format = ref.format;
        a.width = ref.width;
        a.height = ref.height;
        a.frame_count = ref.frame_count;
        a.payload = read_file(asset_path(e->meta.content_id, ref));
        a.byte_length = a.payload.size();
        assets.push_back(std::move(a));
      }
      install_latest(*e, std::move(assets));
    }
    const std::string id = e->meta.content_id;
    index_.emplace(id, std::move(e));
  }
}

std::string ContentStore::new_content_id() const {
  for (;;) {
    std::string id = random_identifier(kIdBits);
    if (!contains(id)) return id;
  }
}

ContentStore::Entry& ContentStore::entry(const std::string& id) const {
  std::shared_lock lock(index_mu_);
  auto it = index_.find(id);
  if (it == index_.end() || !it->second) throw Error(ErrorCode::not_found, "unknown content " + id);
  return *it->second;
}

bool ContentStore::contains(const std::string& id) const {
  std::shared_lock lock(index_mu_);
  auto it = index_.find(id);
  return it != index_.end() && it->second != nullptr;
}

std::vector<std::string> ContentStore::list() const {
  std::shared_lock lock(index_mu_);
  std::vector<std::string> ids;
  ids.reserve(index_.size());
  for (const auto& [id, e] : index_) {
    if (e) ids.push_back(id);
  }
  return ids;
}

std::unique_lock<std::recursive_mutex> ContentStore::lock(const std::string& id) const {
  return std::unique_lock<std::recursive_mutex>(entry(id).mu);
}

void ContentStore::persist(const Entry& e, bool durable) const {
  const std::string text = content_to_json(e.meta).dump();
  const fs::path dir = content_dir(e.meta.content_id);
  write_file(dir / "meta.json", text.data(), text.size(), durable && options_.durable);
  if (durable && options_.durable) sync_dir(dir);
}

RevisionRecord ContentStore::write_revision(const std::string& id, std::uint64_t revision,
                                            std::optional<std::string> source,
                                            std::vector<render::ImageAsset>& assets,
                                            TimePoint now) const {
  const fs::path dir = content_dir(id) / "assets";
  fs::create_directories(dir);
  RevisionRecord rec;
  rec.revision = revision;
  rec.source = std::move(source);
  rec.created_at = now;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    auto& a = assets[i];
    a.content_id = id;
    a.segment_index = i;
    a.revision = revision;
    a.created_at = now;
    a.byte_length = a.payload.size();
    AssetRef ref{i, sha256_hex(a.payload), a.format, a.width, a.height, a.byte_length, a.frame_count};
    const fs::path path = asset_path(id, ref);
    if (!fs::exists(path)) write_file(path, a.payload.data(), a.payload.size(), options_.durable);
    rec.assets.push_back(std::move(ref));
  }
  if (options_.durable) sync_dir(dir);
  return rec;
}

void ContentStore::install_latest(Entry& e, std::vector<render::ImageAsset> assets) const {
  const RevisionRecord& rec = e.meta.latest();
  std::vector<std::shared_ptr<const render::ImageAsset>> latest;
  latest.reserve(assets.size());
  for (auto& a : assets) {
    a.content_id = e.meta.content_id;
    a.revision = rec.revision;
    a.created_at = rec.created_at;
    latest.push_back(std::make_shared<const render::ImageAsset>(std::move(a)));
  }
  e.latest = std::move(latest);
}

void ContentStore::remove_unreferenced(const Entry& e, const std::vector<RevisionRecord>& dropped) const {
  std::set<std::string> keep;
  for (const auto& r : e.meta.revisions) {
    for (const auto& a : r.assets) keep.insert(asset_path(e.meta.content_id, a).string());
  }
  for (const auto& r : dropped) {
    for (const auto& a : r.assets) {
      const auto path = asset_path(e.meta.content_id, a);
      if (!keep.count(path.string())) {
        std::error_code ec;
        fs::remove(path, ec);
      }
    }
  }
}

std::vector<RevisionRecord> ContentStore::trim(BoundContent& meta) const {
  auto& revs = meta.revisions;
  if (revs.size() <= options_.revision_cap) return {};
  const auto excess = static_cast<std::ptrdiff_t>(revs.size() - options_.revision_cap);
  std::vector<RevisionRecord> dropped(std::make_move_iterator(revs.begin()),
                                      std::make_move_iterator(revs.begin() + excess));
  revs.erase(revs.begin(), revs.begin() + excess);
  return dropped;
}

std::uint64_t ContentStore::create(BoundContent content, std::optional<std::string> source,
                                   std::vector<render::ImageAsset> assets, TimePoint now) {
  if (assets.empty()) throw Error(ErrorCode::invalid_argument, "a revision needs at least one asset");
  if (content.content_id.empty()) content.content_id = new_content_id();
  const std::string id = content.content_id;
  auto e = std::make_unique<Entry>();
  std::lock_guard entry_lock(e->mu);
  {
    std::unique_lock lock(index_mu_);
    if (index_.count(id)) throw Error(ErrorCode::conflict, "content " + id + " exists");
    e->meta = std::move(content);
    e->meta.revisions.clear();
    e->meta.status = ContentStatus::live;
    e->meta.created_at = now;
    e->meta.segment_slots = assets.size();
    index_.emplace(id, nullptr);
  }
  try {
    fs::create_directories(content_dir(id));
    e->meta.revisions.push_back(write_revision(id, 1, std::move(source), assets, now));
    persist(*e, true);
  } catch (...) {
    std::unique_lock lock(index_mu_);
    index_.erase(id);
    std::error_code ec;
    fs::remove_all(content_dir(id), ec);
    throw;
  }
  install_latest(*e, std::move(assets));
  std::unique_lock lock(index_mu_);
  index_[id] = std::move(e);
  return 1;
}

std::uint64_t ContentStore::put_revision(const std::string& id, std::optional<std::string> source,
                                         std::vector<render::ImageAsset> assets, TimePoint now,
                                         const RevisionGuard& guard) {
  Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  if (!e.meta.live()) {
    throw Error(ErrorCode::content_expired, "content " + id + " is " +
                                                std::string(to_string(e.meta.status)));
  }
  if (assets.empty()) throw Error(ErrorCode::invalid_argument, "a revision needs at least one asset");
  if (assets.size() > e.meta.segment_slots) {
    throw Error(ErrorCode::conflict, "revision needs " + std::to_string(assets.size()) +
                                         " images but the sent snippet has " +
                                         std::to_string(e.meta.segment_slots));
  }
  if (guard) guard(e.meta);
  const std::uint64_t revision = e.meta.latest_revision() + 1;
  RevisionRecord rec = write_revision(id, revision, std::move(source), assets, now);
  BoundContent next = e.meta;
  next.revisions.push_back(std::move(rec));
  const std::vector<RevisionRecord> dropped = trim(next);
  std::swap(e.meta, next);
  try {
    persist(e, true);
  } catch (...) {
    std::swap(e.meta, next);
    throw;
  }
  install_latest(e, std::move(assets));
  remove_unreferenced(e, dropped);
  return revision;
}

render::ImageAsset ContentStore::get_latest_asset(const std::string& id, std::size_t segment) const {
  const Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  if (segment >= e.meta.segment_slots || e.latest.empty()) {
    throw Error(ErrorCode::not_found, "content " + id + " has no segment " + std::to_string(segment));
  }
  const bool notification = e.meta.latest().notification;
  if (notification) {
    render::ImageAsset a = *e.latest.front();
    a.segment_index = segment;
    return a;
  }
  if (segment < e.latest.size()) return *e.latest[segment];
  render::ImageAsset a = placeholder(e.latest.front()->format);
  a.content_id = id;
  a.segment_index = segment;
  a.revision = e.meta.latest_revision();
  a.created_at = e.meta.latest().created_at;
  return a;
}

std::vector<render::ImageAsset> ContentStore::latest_assets(const std::string& id) const {
  const Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  std::vector<render::ImageAsset> out;
  for (std::size_t i = 0; i < e.meta.segment_slots && !e.latest.empty(); ++i) {
    out.push_back(get_latest_asset(id, i));
  }
  return out;
}

BoundContent ContentStore::get(const std::string& id) const {
  const Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  return e.meta;
}

void ContentStore::update(const std::string& id, const std::function<void(BoundContent&)>& fn) {
  Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  BoundContent next = e.meta;
  fn(next);
  if (next.content_id != id || next.revisions.size() != e.meta.revisions.size() ||
      next.status != e.meta.status) {
    throw Error(ErrorCode::internal, "update() may not change identity, revisions or status");
  }
  std::swap(e.meta, next);
  try {
    persist(e, false);
  } catch (...) {
    std::swap(e.meta, next);
    throw;
  }
}

bool ContentStore::retire(const std::string& id, ContentStatus status,
                          std::optional<lifecycle::ExpiryReason> reason,
                          render::ImageAsset notification, TimePoint now) {
  if (status == ContentStatus::live) throw Error(ErrorCode::internal, "retire() to live");
  Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  if (!e.meta.live()) return false;
  const std::uint64_t revision = e.meta.latest_revision() + 1;
  std::vector<render::ImageAsset> assets{std::move(notification)};
  RevisionRecord rec = write_revision(id, revision, std::nullopt, assets, now);
  rec.notification = true;
  const std::vector<RevisionRecord> dropped = std::move(e.meta.revisions);
  e.meta.revisions = {std::move(rec)};
  e.meta.status = status;
  e.meta.expiry_reason = reason;
  persist(e, true);
  install_latest(e, std::move(assets));
  remove_unreferenced(e, dropped);
  return true;
}

void ContentStore::purge_source(const std::string& id) {
  Entry& e = entry(id);
  std::lock_guard lock(e.mu);
  if (e.meta.live()) throw Error(ErrorCode::conflict, "content " + id + " is live");
  std::vector<RevisionRecord> dropped;
  std::vector<RevisionRecord> kept;
  for (auto& r : e.meta.revisions) {
    if (r.notification) {
      r.source.reset();
      kept.push_back(std::move(r));
    } else {
      dropped.push_back(std::move(r));
    }
  }
  e.meta.revisions = std::move(kept);
  if (!dropped.empty()) {
    persist(e, true);
    remove_unreferenced(e, dropped);
  }
}

bool ContentStore::has_subject(const std::string& content_id) const { return contains(content_id); }

bool ContentStore::insert_token(const std::string& content_id, const authz::TokenRecord& record) {
  Entry& e = entry(content_id);
  std::lock_guard lock(e.mu);
  if (e.meta.token) return false;
  e.meta.token = record;
  try {
    persist(e, true);
  } catch (...) {
    e.meta.token.reset();
    throw;
  }
  return true;
}

std::optional<authz::TokenRecord> ContentStore::find_token(const std::string& content_id) const {
  std::shared_lock index_lock(index_mu_);
  auto it = index_.find(content_id);
  if (it == index_.end() || !it->second) return std::nullopt;
  const Entry& e = *it->second;
  index_lock.unlock();
  std::lock_guard lock(e.mu);
  return e.meta.token;
}

void ContentStore::mark_revoked(const std::string& content_id) {
  std::shared_lock index_lock(index_mu_);
  auto it = index_.find(content_id);
  if (it == index_.end() || !it->second) return;
  Entry& e = *it->second;
  index_lock.unlock();
  std::lock_guard lock(e.mu);
  if (!e.meta.token || e.meta.token->status == authz::TokenStatus::revoked) return;
  e.meta.token->status = authz::TokenStatus::revoked;
  persist(e, true);
}

}  // namespace latebind::store
