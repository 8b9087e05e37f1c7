// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "latebind/bindings/fetcher.hpp"
#include "latebind/render/layout.hpp"
#include "latebind/render/raster.hpp"
#include "latebind/render/renderer.hpp"
#include "latebind/store/content.hpp"

namespace latebind::bindings {

/// Produces a raster for a source URL. Failures are reported as
/// Error(network) or Error(extract).
class SnapshotProvider {
 public:
  virtual ~SnapshotProvider() = default;
  virtual std::string name() const = 0;
  virtual render::Image capture(const std::string& source_url) = 0;
};

/// The source URL points at a PNG, which is downloaded as is.
class RemoteImageProvider final : public SnapshotProvider {
 public:
  explicit RemoteImageProvider(HttpFetcher& fetcher) : fetcher_(fetcher) {}
  std::string name() const override { return "remote-image"; }
  render::Image capture(const std::string& source_url) override;

 private:
  HttpFetcher& fetcher_;
};

/// Reads PNG files below a root directory ("file:name.png" or "name.png").
class LocalFileProvider final : public SnapshotProvider {
 public:
  explicit LocalFileProvider(std::filesystem::path root);
  std::string name() const override { return "local-file"; }
  render::Image capture(const std::string& source_url) override;

 private:
  std::filesystem::path root_;
};

class SnapshotRegistry {
 public:
  void add(std::shared_ptr<SnapshotProvider> provider);
  /// nullptr when unknown.
  std::shared_ptr<SnapshotProvider> find(const std::string& name) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<SnapshotProvider>> providers_;
};

/// Crops to `crop` (clipped to the image), downscales to fit max_width x
/// max_height, and encodes a PNG within max_file_bytes, reducing colours and
/// then size as needed. Errors: extract when the crop misses the image.
render::ImageAsset fit_snapshot(const render::Image& image, const std::optional<store::CropRect>& crop,
                                const render::RenderSpec& spec);

}  // namespace latebind::bindings
