// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/bindings/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "latebind/common/error.hpp"
#include "latebind/render/png.hpp"

namespace latebind::bindings {

namespace fs = std::filesystem;

namespace {

render::Image decode_or_extract_error(std::span<const std::uint8_t> bytes, const std::string& what) {
  try {
    return render::decode_png(bytes);
  } catch (const Error& e) {
    throw Error(ErrorCode::extract, what + " is not a readable PNG: " + e.what());
  }
}

}  // namespace

render::Image RemoteImageProvider::capture(const std::string& source_url) {
  const FetchResponse res = fetcher_.get(source_url);
  const auto* p = reinterpret_cast<const std::uint8_t*>(res.body.data());
  return decode_or_extract_error({p, res.body.size()}, source_url);
}

LocalFileProvider::LocalFileProvider(fs::path root) : root_(fs::weakly_canonical(std::move(root))) {}

render::Image LocalFileProvider::capture(const std::string& source_url) {
  std::string rel = source_url;
  if (rel.rfind("file:", 0) == 0) rel = rel.substr(5);
  while (!rel.empty() && rel[0] == '/') rel.erase(0, 1);
  const fs::path path = fs::weakly_canonical(root_ / rel);
  const auto [root_end, _] = std::mismatch(root_.begin(), root_.end(), path.begin(), path.end());
  if (root_end != root_.end()) {
    throw Error(ErrorCode::extract, "snapshot path escapes the provider root: " + source_url);
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::network, "cannot open snapshot source " + path.string());
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return decode_or_extract_error(bytes, path.string());
}

void SnapshotRegistry::add(std::shared_ptr<SnapshotProvider> provider) {
  std::lock_guard lock(mu_);
  const std::string name = provider->name();
  providers_[name] = std::move(provider);
}

std::shared_ptr<SnapshotProvider> SnapshotRegistry::find(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = providers_.find(name);
  return it == providers_.end() ? nullptr : it->second;
}

render::ImageAsset fit_snapshot(const render::Image& image, const std::optional<store::CropRect>& crop,
                                const render::RenderSpec& spec) {
  render::Rect r{0, 0, image.width(), image.height()};
  if (crop) {
    const int x0 = std::max(crop->x, 0);
    const int y0 = std::max(crop->y, 0);
    const int x1 = std::min(crop->x + crop->width, image.width());
    const int y1 = std::min(crop->y + crop->height, image.height());
    if (x1 <= x0 || y1 <= y0) throw Error(ErrorCode::extract, "crop rectangle misses the snapshot");
    r = {x0, y0, x1 - x0, y1 - y0};
  }
  render::Image current = render::crop(image, r);
  if (current.width() == 0 || current.height() == 0) {
    throw Error(ErrorCode::extract, "snapshot is empty");
  }
  double scale = std::min({1.0, static_cast<double>(spec.max_width) / current.width(),
                           static_cast<double>(spec.max_height) / current.height()});
  for (int attempt = 0; attempt < 32; ++attempt) {
    const int w = std::max(1, static_cast<int>(std::floor(current.width() * scale)));
    const int h = std::max(1, static_cast<int>(std::floor(current.height() * scale)));
    const render::Image scaled =
        (w == current.width() && h == current.height()) ? current : render::resample_area(current, w, h);
    std::vector<std::vector<std::uint8_t>> candidates;
    if (auto indexed = render::to_indexed(scaled)) {
      candidates.push_back(render::encode_png(*indexed));
    } else {
      candidates.push_back(render::encode_png(scaled));
    }
    for (int colors : {256, 16}) {
      if (candidates.back().size() <= spec.max_file_bytes) break;
      candidates.push_back(render::encode_png(render::posterize(scaled, colors)));
    }
    if (candidates.back().size() <= spec.max_file_bytes) {
      render::ImageAsset a;
      a.format = render::ImageFormat::static_raster;
      a.width = w;
      a.height = h;
      a.payload = std::move(candidates.back());
      a.byte_length = a.payload.size();
      return a;
    }
    scale *= 0.75;
  }
  throw Error(ErrorCode::extract, "snapshot cannot be reduced under the byte budget");
}

}  // namespace latebind::bindings
