// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace latebind::render {

struct Rgba {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 255;

  friend bool operator==(const Rgba&, const Rgba&) = default;
};

/// "#rrggbb" or "#rrggbbaa".
std::optional<Rgba> parse_color(std::string_view text);
std::string to_hex(Rgba c);

/// Linear blend of `bg` toward `fg` by coverage/255.
Rgba blend(Rgba bg, Rgba fg, std::uint8_t coverage) noexcept;

struct Rect {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;

  friend bool operator==(const Rect&, const Rect&) = default;
};

/// 8-bit coverage plane. Text, strike lines and chart bars are all drawn as
/// coverage and only mapped to colors when encoding.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::uint8_t at(int x, int y) const { return data_[index(x, y)]; }
  void set(int x, int y, std::uint8_t v) { data_[index(x, y)] = v; }
  /// Saturating add; out-of-bounds coordinates are ignored.
  void accumulate(int x, int y, std::uint8_t v);
  void fill_rect(Rect r, std::uint8_t v);
  const std::vector<std::uint8_t>& data() const noexcept { return data_; }
  std::vector<std::uint8_t>& data() noexcept { return data_; }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgba fill = {});

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Rgba at(int x, int y) const { return pixels_[index(x, y)]; }
  void set(int x, int y, Rgba c) { pixels_[index(x, y)] = c; }
  const std::vector<Rgba>& pixels() const noexcept { return pixels_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Rgba> pixels_;
};

/// Palette image; palette.size() <= 256.
struct IndexedImage {
  int width = 0;
  int height = 0;
  std::vector<Rgba> palette;
  std::vector<std::uint8_t> indices;

  Image to_image() const;
};

/// Maps coverage onto `levels` evenly spaced blends of bg..fg (2 <= levels <= 256).
IndexedImage colorize(const Mask& mask, Rgba background, Rgba foreground, int levels = 256);

/// Exact conversion when the image uses at most 256 distinct colors. Palette
/// order is first occurrence in raster order.
std::optional<IndexedImage> to_indexed(const Image& image);

/// Lossy reduction to at most `colors` entries (16 or 256) by uniform
/// per-channel quantization, with alpha kept on a coarse ramp.
IndexedImage posterize(const Image& image, int colors);

Image crop(const Image& image, Rect rect);

/// Area-averaging resample to exactly width x height.
Image resample_area(const Image& image, int width, int height);

}  // namespace latebind::render
