// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace latebind::testing {

/// 8-bit RGBA pixels, row-major.
struct Pixels {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  std::uint8_t channel(int x, int y, int c) const {
    return rgba[(static_cast<std::size_t>(y) * width + x) * 4 + c];
  }
  friend bool operator==(const Pixels&, const Pixels&) = default;
};

struct GifFrame {
  int delay_cs = 0;
  Pixels pixels;  // composited onto the logical screen
};

struct DecodedGif {
  int width = 0;
  int height = 0;
  bool loop_forever = false;
  int loop_count = -1;  // from NETSCAPE2.0, -1 when absent
  std::vector<GifFrame> frames;
};

/// Standalone GIF89a reader (LZW included). Throws std::runtime_error.
DecodedGif decode_gif(std::span<const std::uint8_t> bytes);

/// PNG reader on the classic libpng read API. Throws std::runtime_error.
Pixels decode_png_oracle(std::span<const std::uint8_t> bytes);

/// Luminance coverage in [0, 255]: 255 - red channel for black-on-white.
std::vector<double> ink(const Pixels& p);

/// Direct two-dimensional Gaussian convolution with a 4-sigma support and
/// edge clamping. Deliberately not separable.
std::vector<double> gaussian_2d(const std::vector<double>& src, int width, int height, double sigma);

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace latebind::testing
