// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/render/blur.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace latebind::render {

Mask gaussian_blur(const Mask& mask, double sigma) {
  if (sigma <= 0.0 || mask.width() == 0 || mask.height() == 0) return mask;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    sum += w;
  }
  for (double& w : kernel) w /= sum;

  const int w = mask.width();
  const int h = mask.height();
  std::vector<double> horizontal(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        const int sx = std::clamp(x + k, 0, w - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] * mask.at(sx, y);
      }
      horizontal[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        const int sy = std::clamp(y + k, 0, h - 1);
        acc += kernel[static_cast<std::size_t>(k + radius)] *
               horizontal[static_cast<std::size_t>(sy) * w + x];
      }
      out.set(x, y, static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L)));
    }
  }
  return out;
}

}  // namespace latebind::render
