// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "latebind/render/raster.hpp"

namespace latebind::render {

struct GifOptions {
  int delay_cs = 10;        // per-frame delay in 1/100 s
  bool loop_forever = true; // NETSCAPE2.0 application extension, count 0
};

/// GIF89a animation. Frames must share dimensions and palette. Each frame
/// after the first is stored as the bounding box of pixels that changed
/// from the previous frame (disposal "leave in place"), unless the palette
/// has a transparent entry, in which case full frames are written.
std::vector<std::uint8_t> encode_gif(std::span<const IndexedImage> frames,
                                     const GifOptions& options = {});

/// 1x1 fully transparent single-frame GIF.
const std::vector<std::uint8_t>& transparent_gif();

}  // namespace latebind::render
