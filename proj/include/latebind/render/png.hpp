// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "latebind/render/raster.hpp"

namespace latebind::render {

/// Palette PNG; bit depth is the smallest of 1/2/4/8 that holds the palette.
/// A tRNS chunk is written when any entry is not fully opaque.
std::vector<std::uint8_t> encode_png(const IndexedImage& image);

/// Truecolor RGBA PNG with per-row adaptive filtering.
std::vector<std::uint8_t> encode_png(const Image& image);

/// Decodes any PNG libpng understands into RGBA. Throws Error(invalid_argument).
Image decode_png(std::span<const std::uint8_t> bytes);

/// 1x1 fully transparent PNG.
const std::vector<std::uint8_t>& transparent_png();

}  // namespace latebind::render
