// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "latebind/render/raster.hpp"

namespace latebind::render {

/// Gaussian blur with standard deviation `sigma` pixels (the CSS blur()
/// convention). Kernel support is ceil(3 * sigma); edges are clamped.
/// sigma <= 0 returns the input unchanged.
Mask gaussian_blur(const Mask& mask, double sigma);

}  // namespace latebind::render
