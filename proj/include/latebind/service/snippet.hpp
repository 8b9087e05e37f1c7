// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "latebind/render/renderer.hpp"

namespace latebind::service {

struct SnippetOptions {
  bool include_alt = false;
  std::optional<std::string> alt_text;  // ignored unless include_alt
  std::string base_url;
};

/// BASE/i/ID/N.EXT, with any trailing '/' of the base dropped.
std::string image_url(std::string_view base_url, std::string_view content_id, std::size_t segment,
                      render::ImageFormat format);

/// One <img> per asset in segment order, joined by "<br>\n".
std::string generate_snippet(std::string_view content_id, std::span<const render::ImageAsset> assets,
                             const SnippetOptions& options);

std::string html_escape(std::string_view text);

}  // namespace latebind::service
