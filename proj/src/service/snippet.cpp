// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/service/snippet.hpp"

namespace latebind::service {

std::string image_url(std::string_view base_url, std::string_view content_id, std::size_t segment,
                      render::ImageFormat format) {
  while (!base_url.empty() && base_url.back() == '/') base_url.remove_suffix(1);
  std::string url(base_url);
  url += "/i/";
  url += content_id;
  url += '/';
  url += std::to_string(segment);
  url += '.';
  url += render::file_extension(format);
  return url;
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string generate_snippet(std::string_view content_id, std::span<const render::ImageAsset> assets,
                             const SnippetOptions& options) {
  std::string out;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    const auto& a = assets[i];
    if (i > 0) out += "<br>\n";
    out += "<img src=\"";
    out += html_escape(image_url(options.base_url, content_id, i, a.format));
    out += "\" width=\"" + std::to_string(a.width) + "\" height=\"" + std::to_string(a.height) + "\"";
    if (options.include_alt) {
      out += " alt=\"" + html_escape(options.alt_text.value_or("")) + "\"";
    }
    out += " style=\"border:0;vertical-align:bottom\">";
  }
  return out;
}

}  // namespace latebind::service
