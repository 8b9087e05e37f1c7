// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/render/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "latebind/common/error.hpp"

namespace latebind::render {
namespace {

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::uint32_t pack(Rgba c) {
  return (static_cast<std::uint32_t>(c.r) << 24) | (static_cast<std::uint32_t>(c.g) << 16) |
         (static_cast<std::uint32_t>(c.b) << 8) | c.a;
}

}  // namespace

std::optional<Rgba> parse_color(std::string_view text) {
  if (text.size() != 7 && text.size() != 9) return std::nullopt;
  if (text[0] != '#') return std::nullopt;
  std::uint8_t channels[4] = {0, 0, 0, 255};
  for (std::size_t i = 0; i * 2 + 1 < text.size(); ++i) {
    const int hi = hex_digit(text[1 + 2 * i]);
    const int lo = hex_digit(text[2 + 2 * i]);
    if (hi < 0 || lo < 0) return std::nullopt;
    channels[i] = static_cast<std::uint8_t>(hi * 16 + lo);
  }
  return Rgba{channels[0], channels[1], channels[2], channels[3]};
}

std::string to_hex(Rgba c) {
  char buf[10];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x%02x", c.r, c.g, c.b, c.a);
  return buf;
}

Rgba blend(Rgba bg, Rgba fg, std::uint8_t coverage) noexcept {
  auto mix = [coverage](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>((a * (255 - coverage) + b * coverage + 127) / 255);
  };
  return {mix(bg.r, fg.r), mix(bg.g, fg.g), mix(bg.b, fg.b), mix(bg.a, fg.a)};
}

Mask::Mask(int width, int height)
    : width_(width),
      height_(height),
      data_(static_cast<std::size_t>(std::max(0, width)) * static_cast<std::size_t>(std::max(0, height)),
            0) {}

void Mask::accumulate(int x, int y, std::uint8_t v) {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return;
  auto& p = data_[index(x, y)];
  p = static_cast<std::uint8_t>(std::min(255, p + v));
}

void Mask::fill_rect(Rect r, std::uint8_t v) {
  const int x0 = std::max(0, r.x);
  const int y0 = std::max(0, r.y);
  const int x1 = std::min(width_, r.x + r.width);
  const int y1 = std::min(height_, r.y + r.height);
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) data_[index(x, y)] = v;
  }
}

Image::Image(int width, int height, Rgba fill)
    : width_(width),
      height_(height),
      pixels_(static_cast<std::size_t>(std::max(0, width)) * static_cast<std::size_t>(std::max(0, height)),
              fill) {}

Image IndexedImage::to_image() const {
  Image out(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out.set(x, y, palette.at(indices[static_cast<std::size_t>(y) * width + x]));
    }
  }
  return out;
}

IndexedImage colorize(const Mask& mask, Rgba background, Rgba foreground, int levels) {
  if (levels < 2 || levels > 256) {
    throw Error(ErrorCode::invalid_argument, "palette levels must be in [2, 256]");
  }
  IndexedImage out;
  out.width = mask.width();
  out.height = mask.height();
  out.palette.reserve(static_cast<std::size_t>(levels));
  for (int i = 0; i < levels; ++i) {
    out.palette.push_back(
        blend(background, foreground, static_cast<std::uint8_t>((i * 255 + (levels - 1) / 2) / (levels - 1))));
  }
  out.indices.resize(mask.data().size());
  const int top = levels - 1;
  for (std::size_t i = 0; i < mask.data().size(); ++i) {
    out.indices[i] = static_cast<std::uint8_t>((mask.data()[i] * top + 127) / 255);
  }
  return out;
}

std::optional<IndexedImage> to_indexed(const Image& image) {
  IndexedImage out;
  out.width = image.width();
  out.height = image.height();
  out.indices.resize(image.pixels().size());
  std::unordered_map<std::uint32_t, std::uint8_t> lookup;
  for (std::size_t i = 0; i < image.pixels().size(); ++i) {
    const Rgba c = image.pixels()[i];
    auto [it, inserted] = lookup.try_emplace(pack(c), static_cast<std::uint8_t>(out.palette.size()));
    if (inserted) {
      if (out.palette.size() == 256) return std::nullopt;
      out.palette.push_back(c);
    }
    out.indices[i] = it->second;
  }
  if (out.palette.empty()) out.palette.push_back(Rgba{});
  return out;
}

IndexedImage posterize(const Image& image, int colors) {
  // Uniform RGB lattice (6x7x6 or 2x3x2 levels) plus one fully transparent
  // entry; alpha snaps to opaque or transparent.
  Image reduced(image.width(), image.height());
  auto q = [](std::uint8_t v, int levels) {
    const int top = levels - 1;
    const int idx = (v * top + 127) / 255;
    return static_cast<std::uint8_t>(idx * 255 / top);
  };
  const int r_levels = colors >= 256 ? 6 : 2;
  const int g_levels = colors >= 256 ? 7 : 3;
  const int b_levels = colors >= 256 ? 6 : 2;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Rgba c = image.at(x, y);
      if (c.a < 128) {
        reduced.set(x, y, Rgba{0, 0, 0, 0});
      } else {
        reduced.set(x, y, Rgba{q(c.r, r_levels), q(c.g, g_levels), q(c.b, b_levels), 255});
      }
    }
  }
  auto indexed = to_indexed(reduced);
  if (!indexed) throw Error(ErrorCode::internal, "posterize produced too many colors");
  return *indexed;
}

Image crop(const Image& image, Rect rect) {
  const int x0 = std::clamp(rect.x, 0, image.width());
  const int y0 = std::clamp(rect.y, 0, image.height());
  const int x1 = std::clamp(rect.x + rect.width, 0, image.width());
  const int y1 = std::clamp(rect.y + rect.height, 0, image.height());
  Image out(std::max(0, x1 - x0), std::max(0, y1 - y0));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) out.set(x - x0, y - y0, image.at(x, y));
  }
  return out;
}

Image resample_area(const Image& image, int width, int height) {
  if (width <= 0 || height <= 0 || image.width() == 0 || image.height() == 0) {
    throw Error(ErrorCode::invalid_argument, "resample to empty size");
  }
  Image out(width, height);
  const double sx = static_cast<double>(image.width()) / width;
  const double sy = static_cast<double>(image.height()) / height;
  for (int oy = 0; oy < height; ++oy) {
    const double fy0 = oy * sy;
    const double fy1 = fy0 + sy;
    for (int ox = 0; ox < width; ++ox) {
      const double fx0 = ox * sx;
      const double fx1 = fx0 + sx;
      double acc[4] = {0, 0, 0, 0};
      double total = 0;
      for (int y = static_cast<int>(fy0); y < std::min<double>(fy1, image.height()); ++y) {
        const double wy = std::min<double>(y + 1, fy1) - std::max<double>(y, fy0);
        if (wy <= 0) continue;
        for (int x = static_cast<int>(fx0); x < std::min<double>(fx1, image.width()); ++x) {
          const double wx = std::min<double>(x + 1, fx1) - std::max<double>(x, fx0);
          if (wx <= 0) continue;
          const double w = wx * wy;
          const Rgba c = image.at(x, y);
          acc[0] += c.r * w;
          acc[1] += c.g * w;
          acc[2] += c.b * w;
          acc[3] += c.a * w;
          total += w;
        }
      }
      auto ch = [&](int i) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(acc[i] / total), 0L, 255L));
      };
      out.set(ox, oy, Rgba{ch(0), ch(1), ch(2), ch(3)});
    }
  }
  return out;
}

}  // namespace latebind::render
