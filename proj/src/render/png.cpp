// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/render/png.hpp"

#include <png.h>
#include <zlib.h>

#include <algorithm>
#include <cstdlib>
#include <string>

#include "latebind/common/error.hpp"

namespace latebind::render {
namespace {

constexpr std::uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const uLong crc = crc32(0L, out.data() + type_at, static_cast<uInt>(data.size() + 4));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

std::vector<std::uint8_t> deflate_bytes(const std::vector<std::uint8_t>& raw) {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out(bound);
  if (compress2(out.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw Error(ErrorCode::internal, "zlib compression failed");
  }
  out.resize(bound);
  return out;
}

std::vector<std::uint8_t> header(int width, int height, int depth, int color_type) {
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(static_cast<std::uint8_t>(depth));
  ihdr.push_back(static_cast<std::uint8_t>(color_type));
  ihdr.push_back(0);  // deflate
  ihdr.push_back(0);  // adaptive filtering
  ihdr.push_back(0);  // no interlace
  return ihdr;
}

std::uint8_t paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
  if (pb <= pc) return static_cast<std::uint8_t>(b);
  return static_cast<std::uint8_t>(c);
}

void check_dimensions(int width, int height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorCode::invalid_argument, "PNG dimensions must be positive");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_png(const IndexedImage& image) {
  check_dimensions(image.width, image.height);
  if (image.palette.empty() || image.palette.size() > 256) {
    throw Error(ErrorCode::invalid_argument, "palette must hold 1..256 entries");
  }
  int depth = 8;
  if (image.palette.size() <= 2) {
    depth = 1;
  } else if (image.palette.size() <= 4) {
    depth = 2;
  } else if (image.palette.size() <= 16) {
    depth = 4;
  }
  const std::size_t row_bytes = (static_cast<std::size_t>(image.width) * depth + 7) / 8;
  std::vector<std::uint8_t> raw;
  raw.reserve((row_bytes + 1) * static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    raw.push_back(0);  // palette images compress best unfiltered
    const std::size_t row_start = raw.size();
    raw.resize(row_start + row_bytes, 0);
    for (int x = 0; x < image.width; ++x) {
      const std::uint8_t v = image.indices[static_cast<std::size_t>(y) * image.width + x];
      const std::size_t bit = static_cast<std::size_t>(x) * depth;
      raw[row_start + bit / 8] |= static_cast<std::uint8_t>(v << (8 - depth - bit % 8));
    }
  }

  std::vector<std::uint8_t> plte;
  std::vector<std::uint8_t> trns;
  std::size_t last_translucent = 0;
  for (std::size_t i = 0; i < image.palette.size(); ++i) {
    const Rgba c = image.palette[i];
    plte.insert(plte.end(), {c.r, c.g, c.b});
    trns.push_back(c.a);
    if (c.a != 255) last_translucent = i + 1;
  }
  trns.resize(last_translucent);

  std::vector<std::uint8_t> out(std::begin(kSignature), std::end(kSignature));
  put_chunk(out, "IHDR", header(image.width, image.height, depth, 3));
  put_chunk(out, "PLTE", plte);
  if (!trns.empty()) put_chunk(out, "tRNS", trns);
  put_chunk(out, "IDAT", deflate_bytes(raw));
  put_chunk(out, "IEND", {});
  return out;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  check_dimensions(image.width(), image.height());
  const std::size_t stride = static_cast<std::size_t>(image.width()) * 4;
  std::vector<std::uint8_t> prev(stride, 0);
  std::vector<std::uint8_t> cur(stride);
  std::vector<std::uint8_t> candidate(stride);
  std::vector<std::uint8_t> best(stride);
  std::vector<std::uint8_t> raw;
  raw.reserve((stride + 1) * static_cast<std::size_t>(image.height()));
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Rgba c = image.at(x, y);
      cur[4 * x] = c.r;
      cur[4 * x + 1] = c.g;
      cur[4 * x + 2] = c.b;
      cur[4 * x + 3] = c.a;
    }
    // Pick the filter with the smallest sum of absolute signed residuals.
    std::uint8_t best_filter = 0;
    long best_score = -1;
    for (std::uint8_t filter : {0, 1, 2, 4}) {
      long score = 0;
      for (std::size_t i = 0; i < stride; ++i) {
        const int left = i >= 4 ? cur[i - 4] : 0;
        const int up = prev[i];
        const int up_left = i >= 4 ? prev[i - 4] : 0;
        int predicted = 0;
        switch (filter) {
          case 1: predicted = left; break;
          case 2: predicted = up; break;
          case 4: predicted = paeth(left, up, up_left); break;
          default: break;
        }
        candidate[i] = static_cast<std::uint8_t>(cur[i] - predicted);
        score += std::abs(static_cast<std::int8_t>(candidate[i]));
      }
      if (best_score < 0 || score < best_score) {
        best_score = score;
        best_filter = filter;
        best.swap(candidate);
      }
    }
    raw.push_back(best_filter);
    raw.insert(raw.end(), best.begin(), best.end());
    prev.swap(cur);
  }
  std::vector<std::uint8_t> out(std::begin(kSignature), std::end(kSignature));
  put_chunk(out, "IHDR", header(image.width(), image.height(), 8, 6));
  put_chunk(out, "IDAT", deflate_bytes(raw));
  put_chunk(out, "IEND", {});
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw Error(ErrorCode::invalid_argument, std::string("not a PNG: ") + img.message);
  }
  img.format = PNG_FORMAT_RGBA;
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
    std::string message = img.message;
    png_image_free(&img);
    throw Error(ErrorCode::invalid_argument, "PNG decode failed: " + message);
  }
  const int w = static_cast<int>(img.width);
  const int h = static_cast<int>(img.height);
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = (static_cast<std::size_t>(y) * w + x) * 4;
      out.set(x, y, Rgba{buffer[i], buffer[i + 1], buffer[i + 2], buffer[i + 3]});
    }
  }
  return out;
}

const std::vector<std::uint8_t>& transparent_png() {
  static const std::vector<std::uint8_t> bytes = [] {
    IndexedImage img;
    img.width = 1;
    img.height = 1;
    img.palette = {Rgba{0, 0, 0, 0}};
    img.indices = {0};
    return encode_png(img);
  }();
  return bytes;
}

}  // namespace latebind::render
