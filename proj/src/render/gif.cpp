// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/render/gif.hpp"

#include <algorithm>
#include <array>
#include <optional>

#include "latebind/common/error.hpp"

namespace latebind::render {
namespace {

constexpr int kMaxCodes = 4096;

void put_u16(std::vector<std::uint8_t>& out, int v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
}

/// Packs variable-width codes LSB-first into 255-byte sub-blocks.
class CodeWriter {
 public:
  explicit CodeWriter(std::vector<std::uint8_t>& out) : out_(out) {}

  void put(int code, int width) {
    buffer_ |= static_cast<std::uint32_t>(code) << bits_;
    bits_ += width;
    while (bits_ >= 8) {
      byte(static_cast<std::uint8_t>(buffer_ & 0xff));
      buffer_ >>= 8;
      bits_ -= 8;
    }
  }

  void finish() {
    if (bits_ > 0) byte(static_cast<std::uint8_t>(buffer_ & 0xff));
    buffer_ = 0;
    bits_ = 0;
    flush_block();
    out_.push_back(0);
  }

 private:
  void byte(std::uint8_t b) {
    block_[block_len_++] = b;
    if (block_len_ == 255) flush_block();
  }

  void flush_block() {
    if (block_len_ == 0) return;
    out_.push_back(static_cast<std::uint8_t>(block_len_));
    out_.insert(out_.end(), block_.begin(), block_.begin() + block_len_);
    block_len_ = 0;
  }

  std::vector<std::uint8_t>& out_;
  std::uint32_t buffer_ = 0;
  int bits_ = 0;
  std::array<std::uint8_t, 255> block_{};
  int block_len_ = 0;
};

/// Open-addressed (prefix, symbol) -> code table, cleared on each LZW reset.
class CodeTable {
 public:
  CodeTable() : keys_(kSize, -1), codes_(kSize, 0) {}

  void clear() { std::fill(keys_.begin(), keys_.end(), -1); }

  std::optional<int> find(int prefix, int symbol) const {
    const int key = (prefix << 8) | symbol;
    for (std::size_t i = slot(key);; i = (i + 1) % kSize) {
      if (keys_[i] == -1) return std::nullopt;
      if (keys_[i] == key) return codes_[i];
    }
  }

  void insert(int prefix, int symbol, int code) {
    const int key = (prefix << 8) | symbol;
    std::size_t i = slot(key);
    while (keys_[i] != -1) i = (i + 1) % kSize;
    keys_[i] = key;
    codes_[i] = static_cast<std::int16_t>(code);
  }

 private:
  static constexpr std::size_t kSize = 8191;  // prime, > 2 * 4096

  static std::size_t slot(int key) {
    return (static_cast<std::uint32_t>(key) * 2654435761u) % kSize;
  }

  std::vector<int> keys_;
  std::vector<std::int16_t> codes_;
};

void lzw_encode(std::vector<std::uint8_t>& out, const std::vector<std::uint8_t>& pixels,
                int min_code_size) {
  out.push_back(static_cast<std::uint8_t>(min_code_size));
  CodeWriter writer(out);
  CodeTable table;
  const int clear = 1 << min_code_size;
  const int end = clear + 1;
  int width = min_code_size + 1;
  int next = clear + 2;
  writer.put(clear, width);
  int prefix = pixels.front();
  for (std::size_t i = 1; i < pixels.size(); ++i) {
    const int symbol = pixels[i];
    if (auto code = table.find(prefix, symbol)) {
      prefix = *code;
      continue;
    }
    writer.put(prefix, width);
    if (next < kMaxCodes) {
      if (next == (1 << width)) ++width;
      table.insert(prefix, symbol, next++);
    } else {
      writer.put(clear, width);
      table.clear();
      width = min_code_size + 1;
      next = clear + 2;
    }
    prefix = symbol;
  }
  writer.put(prefix, width);
  writer.put(end, width);
  writer.finish();
}

int table_bits(std::size_t entries) {
  int bits = 1;
  while ((std::size_t{1} << bits) < entries) ++bits;
  return bits;
}

}  // namespace

std::vector<std::uint8_t> encode_gif(std::span<const IndexedImage> frames,
                                     const GifOptions& options) {
  if (frames.empty()) throw Error(ErrorCode::invalid_argument, "GIF needs at least one frame");
  const IndexedImage& first = frames.front();
  if (first.width <= 0 || first.height <= 0 || first.width > 0xffff || first.height > 0xffff) {
    throw Error(ErrorCode::invalid_argument, "GIF dimensions out of range");
  }
  if (first.palette.empty() || first.palette.size() > 256) {
    throw Error(ErrorCode::invalid_argument, "GIF palette must hold 1..256 entries");
  }
  for (const auto& f : frames) {
    if (f.width != first.width || f.height != first.height || f.palette != first.palette) {
      throw Error(ErrorCode::invalid_argument, "GIF frames must share size and palette");
    }
  }
  const int bits = table_bits(first.palette.size());
  std::optional<int> transparent;
  for (std::size_t i = 0; i < first.palette.size(); ++i) {
    if (first.palette[i].a < 128) {
      transparent = static_cast<int>(i);
      break;
    }
  }

  std::vector<std::uint8_t> out = {'G', 'I', 'F', '8', '9', 'a'};
  put_u16(out, first.width);
  put_u16(out, first.height);
  out.push_back(static_cast<std::uint8_t>(0x80 | (7 << 4) | (bits - 1)));
  out.push_back(0);  // background index
  out.push_back(0);  // pixel aspect
  for (std::size_t i = 0; i < (std::size_t{1} << bits); ++i) {
    const Rgba c = i < first.palette.size() ? first.palette[i] : Rgba{0, 0, 0, 255};
    out.insert(out.end(), {c.r, c.g, c.b});
  }
  if (options.loop_forever && frames.size() > 1) {
    static constexpr std::uint8_t kNetscape[] = {0x21, 0xff, 0x0b, 'N', 'E', 'T', 'S', 'C',
                                                 'A',  'P',  'E',  '2', '.', '0', 0x03, 0x01};
    out.insert(out.end(), std::begin(kNetscape), std::end(kNetscape));
    put_u16(out, 0);
    out.push_back(0);
  }

  const int min_code_size = std::max(2, bits);
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const IndexedImage& frame = frames[k];
    Rect rect{0, 0, frame.width, frame.height};
    if (k > 0 && !transparent) {
      const IndexedImage& prev = frames[k - 1];
      int x0 = frame.width, y0 = frame.height, x1 = -1, y1 = -1;
      for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
          const std::size_t i = static_cast<std::size_t>(y) * frame.width + x;
          if (frame.indices[i] != prev.indices[i]) {
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
          }
        }
      }
      rect = x1 < 0 ? Rect{0, 0, 1, 1} : Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    }
    const int disposal = transparent ? 2 : 1;
    out.insert(out.end(), {0x21, 0xf9, 0x04});
    out.push_back(static_cast<std::uint8_t>((disposal << 2) | (transparent ? 1 : 0)));
    put_u16(out, options.delay_cs);
    out.push_back(static_cast<std::uint8_t>(transparent.value_or(0)));
    out.push_back(0);

    out.push_back(0x2c);
    put_u16(out, rect.x);
    put_u16(out, rect.y);
    put_u16(out, rect.width);
    put_u16(out, rect.height);
    out.push_back(0);  // no local table, not interlaced

    std::vector<std::uint8_t> pixels;
    pixels.reserve(static_cast<std::size_t>(rect.width) * rect.height);
    for (int y = rect.y; y < rect.y + rect.height; ++y) {
      const auto row = frame.indices.begin() + static_cast<std::ptrdiff_t>(y) * frame.width;
      pixels.insert(pixels.end(), row + rect.x, row + rect.x + rect.width);
    }
    lzw_encode(out, pixels, min_code_size);
  }
  out.push_back(0x3b);
  return out;
}

const std::vector<std::uint8_t>& transparent_gif() {
  static const std::vector<std::uint8_t> bytes = [] {
    IndexedImage img;
    img.width = 1;
    img.height = 1;
    img.palette = {Rgba{0, 0, 0, 0}, Rgba{0, 0, 0, 255}};
    img.indices = {0};
    return encode_gif(std::span<const IndexedImage>(&img, 1));
  }();
  return bytes;
}

}  // namespace latebind::render
