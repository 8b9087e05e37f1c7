// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "image_oracle.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace latebind::testing {
namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  std::uint8_t u8() {
    if (pos_ >= b_.size()) throw std::runtime_error("gif: truncated");
    return b_[pos_++];
  }
  int u16() {
    const int lo = u8();
    return lo | (u8() << 8);
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (pos_ + n > b_.size()) throw std::runtime_error("gif: truncated");
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<std::uint8_t> sub_blocks() {
    std::vector<std::uint8_t> out;
    for (std::uint8_t n = u8(); n != 0; n = u8()) {
      auto s = take(n);
      out.insert(out.end(), s.begin(), s.end());
    }
    return out;
  }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

std::vector<std::uint8_t> lzw_decode(const std::vector<std::uint8_t>& data, int min_code_size,
                                     std::size_t expected) {
  const int clear = 1 << min_code_size;
  const int eoi = clear + 1;
  std::vector<std::vector<std::uint8_t>> table;
  auto reset = [&] {
    table.assign(static_cast<std::size_t>(clear + 2), {});
    for (int i = 0; i < clear; ++i) table[static_cast<std::size_t>(i)] = {static_cast<std::uint8_t>(i)};
  };
  reset();
  int width = min_code_size + 1;
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> prev;
  bool have_prev = false;
  std::uint32_t acc = 0;
  int bits = 0;
  std::size_t i = 0;
  while (true) {
    while (bits < width) {
      if (i >= data.size()) return out;
      acc |= static_cast<std::uint32_t>(data[i++]) << bits;
      bits += 8;
    }
    const int code = static_cast<int>(acc & ((1u << width) - 1));
    acc >>= width;
    bits -= width;
    if (code == clear) {
      reset();
      width = min_code_size + 1;
      have_prev = false;
      continue;
    }
    if (code == eoi) break;
    std::vector<std::uint8_t> entry;
    if (code < static_cast<int>(table.size())) {
      entry = table[static_cast<std::size_t>(code)];
      if (have_prev) {
        auto added = prev;
        added.push_back(entry[0]);
        table.push_back(std::move(added));
      }
    } else if (have_prev && code == static_cast<int>(table.size())) {
      entry = prev;
      entry.push_back(prev[0]);
      table.push_back(entry);
    } else {
      throw std::runtime_error("gif: bad LZW code");
    }
    out.insert(out.end(), entry.begin(), entry.end());
    prev = std::move(entry);
    have_prev = true;
    if (static_cast<int>(table.size()) == (1 << width) && width < 12) ++width;
  }
  if (out.size() < expected) throw std::runtime_error("gif: short image data");
  return out;
}

}  // namespace

DecodedGif decode_gif(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  auto sig = r.take(6);
  if (std::memcmp(sig.data(), "GIF89a", 6) != 0) throw std::runtime_error("gif: bad signature");
  DecodedGif gif;
  gif.width = r.u16();
  gif.height = r.u16();
  const std::uint8_t packed = r.u8();
  const int bg_index = r.u8();
  r.u8();
  std::vector<std::uint8_t> global;
  if (packed & 0x80) {
    auto s = r.take(static_cast<std::size_t>(3 * (1 << ((packed & 7) + 1))));
    global.assign(s.begin(), s.end());
  }
  (void)bg_index;
  Pixels canvas{gif.width, gif.height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(gif.width) * gif.height * 4, 0)};
  int delay = 0;
  int transparent = -1;
  int disposal = 0;
  while (true) {
    const std::uint8_t block = r.u8();
    if (block == 0x3B) break;
    if (block == 0x21) {
      const std::uint8_t label = r.u8();
      auto body = r.sub_blocks();
      if (label == 0xF9 && body.size() >= 4) {
        disposal = (body[0] >> 2) & 7;
        delay = body[1] | (body[2] << 8);
        transparent = (body[0] & 1) ? body[3] : -1;
      } else if (label == 0xFF && body.size() >= 14 &&
                 std::memcmp(body.data(), "NETSCAPE2.0", 11) == 0 && body[11] == 1) {
        gif.loop_count = body[12] | (body[13] << 8);
        gif.loop_forever = gif.loop_count == 0;
      }
      continue;
    }
    if (block != 0x2C) throw std::runtime_error("gif: unexpected block");
    const int fx = r.u16();
    const int fy = r.u16();
    const int fw = r.u16();
    const int fh = r.u16();
    const std::uint8_t fp = r.u8();
    if (fp & 0x40) throw std::runtime_error("gif: interlace not expected");
    std::vector<std::uint8_t> palette = global;
    if (fp & 0x80) {
      auto s = r.take(static_cast<std::size_t>(3 * (1 << ((fp & 7) + 1))));
      palette.assign(s.begin(), s.end());
    }
    const int min_code = r.u8();
    const auto indices = lzw_decode(r.sub_blocks(), min_code, static_cast<std::size_t>(fw) * fh);
    const Pixels before = canvas;
    for (int y = 0; y < fh; ++y) {
      for (int x = 0; x < fw; ++x) {
        const int idx = indices[static_cast<std::size_t>(y) * fw + x];
        if (idx == transparent) continue;
        if (static_cast<std::size_t>(idx) * 3 + 2 >= palette.size()) {
          throw std::runtime_error("gif: index outside palette");
        }
        const int cx = fx + x;
        const int cy = fy + y;
        if (cx >= gif.width || cy >= gif.height) continue;
        auto* px = &canvas.rgba[(static_cast<std::size_t>(cy) * gif.width + cx) * 4];
        px[0] = palette[idx * 3];
        px[1] = palette[idx * 3 + 1];
        px[2] = palette[idx * 3 + 2];
        px[3] = 255;
      }
    }
    gif.frames.push_back({delay, canvas});
    if (disposal == 3) canvas = before;
    if (disposal == 2) {
      for (int y = fy; y < std::min(fy + fh, gif.height); ++y) {
        for (int x = fx; x < std::min(fx + fw, gif.width); ++x) {
          std::memset(&canvas.rgba[(static_cast<std::size_t>(y) * gif.width + x) * 4], 0, 4);
        }
      }
    }
    delay = 0;
    transparent = -1;
    disposal = 0;
  }
  return gif;
}

Pixels decode_png_oracle(std::span<const std::uint8_t> bytes) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  struct Src {
    std::span<const std::uint8_t> b;
    std::size_t pos;
  } src{bytes, 0};
  Pixels out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png: decode failed");
  }
  png_set_read_fn(png, &src, [](png_structp p, png_bytep data, png_size_t n) {
    auto* s = static_cast<Src*>(png_get_io_ptr(p));
    if (s->pos + n > s->b.size()) png_error(p, "truncated");
    std::memcpy(data, s->b.data() + s->pos, n);
    s->pos += n;
  });
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_gray_to_rgb(png);
  png_set_add_alpha(png, 0xFF, PNG_FILLER_AFTER);
  png_read_update_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.rgba.resize(static_cast<std::size_t>(out.width) * out.height * 4);
  std::vector<png_bytep> rows(static_cast<std::size_t>(out.height));
  for (int y = 0; y < out.height; ++y) {
    rows[static_cast<std::size_t>(y)] = &out.rgba[static_cast<std::size_t>(y) * out.width * 4];
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::vector<double> ink(const Pixels& p) {
  std::vector<double> out(static_cast<std::size_t>(p.width) * p.height);
  for (int y = 0; y < p.height; ++y) {
    for (int x = 0; x < p.width; ++x) {
      out[static_cast<std::size_t>(y) * p.width + x] = 255.0 - p.channel(x, y, 0);
    }
  }
  return out;
}

std::vector<double> gaussian_2d(const std::vector<double>& src, int width, int height, double sigma) {
  if (sigma <= 0) return src;
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> out(src.size());
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0;
      double norm = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
          const double w = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
          const int sx = std::clamp(x + dx, 0, width - 1);
          const int sy = std::clamp(y + dy, 0, height - 1);
          acc += w * src[static_cast<std::size_t>(sy) * width + sx];
          norm += w;
        }
      }
      out[static_cast<std::size_t>(y) * width + x] = acc / norm;
    }
  }
  return out;
}

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) return 1e9;
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

}  // namespace latebind::testing
