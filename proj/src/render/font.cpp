// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/render/font.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <mutex>
#include <optional>

#include "latebind/common/error.hpp"

namespace latebind::render {
namespace {

constexpr int kMaxCompositeDepth = 8;

// Composite glyph flags.
constexpr std::uint16_t kArgsAreWords = 0x0001;
constexpr std::uint16_t kArgsAreXY = 0x0002;
constexpr std::uint16_t kHaveScale = 0x0008;
constexpr std::uint16_t kMoreComponents = 0x0020;
constexpr std::uint16_t kHaveXYScale = 0x0040;
constexpr std::uint16_t kHaveTwoByTwo = 0x0080;

[[noreturn]] void malformed(const char* what) {
  throw Error(ErrorCode::invalid_argument, std::string("malformed font: ") + what);
}

double f2dot14(std::int16_t v) { return v / 16384.0; }

struct Vec {
  double x;
  double y;
};

/// Exact-area coverage accumulator: each edge deposits signed area deltas and
/// a running sum over the flat buffer yields per-pixel coverage.
class Accumulator {
 public:
  Accumulator(int w, int h)
      : w_(w), h_(h), a_(static_cast<std::size_t>(w) * h + 4, 0.0) {}

  void line(Vec p0, Vec p1) {
    if (std::abs(p0.y - p1.y) <= 1e-12) return;
    double dir = 1.0;
    if (p0.y > p1.y) {
      std::swap(p0, p1);
      dir = -1.0;
    }
    const double dxdy = (p1.x - p0.x) / (p1.y - p0.y);
    double x = p0.x;
    if (p0.y < 0.0) x -= p0.y * dxdy;
    const int y_begin = std::max(0, static_cast<int>(p0.y));
    const int y_end = std::min(h_, static_cast<int>(std::ceil(p1.y)));
    for (int y = y_begin; y < y_end; ++y) {
      const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(y) * w_;
      const double dy = std::min(y + 1.0, p1.y) - std::max(static_cast<double>(y), p0.y);
      const double xnext = x + dxdy * dy;
      const double d = dy * dir;
      const double x0 = std::clamp(std::min(x, xnext), 0.0, static_cast<double>(w_));
      const double x1 = std::clamp(std::max(x, xnext), 0.0, static_cast<double>(w_));
      const double x0floor = std::floor(x0);
      const int x0i = static_cast<int>(x0floor);
      const double x1ceil = std::ceil(x1);
      const int x1i = static_cast<int>(x1ceil);
      if (x1i <= x0i + 1) {
        const double xmf = 0.5 * (x0 + x1) - x0floor;
        add(row + x0i, d - d * xmf);
        add(row + x0i + 1, d * xmf);
      } else {
        const double s = 1.0 / (x1 - x0);
        const double x0f = x0 - x0floor;
        const double a0 = 0.5 * s * (1.0 - x0f) * (1.0 - x0f);
        const double x1f = x1 - x1ceil + 1.0;
        const double am = 0.5 * s * x1f * x1f;
        add(row + x0i, d * a0);
        if (x1i == x0i + 2) {
          add(row + x0i + 1, d * (1.0 - a0 - am));
        } else {
          const double a1 = s * (1.5 - x0f);
          add(row + x0i + 1, d * (a1 - a0));
          for (int xi = x0i + 2; xi < x1i - 1; ++xi) add(row + xi, d * s);
          const double a2 = a1 + (x1i - x0i - 3) * s;
          add(row + x1i - 1, d * (1.0 - a2 - am));
        }
        add(row + x1i, d * am);
      }
      x = xnext;
    }
  }

  Mask finish() const {
    Mask out(w_, h_);
    double acc = 0.0;
    auto& px = out.data();
    for (std::size_t i = 0; i < px.size(); ++i) {
      acc += a_[i];
      const double cov = std::min(1.0, std::abs(acc));
      px[i] = static_cast<std::uint8_t>(std::lround(cov * 255.0));
    }
    return out;
  }

 private:
  void add(std::ptrdiff_t i, double v) {
    if (i >= 0 && static_cast<std::size_t>(i) < a_.size()) a_[static_cast<std::size_t>(i)] += v;
  }

  int w_;
  int h_;
  std::vector<double> a_;
};

}  // namespace

std::shared_ptr<const Font> Font::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open font file " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return from_bytes(std::move(bytes));
}

std::shared_ptr<const Font> Font::from_bytes(std::vector<std::uint8_t> bytes) {
  return std::make_shared<const Font>(std::move(bytes));
}

std::filesystem::path Font::default_path() {
  if (const char* env = std::getenv("LATEBIND_FONT"); env != nullptr && *env != '\0') {
    return env;
  }
  return LATEBIND_DEFAULT_FONT;
}

Font::Font(std::vector<std::uint8_t> bytes) : data_(std::move(bytes)) { parse(); }

std::uint16_t Font::u16(std::size_t at) const {
  if (at + 2 > data_.size()) malformed("read past end");
  return static_cast<std::uint16_t>((data_[at] << 8) | data_[at + 1]);
}

std::int16_t Font::s16(std::size_t at) const { return static_cast<std::int16_t>(u16(at)); }

std::uint32_t Font::u32(std::size_t at) const {
  return (static_cast<std::uint32_t>(u16(at)) << 16) | u16(at + 2);
}

std::uint32_t Font::table_offset(const char tag[4]) const {
  const std::uint16_t count = u16(4);
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::size_t rec = 12 + 16u * i;
    if (rec + 16 > data_.size()) malformed("table directory");
    if (std::memcmp(&data_[rec], tag, 4) == 0) {
      const std::uint32_t off = u32(rec + 8);
      if (off >= data_.size()) malformed("table offset");
      return off;
    }
  }
  return 0;
}

void Font::parse() {
  if (data_.size() < 12) malformed("too short");
  const std::uint32_t version = u32(0);
  if (version != 0x00010000 && version != 0x74727565) malformed("not a TrueType font");

  const std::uint32_t head = table_offset("head");
  const std::uint32_t hhea = table_offset("hhea");
  const std::uint32_t maxp = table_offset("maxp");
  hmtx_ = table_offset("hmtx");
  loca_ = table_offset("loca");
  glyf_ = table_offset("glyf");
  const std::uint32_t cmap = table_offset("cmap");
  if (!head || !hhea || !maxp || !hmtx_ || !loca_ || !glyf_ || !cmap) {
    malformed("missing required table");
  }
  const std::uint16_t count = u16(4);
  for (std::uint16_t i = 0; i < count; ++i) {
    const std::size_t rec = 12 + 16u * i;
    if (std::memcmp(&data_[rec], "glyf", 4) == 0) glyf_length_ = u32(rec + 12);
  }

  units_per_em_ = u16(head + 18);
  if (units_per_em_ == 0) malformed("unitsPerEm is zero");
  index_to_loc_format_ = s16(head + 50);
  ascender_ = s16(hhea + 4);
  descender_ = s16(hhea + 6);
  line_gap_ = s16(hhea + 8);
  num_hmetrics_ = u16(hhea + 34);
  num_glyphs_ = u16(maxp + 4);
  if (num_hmetrics_ == 0 || num_glyphs_ == 0) malformed("empty metrics");

  // Prefer a full-repertoire format 12 subtable, then BMP format 4.
  const std::uint16_t subtables = u16(cmap + 2);
  int best_rank = 0;
  for (std::uint16_t i = 0; i < subtables; ++i) {
    const std::size_t rec = cmap + 4 + 8u * i;
    const std::uint16_t platform = u16(rec);
    const std::uint16_t encoding = u16(rec + 2);
    const std::uint32_t off = cmap + u32(rec + 4);
    const std::uint16_t format = u16(off);
    const bool unicode = platform == 0 || (platform == 3 && (encoding == 1 || encoding == 10));
    if (!unicode) continue;
    int rank = 0;
    if (format == 12) rank = 2;
    if (format == 4) rank = 1;
    if (rank > best_rank) {
      best_rank = rank;
      cmap_subtable_ = off;
      cmap_format_ = format;
    }
  }
  if (best_rank == 0) malformed("no Unicode cmap");

  if (const std::uint32_t name = table_offset("name")) {
    const std::uint16_t n = u16(name + 2);
    const std::uint32_t strings = name + u16(name + 4);
    for (std::uint16_t i = 0; i < n && family_.empty(); ++i) {
      const std::size_t rec = name + 6 + 12u * i;
      if (u16(rec + 6) != 1) continue;
      const std::uint16_t platform = u16(rec);
      const std::uint16_t len = u16(rec + 8);
      const std::uint32_t at = strings + u16(rec + 10);
      if (at + len > data_.size()) continue;
      if (platform == 3 || platform == 0) {
        for (std::uint16_t k = 0; k + 1 < len; k += 2) {
          const std::uint16_t ch = u16(at + k);
          family_.push_back(ch < 0x80 ? static_cast<char>(ch) : '?');
        }
      } else if (platform == 1) {
        family_.assign(reinterpret_cast<const char*>(&data_[at]), len);
      }
    }
  }
}

GlyphId Font::glyph_index(char32_t cp) const {
  const std::uint32_t t = cmap_subtable_;
  if (cmap_format_ == 12) {
    std::uint32_t lo = 0;
    std::uint32_t hi = u32(t + 12);
    while (lo < hi) {
      const std::uint32_t mid = (lo + hi) / 2;
      const std::size_t g = t + 16 + 12u * mid;
      const std::uint32_t start = u32(g);
      const std::uint32_t end = u32(g + 4);
      if (cp < start) {
        hi = mid;
      } else if (cp > end) {
        lo = mid + 1;
      } else {
        const std::uint32_t id = u32(g + 8) + (cp - start);
        return id < num_glyphs_ ? static_cast<GlyphId>(id) : 0;
      }
    }
    return 0;
  }
  if (cp > 0xffff) return 0;
  const std::uint16_t seg_count = u16(t + 6) / 2;
  const std::size_t ends = t + 14;
  const std::size_t starts = ends + 2u * seg_count + 2;
  const std::size_t deltas = starts + 2u * seg_count;
  const std::size_t range_offsets = deltas + 2u * seg_count;
  std::uint16_t lo = 0;
  std::uint16_t hi = seg_count;
  while (lo < hi) {
    const std::uint16_t mid = static_cast<std::uint16_t>((lo + hi) / 2);
    if (u16(ends + 2u * mid) < cp) {
      lo = static_cast<std::uint16_t>(mid + 1);
    } else {
      hi = mid;
    }
  }
  if (lo >= seg_count) return 0;
  const std::uint16_t start = u16(starts + 2u * lo);
  if (cp < start) return 0;
  const std::uint16_t delta = u16(deltas + 2u * lo);
  const std::size_t ro_at = range_offsets + 2u * lo;
  const std::uint16_t ro = u16(ro_at);
  std::uint32_t glyph;
  if (ro == 0) {
    glyph = (cp + delta) & 0xffff;
  } else {
    const std::uint16_t raw = u16(ro_at + ro + 2u * (cp - start));
    if (raw == 0) return 0;
    glyph = (raw + delta) & 0xffff;
  }
  return glyph < num_glyphs_ ? static_cast<GlyphId>(glyph) : 0;
}

int Font::advance_units(GlyphId glyph) const {
  const std::size_t i = std::min<std::size_t>(glyph, num_hmetrics_ - 1);
  return u16(hmtx_ + 4 * i);
}

int Font::advance_px(GlyphId glyph, double pixel_size) const {
  return static_cast<int>(std::lround(advance_units(glyph) * pixel_size / units_per_em_));
}

VerticalMetrics Font::metrics(double pixel_size) const {
  const double s = pixel_size / units_per_em_;
  return {ascender_ * s, -descender_ * s, line_gap_ * s};
}

std::uint32_t Font::glyph_offset(GlyphId glyph, std::uint32_t* length) const {
  if (glyph >= num_glyphs_) malformed("glyph index out of range");
  std::uint32_t begin;
  std::uint32_t end;
  if (index_to_loc_format_ == 0) {
    begin = 2u * u16(loca_ + 2u * glyph);
    end = 2u * u16(loca_ + 2u * glyph + 2);
  } else {
    begin = u32(loca_ + 4u * glyph);
    end = u32(loca_ + 4u * glyph + 4);
  }
  if (end < begin || end > glyf_length_) malformed("loca entry");
  *length = end - begin;
  return glyf_ + begin;
}

std::vector<Font::Contour> Font::outline(GlyphId glyph, int depth) const {
  if (depth > kMaxCompositeDepth) malformed("composite nesting too deep");
  std::uint32_t length = 0;
  const std::uint32_t g = glyph_offset(glyph, &length);
  std::vector<Contour> contours;
  if (length == 0) return contours;

  const std::int16_t num_contours = s16(g);
  if (num_contours >= 0) {
    std::vector<std::uint16_t> end_points(static_cast<std::size_t>(num_contours));
    for (int i = 0; i < num_contours; ++i) end_points[i] = u16(g + 10 + 2u * i);
    if (num_contours == 0) return contours;
    const std::size_t num_points = static_cast<std::size_t>(end_points.back()) + 1;
    std::size_t p = g + 10 + 2u * num_contours;
    p += 2 + u16(p);  // skip hinting instructions

    std::vector<std::uint8_t> flags;
    flags.reserve(num_points);
    while (flags.size() < num_points) {
      if (p >= data_.size()) malformed("glyph flags");
      const std::uint8_t f = data_[p++];
      flags.push_back(f);
      if (f & 0x08) {
        if (p >= data_.size()) malformed("glyph flags");
        std::uint8_t repeat = data_[p++];
        while (repeat-- > 0 && flags.size() < num_points) flags.push_back(f);
      }
    }
    std::vector<Point> points(num_points);
    int v = 0;
    for (std::size_t i = 0; i < num_points; ++i) {
      const std::uint8_t f = flags[i];
      if (f & 0x02) {
        if (p >= data_.size()) malformed("glyph x");
        const int d = data_[p++];
        v += (f & 0x10) ? d : -d;
      } else if (!(f & 0x10)) {
        v += s16(p);
        p += 2;
      }
      points[i].x = v;
      points[i].on_curve = (f & 0x01) != 0;
    }
    v = 0;
    for (std::size_t i = 0; i < num_points; ++i) {
      const std::uint8_t f = flags[i];
      if (f & 0x04) {
        if (p >= data_.size()) malformed("glyph y");
        const int d = data_[p++];
        v += (f & 0x20) ? d : -d;
      } else if (!(f & 0x20)) {
        v += s16(p);
        p += 2;
      }
      points[i].y = v;
    }
    std::size_t begin = 0;
    for (std::uint16_t end : end_points) {
      if (end < begin || end >= num_points) malformed("contour end points");
      contours.emplace_back(points.begin() + static_cast<std::ptrdiff_t>(begin),
                            points.begin() + static_cast<std::ptrdiff_t>(end) + 1);
      begin = static_cast<std::size_t>(end) + 1;
    }
    return contours;
  }

  std::size_t p = g + 10;
  std::uint16_t flags;
  do {
    flags = u16(p);
    const GlyphId component = u16(p + 2);
    p += 4;
    int arg1;
    int arg2;
    if (flags & kArgsAreWords) {
      arg1 = (flags & kArgsAreXY) ? s16(p) : u16(p);
      arg2 = (flags & kArgsAreXY) ? s16(p + 2) : u16(p + 2);
      p += 4;
    } else {
      if (p + 2 > data_.size()) malformed("composite args");
      arg1 = (flags & kArgsAreXY) ? static_cast<std::int8_t>(data_[p]) : data_[p];
      arg2 = (flags & kArgsAreXY) ? static_cast<std::int8_t>(data_[p + 1]) : data_[p + 1];
      p += 2;
    }
    double a = 1, b = 0, c = 0, d = 1;
    if (flags & kHaveScale) {
      a = d = f2dot14(s16(p));
      p += 2;
    } else if (flags & kHaveXYScale) {
      a = f2dot14(s16(p));
      d = f2dot14(s16(p + 2));
      p += 4;
    } else if (flags & kHaveTwoByTwo) {
      a = f2dot14(s16(p));
      b = f2dot14(s16(p + 2));
      c = f2dot14(s16(p + 4));
      d = f2dot14(s16(p + 6));
      p += 8;
    }
    auto child = outline(component, depth + 1);
    for (auto& contour : child) {
      for (auto& pt : contour) {
        const double x = pt.x;
        const double y = pt.y;
        pt.x = a * x + c * y;
        pt.y = b * x + d * y;
      }
    }
    double dx = 0;
    double dy = 0;
    if (flags & kArgsAreXY) {
      dx = arg1;
      dy = arg2;
    } else {
      // Point matching: align the child's point arg2 with the parent's arg1.
      auto nth = [](const std::vector<Contour>& cs, int n) -> const Point* {
        for (const auto& contour : cs) {
          if (n < static_cast<int>(contour.size())) return &contour[static_cast<std::size_t>(n)];
          n -= static_cast<int>(contour.size());
        }
        return nullptr;
      };
      const Point* anchor = nth(contours, arg1);
      const Point* moving = nth(child, arg2);
      if (anchor != nullptr && moving != nullptr) {
        dx = anchor->x - moving->x;
        dy = anchor->y - moving->y;
      }
    }
    for (auto& contour : child) {
      for (auto& pt : contour) {
        pt.x += dx;
        pt.y += dy;
      }
      contours.push_back(std::move(contour));
    }
  } while (flags & kMoreComponents);
  return contours;
}

GlyphBitmap Font::render(GlyphId glyph, double pixel_size) const {
  const double scale = pixel_size / units_per_em_;
  std::vector<std::vector<Vec>> polylines;
  for (const auto& contour : outline(glyph, 0)) {
    const std::size_t n = contour.size();
    if (n < 2) continue;
    auto to_px = [scale](const Point& p) { return Vec{p.x * scale, -p.y * scale}; };
    auto mid = [](Vec a, Vec b) { return Vec{(a.x + b.x) / 2, (a.y + b.y) / 2}; };

    // Start on an on-curve point, synthesizing one if the contour has none.
    std::size_t first = 0;
    while (first < n && !contour[first].on_curve) ++first;
    Vec start;
    if (first == n) {
      start = mid(to_px(contour[0]), to_px(contour[1]));
      first = 0;
    } else {
      start = to_px(contour[first]);
    }
    std::vector<Vec> poly{start};
    Vec current = start;
    std::optional<Vec> control;
    auto emit_quad = [&](Vec c0, Vec end) {
      const double ddx = current.x - 2 * c0.x + end.x;
      const double ddy = current.y - 2 * c0.y + end.y;
      const double dev = std::sqrt(ddx * ddx + ddy * ddy);
      const int steps = std::clamp(static_cast<int>(std::ceil(std::sqrt(dev * 1.25))), 1, 32);
      for (int i = 1; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const double mt = 1 - t;
        poly.push_back({mt * mt * current.x + 2 * mt * t * c0.x + t * t * end.x,
                        mt * mt * current.y + 2 * mt * t * c0.y + t * t * end.y});
      }
      current = end;
    };
    for (std::size_t k = 1; k <= n; ++k) {
      const Point& pt = contour[(first + k) % n];
      const Vec v = to_px(pt);
      if (pt.on_curve) {
        if (control) {
          emit_quad(*control, v);
          control.reset();
        } else {
          poly.push_back(v);
          current = v;
        }
      } else {
        if (control) emit_quad(*control, mid(*control, v));
        control = v;
      }
    }
    if (control) emit_quad(*control, start);
    if (poly.back().x != start.x || poly.back().y != start.y) poly.push_back(start);
    polylines.push_back(std::move(poly));
  }

  GlyphBitmap out;
  if (polylines.empty()) return out;
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  for (const auto& poly : polylines) {
    for (const auto& v : poly) {
      min_x = std::min(min_x, v.x);
      min_y = std::min(min_y, v.y);
      max_x = std::max(max_x, v.x);
      max_y = std::max(max_y, v.y);
    }
  }
  const int left = static_cast<int>(std::floor(min_x));
  const int top = static_cast<int>(std::floor(min_y));
  const int w = std::max(1, static_cast<int>(std::ceil(max_x)) - left);
  const int h = std::max(1, static_cast<int>(std::ceil(max_y)) - top);
  Accumulator acc(w, h);
  for (const auto& poly : polylines) {
    for (std::size_t i = 1; i < poly.size(); ++i) {
      acc.line({poly[i - 1].x - left, poly[i - 1].y - top}, {poly[i].x - left, poly[i].y - top});
    }
  }
  out.left = left;
  out.top = top;
  out.coverage = acc.finish();
  return out;
}

std::shared_ptr<const GlyphBitmap> Font::rasterize(GlyphId glyph, double pixel_size) const {
  const auto key = (static_cast<std::uint64_t>(glyph) << 32) |
                   static_cast<std::uint32_t>(std::lround(pixel_size * 64));
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto bitmap = std::make_shared<const GlyphBitmap>(render(glyph, pixel_size));
  std::unique_lock lock(cache_mutex_);
  return cache_.try_emplace(key, std::move(bitmap)).first->second;
}

}  // namespace latebind::render
