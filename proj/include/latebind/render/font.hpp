// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "latebind/render/raster.hpp"

namespace latebind::render {

using GlyphId = std::uint16_t;

struct GlyphBitmap {
  /// Offset of the bitmap's top-left corner from the pen position on the
  /// baseline, in pixels (y grows downward).
  int left = 0;
  int top = 0;
  Mask coverage;
};

struct VerticalMetrics {
  double ascent = 0;   // above baseline, positive
  double descent = 0;  // below baseline, positive
  double line_gap = 0;
};

/// Read-only TrueType (glyf outline) font. Supports cmap formats 4 and 12,
/// simple and composite glyphs, and renders anti-aliased coverage with an
/// exact-area scanline accumulator. Instances are immutable apart from an
/// internal, lock-protected glyph cache, so one Font may be shared across
/// threads.
class Font {
 public:
  static std::shared_ptr<const Font> load(const std::filesystem::path& path);
  static std::shared_ptr<const Font> from_bytes(std::vector<std::uint8_t> bytes);

  /// The font bundled with the build (overridable with LATEBIND_FONT).
  static std::filesystem::path default_path();

  explicit Font(std::vector<std::uint8_t> bytes);

  const std::string& family_name() const noexcept { return family_; }
  int units_per_em() const noexcept { return units_per_em_; }
  std::size_t glyph_count() const noexcept { return num_glyphs_; }

  /// 0 (.notdef) when the font has no glyph for `cp`.
  GlyphId glyph_index(char32_t cp) const;
  bool has_glyph(char32_t cp) const { return glyph_index(cp) != 0; }

  /// Horizontal advance in font units.
  int advance_units(GlyphId glyph) const;
  /// Advance at `pixel_size`, rounded to whole pixels.
  int advance_px(GlyphId glyph, double pixel_size) const;
  VerticalMetrics metrics(double pixel_size) const;

  /// Rasterized glyph, cached per (glyph, size).
  std::shared_ptr<const GlyphBitmap> rasterize(GlyphId glyph, double pixel_size) const;

 private:
  struct Point {
    double x;
    double y;
    bool on_curve;
  };
  using Contour = std::vector<Point>;

  void parse();
  std::uint32_t table_offset(const char tag[4]) const;
  std::vector<Contour> outline(GlyphId glyph, int depth) const;
  std::uint32_t glyph_offset(GlyphId glyph, std::uint32_t* length) const;
  GlyphBitmap render(GlyphId glyph, double pixel_size) const;

  std::uint16_t u16(std::size_t at) const;
  std::int16_t s16(std::size_t at) const;
  std::uint32_t u32(std::size_t at) const;

  std::vector<std::uint8_t> data_;
  std::string family_;
  int units_per_em_ = 0;
  int ascender_ = 0;
  int descender_ = 0;
  int line_gap_ = 0;
  int index_to_loc_format_ = 0;
  std::size_t num_glyphs_ = 0;
  std::size_t num_hmetrics_ = 0;
  std::uint32_t hmtx_ = 0;
  std::uint32_t loca_ = 0;
  std::uint32_t glyf_ = 0;
  std::uint32_t glyf_length_ = 0;
  std::uint32_t cmap_subtable_ = 0;
  int cmap_format_ = 0;

  mutable std::shared_mutex cache_mutex_;
  mutable std::unordered_map<std::uint64_t, std::shared_ptr<const GlyphBitmap>> cache_;
};

}  // namespace latebind::render
