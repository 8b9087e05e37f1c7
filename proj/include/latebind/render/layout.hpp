// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "latebind/render/font.hpp"
#include "latebind/render/raster.hpp"

namespace latebind::render {

/// Largest image most mail clients display inline without blocking or
/// demoting it to an attachment.
inline constexpr int kSafeMaxWidth = 299;
inline constexpr int kSafeMaxHeight = 524;
inline constexpr std::size_t kSafeMaxFileBytes = 204800;

struct RenderSpec {
  std::string font_family = "DejaVu Sans";
  double font_size = 14.0;
  Rgba text_color{0, 0, 0, 255};
  Rgba background_color{255, 255, 255, 255};
  int target_width = kSafeMaxWidth;
  int max_width = kSafeMaxWidth;
  int max_height = kSafeMaxHeight;
  std::size_t max_file_bytes = kSafeMaxFileBytes;
  double line_spacing = 1.2;

  /// Pixel height of one text line: ceil(font_size * line_spacing).
  int line_height() const;
  int lines_per_segment() const { return max_height / line_height(); }

  /// Throws Error(invalid_argument) describing the first violated constraint.
  void validate() const;

  friend bool operator==(const RenderSpec&, const RenderSpec&) = default;
};

enum class LineBreak {
  end_of_text,
  newline,  // the input had '\n' here; it is not part of the line text
  wrap,     // soft wrap after whitespace, or a hard break inside a long token
};

struct PlannedLine {
  std::size_t segment_index = 0;
  std::string text;  // verbatim slice of the input, trailing spaces included
  LineBreak ending = LineBreak::end_of_text;
  int width = 0;     // advance width excluding trailing whitespace
};

struct RenderPlan {
  std::vector<PlannedLine> lines;
  std::size_t segment_count = 1;
  int line_height = 0;
  int lines_per_segment = 0;

  /// Reassembles the input: newline endings become '\n', wraps add nothing.
  std::string reconstruct() const;
};

/// How a code point is drawn: glyph to use, advance, and whether the font
/// had to substitute the replacement glyph.
struct GlyphChoice {
  GlyphId glyph = 0;
  int advance = 0;
  bool visible = true;
  bool replaced = false;
};

GlyphChoice choose_glyph(const Font& font, char32_t cp, double pixel_size);

/// Greedy line filling: whitespace runs hang at the end of a line, words that
/// do not fit move to the next line, and tokens wider than target_width are
/// hard-broken between code points. Lines are then packed into segments of
/// lines_per_segment lines.
RenderPlan plan_layout(std::string_view text, const RenderSpec& spec, const Font& font);

}  // namespace latebind::render
