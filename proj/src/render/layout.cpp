// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/render/layout.hpp"

#include <cmath>

#include "latebind/common/error.hpp"
#include "latebind/common/utf8.hpp"

namespace latebind::render {
namespace {

bool is_space(char32_t cp) { return cp == U' ' || cp == U'\t' || cp == U'\r'; }

[[noreturn]] void invalid(const std::string& what) {
  throw Error(ErrorCode::invalid_argument, "invalid render spec: " + what);
}

}  // namespace

int RenderSpec::line_height() const {
  return static_cast<int>(std::ceil(font_size * line_spacing - 1e-9));
}

void RenderSpec::validate() const {
  if (!(font_size > 0) || !std::isfinite(font_size)) invalid("font_size must be positive");
  if (!(line_spacing >= 1.0) || !std::isfinite(line_spacing)) invalid("line_spacing must be >= 1.0");
  if (target_width <= 0) invalid("target_width must be positive");
  if (max_width <= 0 || max_height <= 0) invalid("max dimensions must be positive");
  if (target_width > max_width) invalid("target_width exceeds max_width");
  if (max_file_bytes == 0) invalid("max_file_bytes must be positive");
  if (line_height() > max_height) invalid("one line is taller than max_height");
}

std::string RenderPlan::reconstruct() const {
  std::string out;
  for (const auto& line : lines) {
    out += line.text;
    if (line.ending == LineBreak::newline) out.push_back('\n');
  }
  return out;
}

GlyphChoice choose_glyph(const Font& font, char32_t cp, double pixel_size) {
  if (cp == U'\t') {
    const GlyphId space = font.glyph_index(U' ');
    return {space, 4 * font.advance_px(space, pixel_size), false, false};
  }
  if (cp < 0x20 || (cp >= 0x7f && cp < 0xa0)) return {0, 0, false, false};
  GlyphChoice choice;
  choice.glyph = font.glyph_index(cp);
  if (choice.glyph == 0 || cp == utf8::kReplacement) {
    choice.replaced = true;
    choice.glyph = font.glyph_index(utf8::kReplacement);
  }
  choice.advance = font.advance_px(choice.glyph, pixel_size);
  return choice;
}

RenderPlan plan_layout(std::string_view text, const RenderSpec& spec, const Font& font) {
  spec.validate();
  RenderPlan plan;
  plan.line_height = spec.line_height();
  plan.lines_per_segment = spec.lines_per_segment();
  const int max_w = spec.target_width;
  const auto cps = utf8::decode(text);

  auto byte_at = [&](std::size_t i) { return i < cps.size() ? cps[i].offset : text.size(); };
  std::vector<int> advance(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    advance[i] = choose_glyph(font, cps[i].value, spec.font_size).advance;
  }

  auto emit = [&](std::size_t begin, std::size_t end, LineBreak ending, int width) {
    PlannedLine line;
    line.text = std::string(text.substr(byte_at(begin), byte_at(end) - byte_at(begin)));
    line.ending = ending;
    line.width = width;
    plan.lines.push_back(std::move(line));
  };

  std::size_t para_begin = 0;
  while (true) {
    std::size_t para_end = para_begin;
    while (para_end < cps.size() && cps[para_end].value != U'\n') ++para_end;

    std::size_t line_begin = para_begin;
    int content = 0;     // width through the last word, leading spaces included
    int pending = 0;     // hanging whitespace after the last word
    bool has_word = false;
    std::size_t i = para_begin;
    while (i < para_end) {
      std::size_t j = i;
      int run = 0;
      const bool space = is_space(cps[i].value);
      while (j < para_end && is_space(cps[j].value) == space) run += advance[j++];
      if (space) {
        pending += run;
        i = j;
        continue;
      }
      if (content + pending + run <= max_w) {
        content += pending + run;
        pending = 0;
        has_word = true;
        i = j;
        continue;
      }
      if (has_word || (pending > 0 && run <= max_w)) {
        emit(line_begin, i, LineBreak::wrap, content);
        line_begin = i;
        content = pending = 0;
        has_word = false;
        continue;
      }
      // Token wider than the line: break between code points.
      for (std::size_t k = i; k < j; ++k) {
        if (k != line_begin && content + pending + advance[k] > max_w) {
          emit(line_begin, k, LineBreak::wrap, content);
          line_begin = k;
          content = pending = 0;
        }
        content += pending + advance[k];
        pending = 0;
      }
      has_word = true;
      i = j;
    }
    const bool last = para_end >= cps.size();
    emit(line_begin, para_end, last ? LineBreak::end_of_text : LineBreak::newline, content);
    if (last) break;
    para_begin = para_end + 1;
  }

  for (std::size_t n = 0; n < plan.lines.size(); ++n) {
    plan.lines[n].segment_index = n / static_cast<std::size_t>(plan.lines_per_segment);
  }
  plan.segment_count = plan.lines.back().segment_index + 1;
  return plan;
}

}  // namespace latebind::render
