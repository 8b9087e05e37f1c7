// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/render/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "latebind/common/error.hpp"
#include "latebind/common/utf8.hpp"
#include "latebind/render/blur.hpp"
#include "latebind/render/gif.hpp"
#include "latebind/render/png.hpp"

namespace latebind::render {
namespace {

// Palette sizes tried, in order, before and after splitting a segment.
constexpr int kLevelsBeforeSplit[] = {256, 16};
constexpr int kLevelsAfterSplit[] = {4, 2};

ImageAsset make_asset(ImageFormat format, int width, int height, std::vector<std::uint8_t> payload,
                      int frames, std::uint32_t replaced) {
  ImageAsset asset;
  asset.format = format;
  asset.width = width;
  asset.height = height;
  asset.byte_length = payload.size();
  asset.payload = std::move(payload);
  asset.frame_count = frames;
  asset.replaced_glyphs = replaced;
  return asset;
}

ImageAsset encode_frames(const std::vector<Mask>& masks, const RenderSpec& spec, int levels,
                         std::uint32_t replaced) {
  std::vector<IndexedImage> frames;
  frames.reserve(masks.size());
  for (const auto& m : masks) {
    frames.push_back(colorize(m, spec.background_color, spec.text_color, levels));
  }
  auto bytes = encode_gif(frames, GifOptions{kFrameDelayMs / 10, true});
  return make_asset(ImageFormat::animated, masks.front().width(), masks.front().height(),
                    std::move(bytes), static_cast<int>(masks.size()), replaced);
}

/// Pads (never crops) a mask to the given size with zero coverage.
Mask extend(const Mask& m, int width, int height) {
  if (m.width() == width && m.height() == height) return m;
  Mask out(width, height);
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) out.set(x, y, m.at(x, y));
  }
  return out;
}

[[noreturn]] void over_budget(std::size_t budget) {
  throw Error(ErrorCode::invalid_argument,
              "rendered segment cannot fit within " + std::to_string(budget) + " bytes");
}

}  // namespace

std::string_view file_extension(ImageFormat format) noexcept {
  return format == ImageFormat::animated ? "gif" : "png";
}

std::string_view mime_type(ImageFormat format) noexcept {
  return format == ImageFormat::animated ? "image/gif" : "image/png";
}

std::string_view notification_text(NotificationKind kind) noexcept {
  return kind == NotificationKind::expired ? "This content has expired."
                                           : "This content was removed by the sender.";
}

double blur_sigma(int frame, double fraction_elapsed, double max_radius) noexcept {
  const double f = std::clamp(fraction_elapsed, 0.0, 1.0);
  return (static_cast<double>(frame) / (kBlurFrames - 1)) * f * max_radius;
}

Renderer::Renderer(std::shared_ptr<const Font> font, RendererOptions options)
    : font_(std::move(font)), options_(options) {
  if (!font_) throw Error(ErrorCode::invalid_argument, "renderer needs a font");
  if (!(options_.max_blur_radius >= 0)) {
    throw Error(ErrorCode::invalid_argument, "max blur radius must be non-negative");
  }
}

RenderPlan Renderer::plan_layout(std::string_view text, const RenderSpec& spec) const {
  return render::plan_layout(text, spec, *font_);
}

int Renderer::baseline_offset(const RenderSpec& spec) const {
  const VerticalMetrics m = font_->metrics(spec.font_size);
  const double slack = spec.line_height() - (m.ascent + m.descent);
  return static_cast<int>(std::lround(slack / 2 + m.ascent));
}

Mask Renderer::draw_lines(std::span<const PlannedLine> lines, const RenderSpec& spec,
                          std::uint32_t* replaced) const {
  const int line_height = spec.line_height();
  int width = 1;
  for (const auto& line : lines) width = std::max(width, line.width);
  width = std::min(width, spec.target_width);
  const int height = std::max<int>(1, static_cast<int>(lines.size())) * line_height;
  Mask mask(width, height);
  const int baseline = baseline_offset(spec);
  std::uint32_t missing = 0;
  int row = 0;
  for (const auto& line : lines) {
    int pen = 0;
    const int y = row * line_height + baseline;
    for (const auto& cp : utf8::decode(line.text)) {
      const GlyphChoice choice = choose_glyph(*font_, cp.value, spec.font_size);
      if (choice.replaced) ++missing;
      if (choice.visible && pen < width) {
        const auto bitmap = font_->rasterize(choice.glyph, spec.font_size);
        const Mask& cov = bitmap->coverage;
        for (int gy = 0; gy < cov.height(); ++gy) {
          for (int gx = 0; gx < cov.width(); ++gx) {
            const std::uint8_t v = cov.at(gx, gy);
            if (v != 0) mask.accumulate(pen + bitmap->left + gx, y + bitmap->top + gy, v);
          }
        }
      }
      pen += choice.advance;
    }
    ++row;
  }
  if (replaced != nullptr) *replaced = missing;
  return mask;
}

std::vector<Renderer::LineRange> Renderer::fit_ranges(
    const RenderPlan& plan, const RenderSpec& spec,
    const std::function<std::size_t(LineRange, int)>& encoded_size) const {
  std::vector<LineRange> out;
  std::function<void(LineRange)> fit = [&](LineRange r) {
    for (int levels : kLevelsBeforeSplit) {
      if (encoded_size(r, levels) <= spec.max_file_bytes) {
        out.push_back(r);
        return;
      }
    }
    if (r.end - r.begin > 1) {
      const std::size_t mid = r.begin + (r.end - r.begin) / 2;
      fit({r.begin, mid});
      fit({mid, r.end});
      return;
    }
    for (int levels : kLevelsAfterSplit) {
      if (encoded_size(r, levels) <= spec.max_file_bytes) {
        out.push_back(r);
        return;
      }
    }
    over_budget(spec.max_file_bytes);
  };
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= plan.lines.size(); ++i) {
    if (i == plan.lines.size() || plan.lines[i].segment_index != plan.lines[begin].segment_index) {
      fit({begin, i});
      begin = i;
    }
  }
  return out;
}

std::vector<ImageAsset> Renderer::render_static(std::string_view text, const RenderSpec& spec) const {
  const RenderPlan plan = plan_layout(text, spec);
  const std::span<const PlannedLine> lines(plan.lines);
  std::vector<ImageAsset> assets;
  ImageAsset last;
  auto encode = [&](LineRange r, int levels) {
    std::uint32_t replaced = 0;
    const Mask mask = draw_lines(lines.subspan(r.begin, r.end - r.begin), spec, &replaced);
    auto bytes = encode_png(colorize(mask, spec.background_color, spec.text_color, levels));
    last = make_asset(ImageFormat::static_raster, mask.width(), mask.height(), std::move(bytes), 1,
                      replaced);
    return last.byte_length;
  };
  // fit_ranges calls encode last for the accepted variant of each range, so
  // the most recent encoding is the one to keep.
  std::vector<LineRange> ranges;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= plan.lines.size(); ++i) {
    if (i == plan.lines.size() || plan.lines[i].segment_index != plan.lines[begin].segment_index) {
      RenderPlan one;
      one.lines.assign(plan.lines.begin() + static_cast<std::ptrdiff_t>(begin),
                       plan.lines.begin() + static_cast<std::ptrdiff_t>(i));
      for (auto& l : one.lines) l.segment_index = 0;
      const std::size_t offset = begin;
      std::vector<ImageAsset> accepted;
      fit_ranges(one, spec, [&](LineRange r, int levels) {
        const std::size_t size = encode({r.begin + offset, r.end + offset}, levels);
        if (size <= spec.max_file_bytes) accepted.push_back(last);
        return size;
      });
      for (auto& a : accepted) assets.push_back(std::move(a));
      begin = i;
    }
  }
  for (std::size_t i = 0; i < assets.size(); ++i) assets[i].segment_index = i;
  return assets;
}

std::vector<ImageAsset> Renderer::render_blur_animations(std::string_view text, const RenderSpec& spec,
                                                         double fraction_elapsed) const {
  if (!(fraction_elapsed >= 0.0 && fraction_elapsed <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "fraction_elapsed must be in [0, 1]");
  }
  const RenderPlan plan = plan_layout(text, spec);
  const std::span<const PlannedLine> lines(plan.lines);
  auto frames_for = [&](LineRange r, double fraction, std::uint32_t* replaced) {
    const Mask base = draw_lines(lines.subspan(r.begin, r.end - r.begin), spec, replaced);
    std::vector<Mask> frames;
    frames.reserve(kBlurFrames);
    for (int k = 0; k < kBlurFrames; ++k) {
      frames.push_back(gaussian_blur(base, blur_sigma(k, fraction, options_.max_blur_radius)));
    }
    return frames;
  };
  const auto ranges = fit_ranges(plan, spec, [&](LineRange r, int levels) {
    return encode_frames(frames_for(r, 1.0, nullptr), spec, levels, 0).byte_length;
  });
  std::vector<ImageAsset> assets;
  for (const LineRange r : ranges) {
    std::uint32_t replaced = 0;
    const auto frames = frames_for(r, fraction_elapsed, &replaced);
    bool done = false;
    for (int levels : {256, 16, 4, 2}) {
      ImageAsset a = encode_frames(frames, spec, levels, replaced);
      if (a.byte_length <= spec.max_file_bytes) {
        a.segment_index = assets.size();
        assets.push_back(std::move(a));
        done = true;
        break;
      }
    }
    if (!done) over_budget(spec.max_file_bytes);
  }
  return assets;
}

ImageAsset Renderer::render_blur_animation(std::string_view text, const RenderSpec& spec,
                                           double fraction_elapsed) const {
  return render_blur_animations(text, spec, fraction_elapsed).front();
}

std::vector<ImageAsset> Renderer::render_history_animations(std::span<const std::string> revisions,
                                                            const RenderSpec& spec) const {
  if (revisions.empty()) {
    throw Error(ErrorCode::invalid_argument, "history animation needs at least one revision");
  }
  const std::string& latest = revisions.back();
  const std::string& previous = revisions.size() >= 2 ? revisions[revisions.size() - 2] : latest;
  const bool has_history = revisions.size() >= 2;
  const RenderPlan old_plan = plan_layout(previous, spec);
  const RenderPlan new_plan = plan_layout(latest, spec);
  const std::size_t segments = std::max(old_plan.segment_count, new_plan.segment_count);
  const int line_height = spec.line_height();
  const int baseline = baseline_offset(spec);
  const int strike_y = baseline - static_cast<int>(std::lround(spec.font_size * 0.28));
  const int thickness = std::max(1, static_cast<int>(std::lround(spec.font_size / 14.0)));

  auto segment_lines = [](const RenderPlan& plan, std::size_t seg) {
    std::vector<PlannedLine> out;
    for (const auto& l : plan.lines) {
      if (l.segment_index == seg) out.push_back(l);
    }
    return out;
  };

  std::vector<ImageAsset> assets;
  for (std::size_t seg = 0; seg < segments; ++seg) {
    const auto old_lines = segment_lines(old_plan, seg);
    const auto new_lines = segment_lines(new_plan, seg);
    std::uint32_t replaced = 0;
    Mask old_mask = old_lines.empty() ? Mask(1, line_height) : draw_lines(old_lines, spec);
    Mask new_mask = new_lines.empty() ? Mask(1, line_height) : draw_lines(new_lines, spec, &replaced);
    const int w = std::max(old_mask.width(), new_mask.width());
    const int h = std::max(old_mask.height(), new_mask.height());
    old_mask = extend(old_mask, w, h);
    new_mask = extend(new_mask, w, h);

    std::vector<Mask> frames;
    frames.reserve(kHistoryFrames);
    for (int k = 0; k < kHistoryFrames / 2; ++k) {
      if (!has_history) {
        frames.push_back(new_mask);
        continue;
      }
      Mask frame = old_mask;
      for (std::size_t row = 0; row < old_lines.size(); ++row) {
        const int length = static_cast<int>(std::lround(old_lines[row].width * (k + 1) / 10.0));
        const int y = static_cast<int>(row) * line_height + strike_y;
        frame.fill_rect(Rect{0, y - thickness / 2, length, thickness}, 255);
      }
      frames.push_back(std::move(frame));
    }
    for (int k = kHistoryFrames / 2; k < kHistoryFrames; ++k) frames.push_back(new_mask);

    bool done = false;
    for (int levels : {256, 16, 4, 2}) {
      ImageAsset a = encode_frames(frames, spec, levels, replaced);
      if (a.byte_length <= spec.max_file_bytes) {
        a.segment_index = seg;
        assets.push_back(std::move(a));
        done = true;
        break;
      }
    }
    if (!done) over_budget(spec.max_file_bytes);
  }
  return assets;
}

ImageAsset Renderer::render_history_animation(std::span<const std::string> revisions,
                                              const RenderSpec& spec) const {
  return render_history_animations(revisions, spec).front();
}

ImageAsset Renderer::render_notification(NotificationKind kind, const RenderSpec& spec,
                                         ImageFormat format) const {
  const std::string_view text = notification_text(kind);
  if (format == ImageFormat::static_raster) return render_static(text, spec).front();
  const RenderPlan plan = plan_layout(text, spec);
  std::vector<PlannedLine> first;
  for (const auto& l : plan.lines) {
    if (l.segment_index == 0) first.push_back(l);
  }
  const Mask mask = draw_lines(first, spec);
  const std::vector<Mask> frames(kBlurFrames, mask);
  for (int levels : {256, 16, 4, 2}) {
    ImageAsset a = encode_frames(frames, spec, levels, 0);
    if (a.byte_length <= spec.max_file_bytes) return a;
  }
  over_budget(spec.max_file_bytes);
}

ImageAsset Renderer::render_bar_chart(std::span<const double> values,
                                      std::span<const std::string> labels,
                                      const RenderSpec& spec) const {
  spec.validate();
  if (values.empty() || values.size() != labels.size()) {
    throw Error(ErrorCode::invalid_argument, "bar chart needs one label per value and >= 1 bar");
  }
  double peak = 0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0) {
      throw Error(ErrorCode::invalid_argument, "bar values must be finite and non-negative");
    }
    peak = std::max(peak, v);
  }
  const int line_height = spec.line_height();
  const int bar_height = std::max(2, static_cast<int>(std::lround(line_height * 0.6)));
  const int gap = std::max(1, static_cast<int>(std::lround(line_height * 0.4)));
  const int row_height = line_height + bar_height + gap;
  const int height = static_cast<int>(values.size()) * row_height - gap;
  if (height > spec.max_height) {
    throw Error(ErrorCode::invalid_argument, "too many bars for max_height");
  }
  const int width = spec.target_width;
  Mask mask(width, height);
  std::uint32_t replaced = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int top = static_cast<int>(i) * row_height;
    PlannedLine label;
    label.text = labels[i];
    for (const auto& cp : utf8::decode(labels[i])) {
      label.width += choose_glyph(*font_, cp.value, spec.font_size).advance;
    }
    std::uint32_t missing = 0;
    const Mask text = draw_lines(std::span<const PlannedLine>(&label, 1), spec, &missing);
    replaced += missing;
    for (int y = 0; y < text.height(); ++y) {
      for (int x = 0; x < text.width(); ++x) mask.accumulate(x, top + y, text.at(x, y));
    }
    const int length =
        peak > 0 ? static_cast<int>(std::lround(0.9 * width * values[i] / peak)) : 0;
    mask.fill_rect(Rect{0, top + line_height, length, bar_height}, 255);
  }
  for (int levels : {256, 16, 4, 2}) {
    auto bytes = encode_png(colorize(mask, spec.background_color, spec.text_color, levels));
    if (bytes.size() <= spec.max_file_bytes) {
      return make_asset(ImageFormat::static_raster, width, height, std::move(bytes), 1, replaced);
    }
  }
  over_budget(spec.max_file_bytes);
}

}  // namespace latebind::render
