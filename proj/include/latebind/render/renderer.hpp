// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "latebind/common/clock.hpp"
#include "latebind/render/font.hpp"
#include "latebind/render/layout.hpp"
#include "latebind/render/raster.hpp"

namespace latebind::render {

enum class ImageFormat { static_raster, animated };

std::string_view file_extension(ImageFormat format) noexcept;  // "png" / "gif"
std::string_view mime_type(ImageFormat format) noexcept;

inline constexpr int kFrameDelayMs = 100;
inline constexpr int kBlurFrames = 10;
inline constexpr int kHistoryFrames = 20;

/// One rendered image segment. The renderer leaves content_id, revision and
/// created_at empty; the store stamps them on commit.
struct ImageAsset {
  std::string content_id;
  std::size_t segment_index = 0;
  std::uint64_t revision = 0;
  ImageFormat format = ImageFormat::static_raster;
  int width = 0;
  int height = 0;
  std::size_t byte_length = 0;
  std::vector<std::uint8_t> payload;
  TimePoint created_at{};
  int frame_count = 1;
  /// Code points drawn with the replacement glyph because the font lacks them.
  std::uint32_t replaced_glyphs = 0;
};

enum class NotificationKind { expired, deleted };

std::string_view notification_text(NotificationKind kind) noexcept;

struct RendererOptions {
  /// Blur standard deviation of the last frame when the content is fully aged.
  double max_blur_radius = 8.0;
};

/// Text -> PNG/GIF under the size budgets of a RenderSpec. All methods are
/// const and safe to call concurrently.
class Renderer {
 public:
  explicit Renderer(std::shared_ptr<const Font> font, RendererOptions options = {});

  const Font& font() const noexcept { return *font_; }
  const RendererOptions& options() const noexcept { return options_; }

  RenderPlan plan_layout(std::string_view text, const RenderSpec& spec) const;

  /// One PNG per segment. Over-budget segments are palette-reduced first and
  /// then split by lines.
  std::vector<ImageAsset> render_static(std::string_view text, const RenderSpec& spec) const;

  /// Ten 100 ms frames; frame k is blurred with sigma (k/9) * fraction * R_max.
  /// Segmentation is chosen so that the fully blurred rendering fits the
  /// budget, which keeps the segment count stable as the content ages.
  std::vector<ImageAsset> render_blur_animations(std::string_view text, const RenderSpec& spec,
                                                 double fraction_elapsed) const;
  /// First segment of render_blur_animations.
  ImageAsset render_blur_animation(std::string_view text, const RenderSpec& spec,
                                   double fraction_elapsed) const;

  /// Twenty 100 ms frames per segment: the previous revision with a
  /// left-to-right strikethrough sweep, then the latest revision.
  std::vector<ImageAsset> render_history_animations(std::span<const std::string> revisions,
                                                    const RenderSpec& spec) const;
  ImageAsset render_history_animation(std::span<const std::string> revisions,
                                      const RenderSpec& spec) const;

  /// Fixed notice. Animated notifications are ten identical frames so that
  /// they can stand in for an expired animation at the same URL.
  ImageAsset render_notification(NotificationKind kind, const RenderSpec& spec,
                                 ImageFormat format = ImageFormat::static_raster) const;

  /// Horizontal bars under their labels; the largest value spans 0.9 of
  /// target_width.
  ImageAsset render_bar_chart(std::span<const double> values, std::span<const std::string> labels,
                              const RenderSpec& spec) const;

  /// Coverage mask of a run of planned lines, drawn from the top-left.
  /// Width is the widest line (at least 1), clamped to target_width.
  Mask draw_lines(std::span<const PlannedLine> lines, const RenderSpec& spec,
                  std::uint32_t* replaced = nullptr) const;

  /// Baseline offset from the top of a line box.
  int baseline_offset(const RenderSpec& spec) const;

 private:
  struct LineRange {
    std::size_t begin;
    std::size_t end;
  };

  std::vector<LineRange> fit_ranges(
      const RenderPlan& plan, const RenderSpec& spec,
      const std::function<std::size_t(LineRange, int levels)>& encoded_size) const;

  std::shared_ptr<const Font> font_;
  RendererOptions options_;
};

/// Frame k of a blur animation uses sigma = (k / 9) * fraction * max_radius.
double blur_sigma(int frame, double fraction_elapsed, double max_radius) noexcept;

}  // namespace latebind::render
