// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "image_oracle.hpp"
#include "latebind/common/error.hpp"
#include "latebind/common/utf8.hpp"
#include "latebind/render/gif.hpp"
#include "latebind/render/png.hpp"
#include "latebind/render/renderer.hpp"

using namespace latebind;
using namespace latebind::render;
using latebind::testing::decode_gif;
using latebind::testing::decode_png_oracle;
using latebind::testing::bundled_font;
using latebind::testing::shared_renderer;

namespace {

// Frozen from tests/oracles/wrap_oracle.py (fontTools hmtx, 14 px, 299 px).
constexpr const char* kSentence =
    "The quarterly numbers are in: revenue grew nine percent while costs stayed flat across all "
    "regions!!";
const std::vector<std::string> kSentenceLines = {"The quarterly numbers are in: revenue ",
                                                 "grew nine percent while costs stayed flat ",
                                                 "across all regions!!"};
const std::vector<int> kSentenceWidths = {276, 288, 136};
constexpr int kLineHeight = 17;
constexpr int kLinesPerSegment = 30;
constexpr std::size_t kSegmentsFor400Lines = 14;
constexpr int kHelloWidth = 37;
constexpr int kHiJohnWidth = 50;

std::string random_unicode(std::mt19937& rng, std::size_t length) {
  static const std::u32string pool =
      U"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789      \n\t.,;:!?-'\"()"
      U"éüßñçøåæœ€£¥ΩπΣλжЖщЯ→∞≠±°©®™•…漢字かなカナ한국어😀🎉\U0001F9EA";
  std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
  std::u32string s;
  for (std::size_t i = 0; i < length; ++i) s.push_back(pool[pick(rng)]);
  return utf8::encode(s);
}

std::string lines_text(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += '\n';
    s += "line " + std::to_string(i);
  }
  return s;
}

void check_budget(const ImageAsset& a, const RenderSpec& spec) {
  CHECK(a.width >= 1);
  CHECK(a.height >= 1);
  CHECK(a.width <= spec.max_width);
  CHECK(a.height <= spec.max_height);
  CHECK(a.byte_length <= spec.max_file_bytes);
  CHECK(a.byte_length == a.payload.size());
}

}  // namespace

TEST_CASE("default spec metrics match the oracle") {
  const RenderSpec spec;
  CHECK(spec.line_height() == kLineHeight);
  CHECK(spec.lines_per_segment() == kLinesPerSegment);
  CHECK(spec.max_width == 299);
  CHECK(spec.max_height == 524);
  CHECK(spec.max_file_bytes == 204800);
  CHECK(spec.target_width <= spec.max_width);
}

TEST_CASE("spec validation rejects bad values") {
  auto bad = [](auto mutate) {
    RenderSpec s;
    mutate(s);
    CHECK_THROWS_AS(s.validate(), Error);
  };
  bad([](RenderSpec& s) { s.font_size = 0; });
  bad([](RenderSpec& s) { s.font_size = -3; });
  bad([](RenderSpec& s) { s.line_spacing = 0.9; });
  bad([](RenderSpec& s) { s.target_width = 0; });
  bad([](RenderSpec& s) { s.target_width = 300; });
  bad([](RenderSpec& s) { s.max_height = 0; });
  bad([](RenderSpec& s) { s.max_file_bytes = 0; });
  CHECK_THROWS_AS(shared_renderer().plan_layout("x", [] {
    RenderSpec s;
    s.font_size = 0;
    return s;
  }()),
                  Error);
}

TEST_CASE("empty text plans one blank line") {
  const auto plan = shared_renderer().plan_layout("", RenderSpec{});
  CHECK(plan.segment_count == 1);
  REQUIRE(plan.lines.size() == 1);
  CHECK(plan.lines[0].text.empty());
  const auto assets = shared_renderer().render_static("", RenderSpec{});
  REQUIRE(assets.size() == 1);
  CHECK(assets[0].height == kLineHeight);
  CHECK(assets[0].byte_length > 0);
}

TEST_CASE("100-character sentence wraps like the font-table oracle") {
  REQUIRE(std::string(kSentence).size() == 100);
  const auto plan = shared_renderer().plan_layout(kSentence, RenderSpec{});
  CHECK(plan.segment_count == 1);
  REQUIRE(plan.lines.size() == kSentenceLines.size());
  for (std::size_t i = 0; i < plan.lines.size(); ++i) {
    CHECK(plan.lines[i].text == kSentenceLines[i]);
    CHECK(plan.lines[i].width == kSentenceWidths[i]);
  }
  CHECK(static_cast<int>(plan.lines.size()) * kLineHeight <= 524);
  const auto assets = shared_renderer().render_static(kSentence, RenderSpec{});
  REQUIRE(assets.size() == 1);
  CHECK(assets[0].height == 3 * kLineHeight);
  CHECK(assets[0].width == 288);
}

TEST_CASE("400 lines split into ceil(400 / lines_per_segment) segments") {
  const std::string text = lines_text(400);
  const auto plan = shared_renderer().plan_layout(text, RenderSpec{});
  CHECK(plan.segment_count == kSegmentsFor400Lines);
  CHECK(plan.lines.size() == 400);
  CHECK(plan.reconstruct() == text);
  const auto assets = shared_renderer().render_static(text, RenderSpec{});
  REQUIRE(assets.size() == kSegmentsFor400Lines);
  for (std::size_t i = 0; i < assets.size(); ++i) {
    CHECK(assets[i].segment_index == i);
    check_budget(assets[i], RenderSpec{});
  }
  CHECK(assets.front().height == kLinesPerSegment * kLineHeight);
  CHECK(assets.back().height == (400 - 13 * kLinesPerSegment) * kLineHeight);
}

TEST_CASE("measured widths match the oracle") {
  auto width_of = [](std::string_view s) {
    return shared_renderer().plan_layout(s, RenderSpec{}).lines.at(0).width;
  };
  CHECK(width_of("Hello") == kHelloWidth);
  CHECK(width_of("Hi John") == kHiJohnWidth);
  CHECK(width_of("Hi Jhon") == kHiJohnWidth);
}

TEST_CASE("oversized tokens are hard-broken at character boundaries") {
  const std::string token(200, 'W');
  const auto plan = shared_renderer().plan_layout(token, RenderSpec{});
  CHECK(plan.lines.size() > 1);
  for (const auto& l : plan.lines) CHECK(l.width <= 299);
  CHECK(plan.reconstruct() == token);
}

TEST_CASE("lossless segmentation over random Unicode") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<std::size_t> len(0, 3000);
  RenderSpec narrow;
  narrow.target_width = 80;
  for (int i = 0; i < 200; ++i) {
    const std::string text = random_unicode(rng, len(rng));
    for (const RenderSpec& spec : {RenderSpec{}, narrow}) {
      const auto plan = shared_renderer().plan_layout(text, spec);
      REQUIRE(plan.reconstruct() == text);
      for (const auto& l : plan.lines) CHECK(l.width <= spec.target_width);
      std::size_t seg = 0;
      for (std::size_t n = 0; n < plan.lines.size(); ++n) {
        CHECK(plan.lines[n].segment_index == n / static_cast<std::size_t>(plan.lines_per_segment));
        seg = plan.lines[n].segment_index;
      }
      CHECK(plan.segment_count == seg + 1);
    }
  }
}

TEST_CASE("static output is deterministic and decodes to the declared size") {
  const auto a = shared_renderer().render_static(kSentence, RenderSpec{});
  const auto b = shared_renderer().render_static(kSentence, RenderSpec{});
  REQUIRE(a.size() == b.size());
  CHECK(a[0].payload == b[0].payload);
  CHECK(a[0].format == ImageFormat::static_raster);
  const auto px = decode_png_oracle(a[0].payload);
  CHECK(px.width == a[0].width);
  CHECK(px.height == a[0].height);
  const auto bytes = a[0].payload;
  CHECK(std::string(bytes.begin() + 1, bytes.begin() + 4) == "PNG");
}

TEST_CASE("missing glyphs are replaced and flagged") {
  REQUIRE_FALSE(bundled_font()->has_glyph(U'漢'));
  const auto assets = shared_renderer().render_static("abc 漢字 def", RenderSpec{});
  REQUIRE(assets.size() == 1);
  CHECK(assets[0].replaced_glyphs == 2);
  CHECK(shared_renderer().render_static("abc", RenderSpec{})[0].replaced_glyphs == 0);
}

TEST_CASE("render budgets hold for random input and tight specs") {
  std::mt19937 rng(11);
  RenderSpec tight;
  tight.max_file_bytes = 1500;
  tight.max_height = 200;
  tight.font_size = 20;
  for (int i = 0; i < 40; ++i) {
    const std::string text = random_unicode(rng, 1 + rng() % 4000);
    for (const RenderSpec& spec : {RenderSpec{}, tight}) {
      for (const auto& a : shared_renderer().render_static(text, spec)) check_budget(a, spec);
    }
  }
}

TEST_CASE("over-budget segments are palette-reduced and then split") {
  const std::string text = lines_text(30);
  RenderSpec spec;
  const auto full = shared_renderer().render_static(text, spec);
  REQUIRE(full.size() == 1);
  spec.max_file_bytes = full[0].byte_length - 1;
  const auto reduced = shared_renderer().render_static(text, spec);
  REQUIRE_FALSE(reduced.empty());
  for (const auto& a : reduced) check_budget(a, spec);
  spec.max_file_bytes = full[0].byte_length / 3;
  const auto split = shared_renderer().render_static(text, spec);
  CHECK(split.size() > 1);
  int total = 0;
  for (const auto& a : split) {
    check_budget(a, spec);
    total += a.height;
  }
  CHECK(total == 30 * kLineHeight);
  spec.max_file_bytes = 10;
  CHECK_THROWS_AS(shared_renderer().render_static(text, spec), Error);
}

TEST_CASE("blur animation framing") {
  for (double f : {0.0, 0.3, 1.0}) {
    const auto a = shared_renderer().render_blur_animation("Self-destructing secret", RenderSpec{}, f);
    CHECK(a.format == ImageFormat::animated);
    CHECK(a.frame_count == 10);
    const auto gif = decode_gif(a.payload);
    CHECK(gif.loop_forever);
    REQUIRE(gif.frames.size() == 10);
    int total = 0;
    for (const auto& fr : gif.frames) total += fr.delay_cs * 10;
    CHECK(total == 1000);
  }
  CHECK_THROWS_AS(shared_renderer().render_blur_animation("x", RenderSpec{}, 1.5), Error);
  CHECK_THROWS_AS(shared_renderer().render_blur_animation("x", RenderSpec{}, -0.1), Error);
}

TEST_CASE("blur endpoints against the Gaussian oracle") {
  const std::string text = "Card 4111 1111 1111 1111\nexp 04/29";
  const auto still = decode_png_oracle(shared_renderer().render_static(text, RenderSpec{})[0].payload);
  const auto zero = decode_gif(shared_renderer().render_blur_animation(text, RenderSpec{}, 0.0).payload);
  for (const auto& fr : zero.frames) CHECK(fr.pixels == still);

  const auto full = decode_gif(shared_renderer().render_blur_animation(text, RenderSpec{}, 1.0).payload);
  const auto expected = testing::gaussian_2d(testing::ink(still), still.width, still.height, 8.0);
  const double err = testing::mean_abs_diff(testing::ink(full.frames.back().pixels), expected);
  CHECK(err <= 2.0);
  CHECK(full.frames.front().pixels == still);
  CHECK(blur_sigma(9, 1.0, 8.0) == doctest::Approx(8.0));
  CHECK(blur_sigma(0, 1.0, 8.0) == 0.0);
  CHECK(blur_sigma(3, 0.5, 8.0) == doctest::Approx(3.0 / 9.0 * 0.5 * 8.0));
}

// Gaussian smoothing never increases the gradient energy, so each frame
// gets smoother as the content ages. Palette quantisation adds a little noise.
double gradient_energy(const std::vector<double>& v, int w, int h) {
  double e = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double c = v[static_cast<std::size_t>(y) * w + x];
      if (x + 1 < w) e += std::pow(v[static_cast<std::size_t>(y) * w + x + 1] - c, 2);
      if (y + 1 < h) e += std::pow(v[static_cast<std::size_t>(y + 1) * w + x] - c, 2);
    }
  }
  return e;
}

TEST_CASE("blur is monotone in fraction_elapsed") {
  const std::string text = "Monotone blur check";
  std::vector<std::vector<double>> energy(10);
  for (double f : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    const auto gif = decode_gif(shared_renderer().render_blur_animation(text, RenderSpec{}, f).payload);
    for (int k = 0; k < 10; ++k) {
      const auto& px = gif.frames[k].pixels;
      energy[k].push_back(gradient_energy(testing::ink(px), px.width, px.height));
    }
  }
  for (int k = 0; k < 10; ++k) {
    for (std::size_t i = 1; i < energy[k].size(); ++i) CHECK(energy[k][i] <= energy[k][i - 1] * 1.02);
  }
  for (double f : {0.3, 1.0}) {
    for (int k = 1; k < 10; ++k) CHECK(blur_sigma(k, f, 8.0) > blur_sigma(k - 1, f, 8.0));
  }
}

TEST_CASE("history animation of one revision repeats the static render") {
  const std::vector<std::string> revs = {"hello"};
  const auto a = shared_renderer().render_history_animation(revs, RenderSpec{});
  const auto gif = decode_gif(a.payload);
  REQUIRE(gif.frames.size() == 20);
  CHECK(gif.loop_forever);
  const auto still = decode_png_oracle(shared_renderer().render_static("hello", RenderSpec{})[0].payload);
  int total = 0;
  for (const auto& fr : gif.frames) {
    CHECK(fr.pixels == still);
    total += fr.delay_cs * 10;
  }
  CHECK(total == 2000);
  CHECK_THROWS_AS(shared_renderer().render_history_animation({}, RenderSpec{}), Error);
}

TEST_CASE("history animation strikes the old text and then shows the new") {
  const std::vector<std::string> revs = {"Hi Jhon", "Hi John"};
  const auto gif = decode_gif(shared_renderer().render_history_animation(revs, RenderSpec{}).payload);
  REQUIRE(gif.frames.size() == 20);
  const auto old_still = decode_png_oracle(shared_renderer().render_static("Hi Jhon", RenderSpec{})[0].payload);
  const auto new_still = decode_png_oracle(shared_renderer().render_static("Hi John", RenderSpec{})[0].payload);
  for (int k = 10; k < 20; ++k) CHECK(gif.frames[k].pixels == new_still);

  const RenderSpec spec;
  const int strike_y = shared_renderer().baseline_offset(spec) - static_cast<int>(std::lround(14 * 0.28));
  auto struck = [&](const testing::Pixels& p) {
    int n = 0;
    while (n < p.width && p.channel(n, strike_y, 0) == 0) ++n;
    return n;
  };
  // The strike is a solid run from x = 0 that grows by a tenth per frame.
  for (int k = 0; k < 10; ++k) {
    CHECK(struck(gif.frames[k].pixels) >= std::lround(kHiJohnWidth * (k + 1) / 10.0));
    CHECK(gif.frames[k].pixels != old_still);
  }
  CHECK(struck(gif.frames[9].pixels) >= kHiJohnWidth);
  CHECK(struck(old_still) < kHiJohnWidth);
}

TEST_CASE("notifications are fixed, deterministic and within budget") {
  CHECK(notification_text(NotificationKind::expired) == "This content has expired.");
  CHECK(notification_text(NotificationKind::deleted) == "This content was removed by the sender.");
  for (auto kind : {NotificationKind::expired, NotificationKind::deleted}) {
    const auto a = shared_renderer().render_notification(kind, RenderSpec{});
    const auto b = shared_renderer().render_notification(kind, RenderSpec{});
    CHECK(a.payload == b.payload);
    check_budget(a, RenderSpec{});
    CHECK(a.payload ==
          shared_renderer().render_static(notification_text(kind), RenderSpec{})[0].payload);
    const auto g = shared_renderer().render_notification(kind, RenderSpec{}, ImageFormat::animated);
    CHECK(decode_gif(g.payload).frames.size() == 10);
  }
  CHECK(shared_renderer().render_notification(NotificationKind::expired, RenderSpec{}).payload !=
        shared_renderer().render_notification(NotificationKind::deleted, RenderSpec{}).payload);
}

namespace {

int bar_length(const testing::Pixels& p, int index) {
  const int lh = kLineHeight;
  const int bar = std::max(2, static_cast<int>(std::lround(lh * 0.6)));
  const int gap = std::max(1, static_cast<int>(std::lround(lh * 0.4)));
  const int y = index * (lh + bar + gap) + lh + bar / 2;
  int n = 0;
  while (n < p.width && p.channel(n, y, 0) == 0) ++n;
  return n;
}

}  // namespace

TEST_CASE("bar chart lengths are proportional") {
  const RenderSpec spec;
  {
    const std::vector<double> v = {10};
    const std::vector<std::string> l = {"Mon"};
    const auto a = shared_renderer().render_bar_chart(v, l, spec);
    check_budget(a, spec);
    CHECK(bar_length(decode_png_oracle(a.payload), 0) == std::lround(0.9 * 299));
  }
  {
    const std::vector<double> v = {5, 10};
    const std::vector<std::string> l = {"a", "b"};
    const auto px = decode_png_oracle(shared_renderer().render_bar_chart(v, l, spec).payload);
    const int a = bar_length(px, 0);
    const int b = bar_length(px, 1);
    CHECK(std::abs(2 * a - b) <= 2);
    CHECK(b == std::lround(0.9 * 299));
  }
  {
    const std::vector<double> v = {0, 0};
    const std::vector<std::string> l = {"x", "y"};
    const auto a = shared_renderer().render_bar_chart(v, l, spec);
    check_budget(a, spec);
    const auto px = decode_png_oracle(a.payload);
    CHECK(bar_length(px, 0) == 0);
    CHECK(bar_length(px, 1) == 0);
  }
  const std::vector<double> neg = {-1};
  const std::vector<std::string> one = {"n"};
  CHECK_THROWS_AS(shared_renderer().render_bar_chart(neg, one, spec), Error);
  const std::vector<double> two = {1, 2};
  CHECK_THROWS_AS(shared_renderer().render_bar_chart(two, one, spec), Error);
}

TEST_CASE("png and gif placeholders are 1x1") {
  const auto png = decode_png_oracle(transparent_png());
  CHECK(png.width == 1);
  CHECK(png.height == 1);
  CHECK(png.channel(0, 0, 3) == 0);
  const auto gif = decode_gif(transparent_gif());
  CHECK(gif.width == 1);
  CHECK(gif.height == 1);
}
