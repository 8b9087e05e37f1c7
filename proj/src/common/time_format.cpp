// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/common/time_format.hpp"

#include <charconv>
#include <cstdio>

namespace latebind {
namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto res = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return res.ec == std::errc{};
}

}  // namespace

std::string format_iso8601(TimePoint t) {
  using namespace std::chrono;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const auto tod = t - day;
  const auto h = duration_cast<hours>(tod);
  const auto m = duration_cast<minutes>(tod - h);
  const auto s = duration_cast<seconds>(tod - h - m);
  const auto ms = (tod - h - m - s).count();
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(h.count()),
                static_cast<int>(m.count()), static_cast<int>(s.count()),
                static_cast<int>(ms));
  return buf;
}

std::optional<TimePoint> parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  int y, mo, d, h, mi, s;
  if (text.size() < 20 || !read_int(text, 0, 4, y) || text[4] != '-' ||
      !read_int(text, 5, 2, mo) || text[7] != '-' || !read_int(text, 8, 2, d) ||
      (text[10] != 'T' && text[10] != 't' && text[10] != ' ') ||
      !read_int(text, 11, 2, h) || text[13] != ':' || !read_int(text, 14, 2, mi) ||
      text[16] != ':' || !read_int(text, 17, 2, s)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int scale = 100;
    std::size_t digits = 0;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      millis += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
      ++digits;
    }
    if (digits == 0) return std::nullopt;
  }
  int offset_min = 0;
  if (pos < text.size() && (text[pos] == 'Z' || text[pos] == 'z')) {
    ++pos;
  } else if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    int oh, om;
    if (!read_int(text, pos + 1, 2, oh) || pos + 3 >= text.size() || text[pos + 3] != ':' ||
        !read_int(text, pos + 4, 2, om)) {
      return std::nullopt;
    }
    offset_min = (oh * 60 + om) * (text[pos] == '-' ? -1 : 1);
    pos += 6;
  } else {
    return std::nullopt;
  }
  if (pos != text.size()) return std::nullopt;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const auto t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} +
                 milliseconds{millis} - minutes{offset_min};
  return time_point_cast<Duration>(t);
}

std::optional<Duration> parse_duration(std::string_view text) {
  if (text.empty()) return std::nullopt;
  long long total = 0;
  std::size_t pos = 0;
  bool any = false;
  while (pos < text.size()) {
    long long value = 0;
    auto res = std::from_chars(text.data() + pos, text.data() + text.size(), value);
    if (res.ec != std::errc{} || value < 0) return std::nullopt;
    pos = static_cast<std::size_t>(res.ptr - text.data());
    std::string_view rest = text.substr(pos);
    long long unit = 0;
    if (rest.starts_with("ms")) {
      unit = 1, pos += 2;
    } else if (rest.starts_with("s")) {
      unit = 1000, pos += 1;
    } else if (rest.starts_with("m")) {
      unit = 60'000, pos += 1;
    } else if (rest.starts_with("h")) {
      unit = 3'600'000, pos += 1;
    } else if (rest.starts_with("d")) {
      unit = 86'400'000, pos += 1;
    } else if (rest.empty() && !any) {
      unit = 1;
    } else {
      return std::nullopt;
    }
    total += value * unit;
    any = true;
  }
  return Duration{total};
}

std::string format_duration(Duration d) {
  const long long ms = d.count();
  struct Unit {
    long long size;
    const char* suffix;
  };
  static constexpr Unit kUnits[] = {
      {86'400'000, "d"}, {3'600'000, "h"}, {60'000, "m"}, {1000, "s"}, {1, "ms"}};
  if (ms == 0) return "0ms";
  for (const auto& u : kUnits) {
    if (ms % u.size == 0) return std::to_string(ms / u.size) + u.suffix;
  }
  return std::to_string(ms) + "ms";
}

}  // namespace latebind
