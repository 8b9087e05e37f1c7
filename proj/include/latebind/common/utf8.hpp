// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace latebind::utf8 {

inline constexpr char32_t kReplacement = U'�';

/// One decoded scalar value and the byte range it came from. Malformed input
/// yields U+FFFD for each offending byte so that ranges still tile the input.
struct CodePoint {
  char32_t value;
  std::size_t offset;
  std::size_t length;
};

std::vector<CodePoint> decode(std::string_view text);
std::u32string to_u32(std::string_view text);
std::string encode(char32_t cp);
std::string encode(std::u32string_view text);

}  // namespace latebind::utf8
