// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace latebind::scrub {

enum class Category { credit_card, ssn, email_address, phone, custom_regex };

std::string_view to_string(Category c) noexcept;
std::optional<Category> parse_category(std::string_view text) noexcept;

/// The four built-in categories.
const std::set<Category>& builtin_categories();

/// [start, end) in code points.
struct SensitiveSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  Category category = Category::custom_regex;
  std::string matched_text;

  friend bool operator==(const SensitiveSpan&, const SensitiveSpan&) = default;
};

/// Luhn checksum over the digits of `number`; other characters are skipped.
/// False when there are no digits.
bool luhn_valid(std::string_view number) noexcept;

/// Candidates from every requested category (plus one custom_regex pass per
/// pattern when custom_regex is requested) are resolved longest first, then
/// leftmost, into a sorted, non-overlapping list. Invalid patterns throw
/// Error(invalid_argument).
std::vector<SensitiveSpan> detect(std::string_view text,
                                  const std::set<Category>& categories = builtin_categories(),
                                  std::span<const std::string> custom_patterns = {});

/// Replaces each span with "⟨category⟩". Spans must be sorted and disjoint.
std::string redact_preview(std::string_view text, std::span<const SensitiveSpan> spans);

}  // namespace latebind::scrub
