// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/scrub/scrubber.hpp"

#include <algorithm>
#include <regex>

#include "latebind/common/error.hpp"
#include "latebind/common/utf8.hpp"

namespace latebind::scrub {
namespace {

struct Candidate {
  std::size_t begin;  // bytes
  std::size_t end;
  Category category;
};

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alnum(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Card numbers: maximal runs of digit groups joined by single spaces or
// dashes. Any span of whole consecutive groups holding 13-19 digits that
// passes Luhn is a candidate.
void find_cards(std::string_view text, std::vector<Candidate>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_digit(text[i]) || (i > 0 && is_alnum(text[i - 1]))) {
      ++i;
      continue;
    }
    struct Group {
      std::size_t begin, end;
    };
    std::vector<Group> groups;
    std::size_t j = i;
    for (;;) {
      const std::size_t g = j;
      while (j < text.size() && is_digit(text[j])) ++j;
      groups.push_back({g, j});
      if (j + 1 < text.size() && (text[j] == ' ' || text[j] == '-') && is_digit(text[j + 1])) {
        ++j;
        continue;
      }
      break;
    }
    const bool clean_tail = j >= text.size() || !is_alnum(text[j]);
    if (clean_tail) {
      for (std::size_t a = 0; a < groups.size(); ++a) {
        std::size_t digits = 0;
        for (std::size_t b = a; b < groups.size(); ++b) {
          digits += groups[b].end - groups[b].begin;
          if (digits > 19) break;
          if (digits >= 13 &&
              luhn_valid(text.substr(groups[a].begin, groups[b].end - groups[a].begin))) {
            out.push_back({groups[a].begin, groups[b].end, Category::credit_card});
          }
        }
      }
    }
    i = j;
  }
}

bool digit_bounded(std::string_view text, std::size_t begin, std::size_t end) {
  if (begin > 0 && (is_alnum(text[begin - 1]) ||
                    (begin > 1 && text[begin - 1] == '-' && is_digit(text[begin - 2])))) {
    return false;
  }
  if (end < text.size() && (is_alnum(text[end]) ||
                            (end + 1 < text.size() && text[end] == '-' && is_digit(text[end + 1])))) {
    return false;
  }
  return true;
}

void find_ssn(std::string_view text, std::vector<Candidate>& out) {
  static const std::regex re(R"((\d{3})-(\d{2})-(\d{4}))");
  for (auto it = std::cregex_iterator(text.data(), text.data() + text.size(), re);
       it != std::cregex_iterator(); ++it) {
    const auto& m = *it;
    const auto begin = static_cast<std::size_t>(m.position(0));
    const auto end = begin + static_cast<std::size_t>(m.length(0));
    if (!digit_bounded(text, begin, end)) continue;
    const std::string area = m.str(1);
    if (area == "000" || area == "666" || area[0] == '9') continue;
    if (m.str(2) == "00" || m.str(3) == "0000") continue;
    out.push_back({begin, end, Category::ssn});
  }
}

void find_regex(std::string_view text, const std::regex& re, Category category, bool bounded,
                std::vector<Candidate>& out) {
  for (auto it = std::cregex_iterator(text.data(), text.data() + text.size(), re);
       it != std::cregex_iterator(); ++it) {
    const auto begin = static_cast<std::size_t>(it->position(0));
    const auto end = begin + static_cast<std::size_t>(it->length(0));
    if (end == begin) continue;
    if (bounded && !digit_bounded(text, begin, end)) continue;
    out.push_back({begin, end, category});
  }
}

void find_emails(std::string_view text, std::vector<Candidate>& out) {
  static const std::regex re(
      R"([A-Za-z0-9_%+-]+(?:\.[A-Za-z0-9_%+-]+)*@[A-Za-z0-9](?:[A-Za-z0-9-]*[A-Za-z0-9])?(?:\.[A-Za-z0-9](?:[A-Za-z0-9-]*[A-Za-z0-9])?)*\.[A-Za-z]{2,})");
  find_regex(text, re, Category::email_address, false, out);
}

// North American numbers with optional +1 and area-code parentheses, plus
// +CC followed by 2-4 digit groups.
void find_phones(std::string_view text, std::vector<Candidate>& out) {
  static const std::regex nanp(R"((?:\+1[ .-]?)?(?:\(\d{3}\) ?|\d{3}[ .-])\d{3}[ .-]\d{4})");
  static const std::regex intl(R"(\+\d{1,3}(?:[ .-]\d{2,4}){2,4})");
  find_regex(text, nanp, Category::phone, true, out);
  find_regex(text, intl, Category::phone, true, out);
}

}  // namespace

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::credit_card: return "credit-card";
    case Category::ssn: return "ssn";
    case Category::email_address: return "email-address";
    case Category::phone: return "phone";
    case Category::custom_regex: return "custom-regex";
  }
  return "custom-regex";
}

std::optional<Category> parse_category(std::string_view text) noexcept {
  for (auto c : {Category::credit_card, Category::ssn, Category::email_address, Category::phone,
                 Category::custom_regex}) {
    if (to_string(c) == text) return c;
  }
  return std::nullopt;
}

const std::set<Category>& builtin_categories() {
  static const std::set<Category> all{Category::credit_card, Category::ssn,
                                      Category::email_address, Category::phone};
  return all;
}

bool luhn_valid(std::string_view number) noexcept {
  int sum = 0;
  int count = 0;
  for (auto it = number.rbegin(); it != number.rend(); ++it) {
    if (!is_digit(*it)) continue;
    int d = *it - '0';
    if (count % 2 == 1) {
      d *= 2;
      if (d > 9) d -= 9;
    }
    sum += d;
    ++count;
  }
  return count > 0 && sum % 10 == 0;
}

std::vector<SensitiveSpan> detect(std::string_view text, const std::set<Category>& categories,
                                  std::span<const std::string> custom_patterns) {
  std::vector<Candidate> found;
  if (categories.count(Category::credit_card)) find_cards(text, found);
  if (categories.count(Category::ssn)) find_ssn(text, found);
  if (categories.count(Category::email_address)) find_emails(text, found);
  if (categories.count(Category::phone)) find_phones(text, found);
  if (categories.count(Category::custom_regex)) {
    for (const auto& pattern : custom_patterns) {
      std::regex re;
      try {
        re = std::regex(pattern, std::regex::ECMAScript);
      } catch (const std::regex_error& e) {
        throw Error(ErrorCode::invalid_argument, "bad pattern '" + pattern + "': " + e.what());
      }
      find_regex(text, re, Category::custom_regex, false, found);
    }
  }

  // Code-point index of every byte offset.
  std::vector<std::size_t> cp_at(text.size() + 1, 0);
  std::size_t cp = 0;
  for (const auto& c : utf8::decode(text)) {
    for (std::size_t k = 0; k < c.length; ++k) cp_at[c.offset + k] = cp;
    ++cp;
  }
  cp_at[text.size()] = cp;

  std::stable_sort(found.begin(), found.end(), [&](const Candidate& a, const Candidate& b) {
    const std::size_t la = cp_at[a.end] - cp_at[a.begin];
    const std::size_t lb = cp_at[b.end] - cp_at[b.begin];
    if (la != lb) return la > lb;
    return a.begin < b.begin;
  });
  std::vector<Candidate> chosen;
  for (const auto& c : found) {
    const bool overlaps = std::any_of(chosen.begin(), chosen.end(), [&](const Candidate& o) {
      return c.begin < o.end && o.begin < c.end;
    });
    if (!overlaps) chosen.push_back(c);
  }
  std::sort(chosen.begin(), chosen.end(),
            [](const Candidate& a, const Candidate& b) { return a.begin < b.begin; });

  std::vector<SensitiveSpan> spans;
  spans.reserve(chosen.size());
  for (const auto& c : chosen) {
    spans.push_back({cp_at[c.begin], cp_at[c.end], c.category,
                     std::string(text.substr(c.begin, c.end - c.begin))});
  }
  return spans;
}

std::string redact_preview(std::string_view text, std::span<const SensitiveSpan> spans) {
  const auto cps = utf8::decode(text);
  auto byte_at = [&](std::size_t index) {
    if (index > cps.size()) throw Error(ErrorCode::invalid_argument, "span beyond end of text");
    return index == cps.size() ? text.size() : cps[index].offset;
  };
  std::string out;
  std::size_t cursor = 0;
  std::size_t last_end = 0;
  for (const auto& s : spans) {
    if (s.start >= s.end || s.start < last_end) {
      throw Error(ErrorCode::invalid_argument, "spans must be sorted, disjoint and non-empty");
    }
    const std::size_t b = byte_at(s.start);
    const std::size_t e = byte_at(s.end);
    out.append(text.substr(cursor, b - cursor));
    out += "⟨";
    out += to_string(s.category);
    out += "⟩";
    cursor = e;
    last_end = s.end;
  }
  out.append(text.substr(cursor));
  return out;
}

}  // namespace latebind::scrub
