// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/bindings/json_path.hpp"

#include <charconv>

#include "latebind/common/error.hpp"

namespace latebind::bindings {
namespace {

[[noreturn]] void syntax(std::string_view text, std::size_t pos, const std::string& what) {
  throw Error(ErrorCode::invalid_argument, "bad path '" + std::string(text) + "' at column " +
                                               std::to_string(pos + 1) + ": " + what);
}

bool key_char(char c) { return c != '.' && c != '[' && c != ']' && c != '"' && c != '$'; }

}  // namespace

JsonPath JsonPath::parse(std::string_view text) {
  JsonPath path;
  if (text.empty()) syntax(text, 0, "empty path");
  std::size_t i = 0;
  if (i < text.size() && text[i] == '$') ++i;
  bool need_step = false;  // after '.'
  bool first = true;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '[') {
      ++i;
      Step step;
      if (i < text.size() && text[i] == '"') {
        ++i;
        std::string key;
        while (i < text.size() && text[i] != '"') {
          if (text[i] == '\\' && i + 1 < text.size()) ++i;
          key += text[i++];
        }
        if (i >= text.size()) syntax(text, i, "unterminated string");
        ++i;
        step.key = std::move(key);
      } else {
        const std::size_t start = i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
        if (i == start) syntax(text, i, "expected index");
        std::from_chars(text.data() + start, text.data() + i, step.index);
        step.is_index = true;
      }
      if (i >= text.size() || text[i] != ']') syntax(text, i, "expected ']'");
      ++i;
      path.steps_.push_back(std::move(step));
      need_step = false;
    } else if (c == '.') {
      if (first && text[0] == '$') {
        ++i;
        need_step = true;
        first = false;
        continue;
      }
      if (path.steps_.empty() || need_step) syntax(text, i, "unexpected '.'");
      ++i;
      need_step = true;
    } else {
      if (!path.steps_.empty() && !need_step) syntax(text, i, "expected '.' or '['");
      const std::size_t start = i;
      while (i < text.size() && key_char(text[i])) ++i;
      if (i == start) syntax(text, i, "unexpected character");
      Step step;
      step.key = std::string(text.substr(start, i - start));
      path.steps_.push_back(std::move(step));
      need_step = false;
    }
    first = false;
  }
  if (need_step) syntax(text, i, "path ends with '.'");
  return path;
}

const nlohmann::json* JsonPath::find(const nlohmann::json& doc) const {
  const nlohmann::json* cur = &doc;
  for (const auto& s : steps_) {
    if (s.is_index) {
      if (!cur->is_array() || s.index >= cur->size()) return nullptr;
      cur = &(*cur)[s.index];
    } else {
      if (!cur->is_object()) return nullptr;
      auto it = cur->find(s.key);
      if (it == cur->end()) return nullptr;
      cur = &*it;
    }
  }
  return cur;
}

const nlohmann::json& JsonPath::extract(const nlohmann::json& doc) const {
  const nlohmann::json* cur = &doc;
  JsonPath prefix;
  for (const auto& s : steps_) {
    prefix.steps_.push_back(s);
    const nlohmann::json* next = nullptr;
    if (s.is_index) {
      if (cur->is_array() && s.index < cur->size()) next = &(*cur)[s.index];
    } else if (cur->is_object()) {
      auto it = cur->find(s.key);
      if (it != cur->end()) next = &*it;
    }
    if (next == nullptr) {
      throw Error(ErrorCode::extract, "path " + prefix.to_string() + " not found");
    }
    cur = next;
  }
  return *cur;
}

std::string JsonPath::to_string() const {
  std::string out;
  for (const auto& s : steps_) {
    if (s.is_index) {
      out += "[" + std::to_string(s.index) + "]";
    } else if (s.key.empty() || s.key.find_first_of(".[]\"") != std::string::npos) {
      out += "[" + nlohmann::json(s.key).dump() + "]";
    } else {
      if (!out.empty()) out += '.';
      out += s.key;
    }
  }
  return out.empty() ? "$" : out;
}

}  // namespace latebind::bindings
