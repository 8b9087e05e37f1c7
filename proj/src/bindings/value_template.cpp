// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/bindings/value_template.hpp"

#include "latebind/common/error.hpp"

namespace latebind::bindings {
namespace {

constexpr std::string_view kPlaceholder = "{value}";

std::string expand(std::string_view tmpl, std::string_view value) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const char c = tmpl[i];
    if (c == '{') {
      if (tmpl.substr(i, 2) == "{{") {
        out += '{';
        i += 2;
      } else if (tmpl.substr(i, kPlaceholder.size()) == kPlaceholder) {
        out += value;
        i += kPlaceholder.size();
      } else {
        throw Error(ErrorCode::invalid_argument,
                    "template has an unknown placeholder at offset " + std::to_string(i));
      }
    } else if (c == '}') {
      if (tmpl.substr(i, 2) != "}}") {
        throw Error(ErrorCode::invalid_argument,
                    "template has an unmatched '}' at offset " + std::to_string(i));
      }
      out += '}';
      i += 2;
    } else {
      out += c;
      ++i;
    }
  }
  return out;
}

}  // namespace

void validate_template(std::string_view tmpl) { expand(tmpl, ""); }

std::string apply_template(std::string_view tmpl, std::string_view value) {
  return expand(tmpl, value);
}

std::string format_value(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace latebind::bindings
