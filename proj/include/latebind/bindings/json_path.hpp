// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace latebind::bindings {

/// Dotted/indexed path over a JSON document:
///
///   path  := [ "$" ] [ step ( "." key | "[" index "]" | "[" quoted "]" )* ]
///   step  := key | "[" index "]"
///
/// e.g. `report.kwh[0]`, `["odd.key"].value`, `[2]`. The empty path is the root.
class JsonPath {
 public:
  struct Step {
    bool is_index = false;
    std::string key;
    std::size_t index = 0;

    friend bool operator==(const Step&, const Step&) = default;
  };

  /// Throws Error(invalid_argument) with the offending column.
  static JsonPath parse(std::string_view text);

  const std::vector<Step>& steps() const noexcept { return steps_; }

  /// nullptr when a step does not resolve.
  const nlohmann::json* find(const nlohmann::json& doc) const;
  /// Throws Error(extract) naming the first step that failed.
  const nlohmann::json& extract(const nlohmann::json& doc) const;

  std::string to_string() const;

 private:
  std::vector<Step> steps_;
};

}  // namespace latebind::bindings
