// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "json.hpp"

namespace latebind::bindings {

/// Checks that `{value}` is the only placeholder and braces are balanced
/// ("{{" and "}}" are literal braces). Throws Error(invalid_argument).
void validate_template(std::string_view tmpl);

std::string apply_template(std::string_view tmpl, std::string_view value);

/// Strings verbatim, numbers in shortest round-trip form, everything else as
/// compact JSON.
std::string format_value(const nlohmann::json& value);

}  // namespace latebind::bindings
