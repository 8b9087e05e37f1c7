// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "latebind/common/error.hpp"

namespace latebind::service {

/// Management API response: HTTP status plus JSON body.
struct ApiResult {
  int status = 200;
  nlohmann::json body = nlohmann::json::object();
};

int http_status(ErrorCode code) noexcept;

/// {"error": "<code>", "message": "...", "reason": "..."}; reason is omitted when empty.
ApiResult error_result(ErrorCode code, std::string_view message, std::string_view reason = {});
ApiResult error_result(const Error& e);

/// Reason attached to a 403 when a recipient has opened continuous-edit content.
inline constexpr std::string_view kRecipientOpened = "recipient-opened";

/// Parses a request body; throws Error(invalid_argument) unless it is a JSON object.
nlohmann::json parse_body(std::string_view body);

/// Token from "Authorization: Bearer <t>" or else from the lb_token cookie.
std::optional<std::string> extract_token(std::string_view authorization, std::string_view cookie);

}  // namespace latebind::service
