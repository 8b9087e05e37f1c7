// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/service/api_json.hpp"

namespace latebind::service {

int http_status(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return 400;
    case ErrorCode::unauthorized: return 401;
    case ErrorCode::forbidden: return 403;
    case ErrorCode::not_found: return 404;
    case ErrorCode::conflict: return 409;
    case ErrorCode::content_expired: return 410;
    case ErrorCode::network:
    case ErrorCode::extract: return 502;
    case ErrorCode::io:
    case ErrorCode::internal: return 500;
  }
  return 500;
}

ApiResult error_result(ErrorCode code, std::string_view message, std::string_view reason) {
  ApiResult r;
  r.status = http_status(code);
  r.body = {{"error", std::string(to_string(code))}, {"message", std::string(message)}};
  if (!reason.empty()) r.body["reason"] = std::string(reason);
  return r;
}

ApiResult error_result(const Error& e) {
  std::string_view reason;
  if (e.code() == ErrorCode::forbidden && std::string_view(e.what()) == kRecipientOpened) {
    reason = kRecipientOpened;
  }
  return error_result(e.code(), e.what(), reason);
}

nlohmann::json parse_body(std::string_view body) {
  auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::invalid_argument, "request body is not valid JSON");
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "request body must be a JSON object");
  return j;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::optional<std::string> extract_token(std::string_view authorization, std::string_view cookie) {
  authorization = trim(authorization);
  if (authorization.size() > 7) {
    std::string scheme(authorization.substr(0, 7));
    for (auto& c : scheme) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (scheme == "bearer ") {
      const auto t = trim(authorization.substr(7));
      if (!t.empty()) return std::string(t);
    }
  }
  while (!cookie.empty()) {
    const auto semi = cookie.find(';');
    const auto pair = trim(cookie.substr(0, semi));
    if (pair.rfind("lb_token=", 0) == 0 && pair.size() > 9) return std::string(pair.substr(9));
    if (semi == std::string_view::npos) break;
    cookie.remove_prefix(semi + 1);
  }
  return std::nullopt;
}

}  // namespace latebind::service
