// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

namespace latebind::cli {

struct Reply {
  int status = 0;
  nlohmann::json body;  // null when the body is not JSON
};

/// JSON client for the management API.
class ApiClient {
 public:
  /// base_url: scheme://host[:port]. Throws Error(invalid_argument).
  explicit ApiClient(std::string base_url);

  Reply get(const std::string& path, const std::optional<std::string>& token = std::nullopt) const;
  Reply post(const std::string& path, const nlohmann::json& body,
             const std::optional<std::string>& token = std::nullopt) const;
  Reply patch(const std::string& path, const nlohmann::json& body,
              const std::optional<std::string>& token = std::nullopt) const;
  Reply del(const std::string& path, const std::optional<std::string>& token = std::nullopt) const;

  const std::string& base_url() const noexcept { return base_url_; }

 private:
  Reply send(std::string_view method, const std::string& path, const nlohmann::json* body,
             const std::optional<std::string>& token) const;

  std::string base_url_;
  std::string origin_;
  std::string prefix_;
};

}  // namespace latebind::cli
