// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "latebind/common/clock.hpp"

namespace latebind::bindings {

inline constexpr std::string_view kUserAgent = "latebind-refresher/1.0";

struct FetchResponse {
  int status = 0;
  std::string content_type;
  std::string body;
};

class HttpFetcher {
 public:
  virtual ~HttpFetcher() = default;
  /// Throws Error(network) when the host is unreachable or the status is not 2xx.
  virtual FetchResponse get(const std::string& url) = 0;
};

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string target;  // path and query, at least "/"
};

/// Throws Error(invalid_argument) for anything but absolute http(s) URLs.
Url parse_url(std::string_view url);

class HttplibFetcher final : public HttpFetcher {
 public:
  explicit HttplibFetcher(Duration timeout = Duration{10'000},
                          std::string user_agent = std::string(kUserAgent));
  FetchResponse get(const std::string& url) override;

 private:
  Duration timeout_;
  std::string user_agent_;
};

}  // namespace latebind::bindings
