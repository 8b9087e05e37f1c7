// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/bindings/fetcher.hpp"

#include <charconv>

#include "httplib.h"
#include "latebind/common/error.hpp"

namespace latebind::bindings {

Url parse_url(std::string_view text) {
  Url url;
  const auto scheme_end = text.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "url must be absolute: " + std::string(text));
  }
  url.scheme = std::string(text.substr(0, scheme_end));
  if (url.scheme != "http" && url.scheme != "https") {
    throw Error(ErrorCode::invalid_argument, "unsupported url scheme '" + url.scheme + "'");
  }
  std::string_view rest = text.substr(scheme_end + 3);
  const auto slash = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, slash);
  url.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  if (url.target[0] != '/') url.target = "/" + url.target;
  if (const auto hash = url.target.find('#'); hash != std::string::npos) url.target.resize(hash);
  if (authority.find('@') != std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "credentials in urls are not supported");
  }
  url.port = url.scheme == "https" ? 443 : 80;
  std::string_view host = authority;
  if (!authority.empty() && authority[0] == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) throw Error(ErrorCode::invalid_argument, "bad IPv6 host");
    host = authority.substr(1, close - 1);
    authority = authority.substr(close + 1);
    if (!authority.empty() && authority[0] != ':') {
      throw Error(ErrorCode::invalid_argument, "bad authority in url");
    }
  } else if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    authority = authority.substr(colon);
  } else {
    authority = {};
  }
  if (!authority.empty()) {
    const std::string_view port = authority.substr(1);
    int p = 0;
    auto res = std::from_chars(port.data(), port.data() + port.size(), p);
    if (port.empty() || res.ec != std::errc{} || res.ptr != port.data() + port.size() || p <= 0 ||
        p > 65535) {
      throw Error(ErrorCode::invalid_argument, "bad port in url");
    }
    url.port = p;
  }
  if (host.empty()) throw Error(ErrorCode::invalid_argument, "url has no host");
  url.host = std::string(host);
  return url;
}

HttplibFetcher::HttplibFetcher(Duration timeout, std::string user_agent)
    : timeout_(timeout), user_agent_(std::move(user_agent)) {}

FetchResponse HttplibFetcher::get(const std::string& text) {
  const Url url = parse_url(text);
  const std::string origin = url.scheme + "://" +
                             (url.host.find(':') != std::string::npos ? "[" + url.host + "]" : url.host) +
                             ":" + std::to_string(url.port);
  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);
  auto res = client.Get(url.target, httplib::Headers{{"User-Agent", user_agent_}});
  if (!res) {
    throw Error(ErrorCode::network, "GET " + text + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::network, "GET " + text + " returned HTTP " + std::to_string(res->status));
  }
  return FetchResponse{res->status, res->get_header_value("Content-Type"), res->body};
}

}  // namespace latebind::bindings
