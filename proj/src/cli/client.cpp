// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/cli/client.hpp"

#include "httplib.h"
#include "latebind/bindings/fetcher.hpp"
#include "latebind/common/error.hpp"

namespace latebind::cli {

ApiClient::ApiClient(std::string base_url) : base_url_(std::move(base_url)) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  const bindings::Url url = bindings::parse_url(base_url_);
  const std::string host = url.host.find(':') != std::string::npos ? "[" + url.host + "]" : url.host;
  origin_ = url.scheme + "://" + host + ":" + std::to_string(url.port);
  prefix_ = url.target == "/" ? "" : url.target;
}

Reply ApiClient::send(std::string_view method, const std::string& path, const nlohmann::json* body,
                      const std::optional<std::string>& token) const {
  httplib::Client client(origin_);
  client.set_connection_timeout(10, 0);
  client.set_read_timeout(60, 0);
  httplib::Headers headers;
  if (token) headers.emplace("Authorization", "Bearer " + *token);
  const std::string target = prefix_ + path;
  const std::string payload = body ? body->dump() : std::string();
  httplib::Result res = [&] {
    if (method == "GET") return client.Get(target, headers);
    if (method == "POST") return client.Post(target, headers, payload, "application/json");
    if (method == "PATCH") return client.Patch(target, headers, payload, "application/json");
    return client.Delete(target, headers);
  }();
  if (!res) {
    throw Error(ErrorCode::network,
                "cannot reach " + base_url_ + ": " + httplib::to_string(res.error()));
  }
  Reply reply;
  reply.status = res->status;
  reply.body = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.body.is_discarded()) reply.body = nullptr;
  return reply;
}

Reply ApiClient::get(const std::string& path, const std::optional<std::string>& token) const {
  return send("GET", path, nullptr, token);
}

Reply ApiClient::post(const std::string& path, const nlohmann::json& body,
                      const std::optional<std::string>& token) const {
  return send("POST", path, &body, token);
}

Reply ApiClient::patch(const std::string& path, const nlohmann::json& body,
                       const std::optional<std::string>& token) const {
  return send("PATCH", path, &body, token);
}

Reply ApiClient::del(const std::string& path, const std::optional<std::string>& token) const {
  return send("DELETE", path, nullptr, token);
}

}  // namespace latebind::cli
