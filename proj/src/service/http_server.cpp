// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/service/http_server.hpp"

#include "httplib.h"

namespace latebind::service {

namespace {

constexpr const char* kJson = "application/json";

std::optional<std::string> token_of(const httplib::Request& req) {
  return extract_token(req.get_header_value("Authorization"), req.get_header_value("Cookie"));
}

void send(httplib::Response& res, const ApiResult& r) {
  res.status = r.status;
  res.set_header("Cache-Control", std::string(kCacheControl));
  res.set_content(r.body.dump(), kJson);
}

template <class F>
void with_body(const httplib::Request& req, httplib::Response& res, F&& f) {
  try {
    send(res, f(parse_body(req.body)));
  } catch (const Error& e) {
    send(res, error_result(e));
  }
}

}  // namespace

HttpServer::HttpServer(LateBindService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::install_routes() {
  auto& s = *server_;
  s.Get(R"(/i/([A-Za-z0-9]+)/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
    const auto r = service_.get_image(req.matches[1], std::string(req.matches[2]), token_of(req));
    res.status = r.status;
    res.set_header("Cache-Control", std::string(kCacheControl));
    res.set_header("Pragma", "no-cache");
    res.set_header("Expires", "0");
    res.set_content(reinterpret_cast<const char*>(r.body.data()), r.body.size(), r.content_type);
  });
  s.Post("/api/contents", [this](const httplib::Request& req, httplib::Response& res) {
    with_body(req, res, [&](const nlohmann::json& body) { return service_.create_content(body); });
  });
  s.Get(R"(/api/contents/([A-Za-z0-9]+))", [this](const httplib::Request& req, httplib::Response& res) {
    send(res, service_.get_content(req.matches[1], token_of(req)));
  });
  s.Patch(R"(/api/contents/([A-Za-z0-9]+))",
          [this](const httplib::Request& req, httplib::Response& res) {
            with_body(req, res, [&](const nlohmann::json& body) {
              return service_.patch_content(req.matches[1], token_of(req), body);
            });
          });
  s.Delete(R"(/api/contents/([A-Za-z0-9]+))",
           [this](const httplib::Request& req, httplib::Response& res) {
             send(res, service_.delete_content(req.matches[1], token_of(req)));
           });
  s.Post("/api/bindings", [this](const httplib::Request& req, httplib::Response& res) {
    with_body(req, res, [&](const nlohmann::json& body) {
      return service_.create_binding(body, token_of(req));
    });
  });
  s.Post("/api/scrub", [this](const httplib::Request& req, httplib::Response& res) {
    with_body(req, res, [&](const nlohmann::json& body) { return service_.scrub(body); });
  });
  s.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", kJson);
  });
  if (service_.config().ui_dir) {
    s.set_mount_point("/ui", service_.config().ui_dir->string());
  }
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send(res, error_result(res.status == 404 ? ErrorCode::not_found : ErrorCode::invalid_argument,
                             httplib::status_message(res.status)));
    }
  });
  s.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        send(res, error_result(ErrorCode::internal, what));
      });
}

bool HttpServer::bind(const std::string& host, int port) { return server_->bind_to_port(host, port); }

int HttpServer::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool HttpServer::listen() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

void HttpServer::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace latebind::service
