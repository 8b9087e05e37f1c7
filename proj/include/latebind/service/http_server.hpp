// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "latebind/service/service.hpp"

namespace httplib {
class Server;
}

namespace latebind::service {

/// Routes:
///   GET    /i/{id}/{segment}.{png|gif}
///   POST   /api/contents
///   GET    /api/contents/{id}
///   PATCH  /api/contents/{id}
///   DELETE /api/contents/{id}
///   POST   /api/bindings
///   POST   /api/scrub
///   GET    /healthz
///   GET    /ui/...            (when ServiceConfig::ui_dir is set)
class HttpServer {
 public:
  explicit HttpServer(LateBindService& service);
  ~HttpServer();

  /// Returns false if the address cannot be bound.
  bool bind(const std::string& host, int port);
  /// Binds an ephemeral port and returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Blocks until stop().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  void install_routes();

  LateBindService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace latebind::service
