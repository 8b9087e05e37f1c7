// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "latebind/bindings/fetcher.hpp"
#include "latebind/render/font.hpp"
#include "latebind/render/renderer.hpp"

namespace httplib {
class Server;
}

namespace latebind::testing {

/// Directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

std::shared_ptr<const render::Font> bundled_font();
const render::Renderer& shared_renderer();

/// Independent Luhn check over a digit string.
bool luhn_oracle(const std::string& digits);
/// Appends the Luhn check digit to `body`.
std::string luhn_complete(const std::string& body);

struct ImgTag {
  std::string src;
  int width = -1;
  int height = -1;
  std::optional<std::string> alt;
};
/// Parses the <img> tags of a snippet in document order.
std::vector<ImgTag> parse_img_tags(const std::string& html);

/// Splits an absolute http URL into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url);

/// In-process HTTP source for binding tests. Serves `body` at /data.json
/// and raw bytes at /image.png; `down` makes both return 503.
class MockSource {
 public:
  MockSource();
  ~MockSource();
  std::string url(const std::string& path = "/data.json") const;
  void set_json(const std::string& body);
  void set_image(std::vector<std::uint8_t> png);
  void set_down(bool down) { down_ = down; }
  int hits(const std::string& path = "/data.json") const;

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  mutable std::mutex mu_;
  std::string json_ = "{}";
  std::vector<std::uint8_t> image_;
  std::map<std::string, int> hits_;
  std::atomic<bool> down_{false};
};

/// Fetcher that answers from a table and records calls.
class FakeFetcher final : public bindings::HttpFetcher {
 public:
  bindings::FetchResponse get(const std::string& url) override;
  void set(const std::string& url, std::string body, int status = 200);
  void fail(const std::string& url);
  int calls(const std::string& url) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::optional<bindings::FetchResponse>> table_;
  std::map<std::string, int> calls_;
};

}  // namespace latebind::testing
