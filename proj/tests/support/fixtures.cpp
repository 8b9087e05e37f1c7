// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <random>
#include <regex>
#include <stdexcept>

#include "httplib.h"
#include "latebind/common/error.hpp"

namespace latebind::testing {

TempDir::TempDir() {
  std::random_device rd;
  path_ = std::filesystem::temp_directory_path() /
          ("latebind-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::shared_ptr<const render::Font> bundled_font() {
  static const auto font = render::Font::load(render::Font::default_path());
  return font;
}

const render::Renderer& shared_renderer() {
  static const render::Renderer renderer(bundled_font());
  return renderer;
}

bool luhn_oracle(const std::string& digits) {
  // Doubling table walk from the right; written independently of the scrubber.
  static const int doubled[10] = {0, 2, 4, 6, 8, 1, 3, 5, 7, 9};
  int total = 0;
  bool dbl = false;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (*it < '0' || *it > '9') return false;
    const int d = *it - '0';
    total += dbl ? doubled[d] : d;
    dbl = !dbl;
  }
  return !digits.empty() && total % 10 == 0;
}

std::string luhn_complete(const std::string& body) {
  for (char c = '0'; c <= '9'; ++c) {
    if (luhn_oracle(body + c)) return body + c;
  }
  throw std::logic_error("unreachable");
}

std::vector<ImgTag> parse_img_tags(const std::string& html) {
  static const std::regex tag(R"(<img\s+([^>]*?)\s*/?>)", std::regex::icase);
  static const std::regex attr(R"re(([a-zA-Z-]+)="([^"]*)")re");
  std::vector<ImgTag> out;
  for (auto it = std::sregex_iterator(html.begin(), html.end(), tag); it != std::sregex_iterator();
       ++it) {
    ImgTag t;
    const std::string attrs = (*it)[1].str();
    for (auto a = std::sregex_iterator(attrs.begin(), attrs.end(), attr);
         a != std::sregex_iterator(); ++a) {
      const std::string name = (*a)[1].str();
      const std::string value = (*a)[2].str();
      if (name == "src") t.src = value;
      if (name == "width") t.width = std::stoi(value);
      if (name == "height") t.height = std::stoi(value);
      if (name == "alt") t.alt = value;
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto slash = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

MockSource::MockSource() : server_(std::make_unique<httplib::Server>()) {
  server_->Get("/data.json", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu_);
    ++hits_["/data.json"];
    if (down_) {
      res.status = 503;
      return;
    }
    res.set_content(json_, "application/json");
  });
  server_->Get("/image.png", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mu_);
    ++hits_["/image.png"];
    if (down_) {
      res.status = 503;
      return;
    }
    res.set_content(std::string(image_.begin(), image_.end()), "image/png");
  });
  port_ = server_->bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("mock source: bind failed");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

MockSource::~MockSource() {
  server_->stop();
  thread_.join();
}

std::string MockSource::url(const std::string& path) const {
  return "http://127.0.0.1:" + std::to_string(port_) + path;
}

void MockSource::set_json(const std::string& body) {
  std::lock_guard lock(mu_);
  json_ = body;
}

void MockSource::set_image(std::vector<std::uint8_t> png) {
  std::lock_guard lock(mu_);
  image_ = std::move(png);
}

int MockSource::hits(const std::string& path) const {
  std::lock_guard lock(mu_);
  auto it = hits_.find(path);
  return it == hits_.end() ? 0 : it->second;
}

bindings::FetchResponse FakeFetcher::get(const std::string& url) {
  std::lock_guard lock(mu_);
  ++calls_[url];
  auto it = table_.find(url);
  if (it == table_.end() || !it->second) throw Error(ErrorCode::network, "unreachable: " + url);
  if (it->second->status < 200 || it->second->status >= 300) {
    throw Error(ErrorCode::network, "HTTP " + std::to_string(it->second->status));
  }
  return *it->second;
}

void FakeFetcher::set(const std::string& url, std::string body, int status) {
  std::lock_guard lock(mu_);
  table_[url] = bindings::FetchResponse{status, "application/json", std::move(body)};
}

void FakeFetcher::fail(const std::string& url) {
  std::lock_guard lock(mu_);
  table_[url] = std::nullopt;
}

int FakeFetcher::calls(const std::string& url) const {
  std::lock_guard lock(mu_);
  auto it = calls_.find(url);
  return it == calls_.end() ? 0 : it->second;
}

}  // namespace latebind::testing
