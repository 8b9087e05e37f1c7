// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include <pthread.h>
#include <signal.h>

#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "latebind/cli/commands.hpp"
#include "service_rig.hpp"

using namespace latebind;
using namespace latebind::cli;
using latebind::testing::parse_img_tags;
using latebind::testing::ServiceRig;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args, const std::map<std::string, std::string>& env = {}) {
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = run_cli(args, out, err, [env](const std::string& k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string field(const std::string& out, const std::string& name) {
  const auto at = out.find(name + ": ");
  REQUIRE(at != std::string::npos);
  const auto begin = at + name.size() + 2;
  return out.substr(begin, out.find('\n', begin) - begin);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("markers and html text") {
  const std::string html = "<p>a</p><!--lb-->X<!--/lb--><p>b</p><!--lb-->Y<!--/lb-->";
  const auto regions = find_markers(html, "lb");
  REQUIRE(regions.size() == 2);
  CHECK(html.substr(regions[0].inner_begin, regions[0].inner_end - regions[0].inner_begin) == "X");
  CHECK(html.substr(regions[1].inner_begin, regions[1].inner_end - regions[1].inner_begin) == "Y");
  CHECK(find_markers(html, "other").empty());
  CHECK_THROWS_AS(find_markers("<!--lb-->open", "lb"), Error);
  CHECK(html_to_text("  <b>Card</b>&nbsp;4111<br>line &amp; more</p> ") == "Card 4111\nline & more");
}

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"bind"}).code == kExitUsage);
  CHECK(run({"bind", "--text", "a", "--html", "f.html"}).code == kExitUsage);
  CHECK(run({"status", "abc"}).code == kExitUsage);  // no token
  CHECK(run({"serve", "--base-url", "ftp://nope"}).code == kExitUsage);
  CHECK(run({"serve", "--bind", "nonsense"}).code == kExitUsage);
  const auto unreachable = run({"status", "abc", "--token", "t", "--url", "http://127.0.0.1:1"});
  CHECK(unreachable.code == kExitOther);
}

TEST_CASE("bind text and manage it") {
  ServiceRig rig;
  const std::map<std::string, std::string> env = {{"LATEBIND_URL", rig.base_url()}};
  auto r = run({"bind", "--text", "4111 1111 1111 1111", "--max-views", "1"}, env);
  REQUIRE(r.code == kExitOk);
  const std::string id = field(r.out, "content_id");
  const std::string token = field(r.out, "edit_token");
  const auto tags = parse_img_tags(r.out);
  REQUIRE(tags.size() == 1);
  CHECK(rig.svc().store().get(id).kind == store::ContentKind::self_destruct);

  auto env_tok = env;
  env_tok["LATEBIND_TOKEN"] = token;
  r = run({"status", id}, env_tok);
  CHECK(r.code == kExitOk);
  CHECK(json::parse(r.out).at("view_count") == 0);
  // Same document through the raw API.
  const auto raw = rig.get("/api/contents/" + id, token).json();
  CHECK(json::parse(r.out).at("policy") == raw.at("policy"));
  CHECK(run({"destroy", id}, env_tok).code == kExitOk);
  CHECK(run({"destroy", id}, env_tok).code == kExitOk);
  CHECK(run({"edit", id, "--text", "x"}, env_tok).code == kExitExpired);
  CHECK(run({"status", id, "--token", "wrong"}, env).code == kExitDenied);
}

TEST_CASE("edit after the recipient opened") {
  ServiceRig rig;
  auto r = run({"bind", "--kind", "continuous-edit", "--text", "Hi Jhon", "--url", rig.base_url()});
  REQUIRE(r.code == kExitOk);
  const std::string id = field(r.out, "content_id");
  const std::string token = field(r.out, "edit_token");
  r = run({"edit", id, "--token", token, "--text", "Hi John", "--url", rig.base_url()});
  CHECK(r.code == kExitOk);
  CHECK(r.out == "revision 2\n");
  CHECK(rig.get("/i/" + id + "/0.png").status == 200);
  r = run({"edit", id, "--token", token, "--text", "late", "--url", rig.base_url()});
  CHECK(r.code == kExitDenied);
  CHECK(r.err.find("recipient-opened") != std::string::npos);
}

TEST_CASE("bind marked regions of an html file") {
  ServiceRig rig;
  testing::TempDir dir;
  const auto mail = dir.path() / "mail.html";
  const std::string prefix = "<html><body><p>Hello,</p>\n<p>Your code: <!--lb-->";
  const std::string region = "<b>7731</b>";
  const std::string suffix = "<!--/lb--></p>\n<p>Bye</p></body></html>\n";
  std::ofstream(mail) << prefix << region << suffix;
  auto r = run({"bind", "--html", mail.string(), "--select", "lb", "--url", rig.base_url()});
  REQUIRE(r.code == kExitOk);
  const std::string written = slurp(dir.path() / "mail.html.latebind.html");
  REQUIRE(written.size() > prefix.size() + suffix.size());
  CHECK(written.substr(0, prefix.size()) == prefix);
  CHECK(written.substr(written.size() - suffix.size()) == suffix);
  const std::string middle = written.substr(prefix.size(), written.size() - prefix.size() - suffix.size());
  const auto tags = parse_img_tags(middle);
  REQUIRE(tags.size() == 1);
  const std::string id = field(r.out, "content_id");
  CHECK(*rig.svc().store().get(id).latest().source == "7731");
  CHECK(slurp(mail) == prefix + region + suffix);

  std::ofstream(dir.path() / "plain.html") << "<p>no markers</p>";
  r = run({"bind", "--html", (dir.path() / "plain.html").string(), "--url", rig.base_url()});
  CHECK(r.code == kExitNoMarker);
  r = run({"bind", "--html", (dir.path() / "missing.html").string(), "--url", rig.base_url()});
  CHECK(r.code == kExitOther);
}

TEST_CASE("auto-scrub binds each sensitive span") {
  ServiceRig rig;
  auto r = run({"bind", "--auto-scrub", "--text", "call 412-555-0101", "--url", rig.base_url()});
  REQUIRE(r.code == kExitOk);
  const std::string id = field(r.out, "content_id");
  CHECK(*rig.svc().store().get(id).latest().source == "412-555-0101");
  const auto last_line_start = r.out.rfind("call ");
  REQUIRE(last_line_start != std::string::npos);
  const std::string rewritten = r.out.substr(last_line_start);
  CHECK(rewritten.rfind("call <img ", 0) == 0);
  CHECK(parse_img_tags(rewritten).size() == 1);

  r = run({"bind", "--auto-scrub", "--text", "ssn 123-45-6789 or a@b.io", "--url", rig.base_url()});
  REQUIRE(r.code == kExitOk);
  CHECK(parse_img_tags(r.out).size() == 2);
  CHECK(rig.svc().store().list().size() == 3);
}

TEST_CASE("serve runs until signalled") {
  testing::TempDir dir;
  const int port = testing::free_port();
  Run result;
  std::ostringstream out;
  std::ostringstream err;
  std::thread server([&] {
    result.code = run_cli({"serve", "--bind", "127.0.0.1:" + std::to_string(port), "--data",
                           (dir.path() / "new" / "data").string()},
                          out, err, [](const std::string&) { return std::nullopt; });
  });
  httplib::Client client("127.0.0.1", port);
  bool healthy = false;
  for (int i = 0; i < 200 && !healthy; ++i) {
    auto res = client.Get("/healthz");
    healthy = res && res->status == 200;
    if (!healthy) std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  CHECK(healthy);
  pthread_kill(server.native_handle(), SIGTERM);
  server.join();
  CHECK(result.code == kExitOk);
  const auto cfg = json::parse(out.str().substr(0, out.str().find('\n')));
  CHECK(cfg.at("base_url") == "http://127.0.0.1:" + std::to_string(port));
  CHECK(cfg.at("kt_interval") == "3h");
  CHECK(std::filesystem::is_directory(dir.path() / "new" / "data"));
}
