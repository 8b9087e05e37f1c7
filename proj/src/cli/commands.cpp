// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/cli/commands.hpp"

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "latebind/cli/client.hpp"
#include "latebind/common/error.hpp"
#include "latebind/common/time_format.hpp"
#include "latebind/service/http_server.hpp"
#include "latebind/service/service.hpp"

namespace latebind::cli {

using nlohmann::json;

namespace {

constexpr const char* kDefaultUrl = "http://127.0.0.1:8080";

int exit_for_status(int status) {
  if (status >= 200 && status < 300) return kExitOk;
  if (status == 401 || status == 403) return kExitDenied;
  if (status == 410) return kExitExpired;
  if (status == 400) return kExitUsage;
  return kExitOther;
}

/// Prints the API error and returns the matching exit code.
int report(const Reply& reply, std::ostream& err) {
  std::string message = "HTTP " + std::to_string(reply.status);
  if (reply.body.is_object()) {
    if (reply.body.contains("reason")) {
      message = reply.body.at("reason").get<std::string>();
    } else if (reply.body.contains("message")) {
      message += ": " + reply.body.at("message").get<std::string>();
    }
  }
  err << "latebind: " << message << "\n";
  return exit_for_status(reply.status);
}

std::string url_or_env(const std::string& flag, const Env& env) {
  if (!flag.empty()) return flag;
  if (auto v = env("LATEBIND_URL"); v && !v->empty()) return *v;
  return kDefaultUrl;
}

std::optional<std::string> token_or_env(const std::string& flag, const Env& env) {
  if (!flag.empty()) return flag;
  if (auto v = env("LATEBIND_TOKEN"); v && !v->empty()) return v;
  return std::nullopt;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct ServeFlags {
  std::string bind = "127.0.0.1:8080";
  std::string data = "latebind-data";
  std::string base_url;
  std::string font;
  std::string ui_dir;
  std::string snapshot_root;
  std::string kt_interval = "3h";
  std::string min_refresh = "60s";
  std::string sweep_interval = "60s";
  std::size_t revision_cap = 20;
  double max_blur_radius = 8.0;
};

int serve(const ServeFlags& f, std::ostream& out, std::ostream& err) {
  const auto colon = f.bind.rfind(':');
  int port = 0;
  if (colon == std::string::npos || colon == 0 ||
      !(std::istringstream(f.bind.substr(colon + 1)) >> port) || port <= 0 || port > 65535) {
    err << "latebind: --bind must be host:port\n";
    return kExitUsage;
  }
  const std::string host = f.bind.substr(0, colon);
  service::ServiceConfig cfg;
  cfg.base_url = f.base_url.empty() ? "http://" + f.bind : f.base_url;
  cfg.data_dir = f.data;
  cfg.font_path = f.font;
  cfg.max_blur_radius = f.max_blur_radius;
  cfg.revision_cap = f.revision_cap;
  if (!f.ui_dir.empty()) cfg.ui_dir = f.ui_dir;
  if (!f.snapshot_root.empty()) cfg.snapshot_root = f.snapshot_root;
  for (auto [text, target, name] :
       {std::tuple{&f.kt_interval, &cfg.kt_interval, "--kt-interval"},
        std::tuple{&f.min_refresh, &cfg.min_refresh_interval, "--min-refresh"},
        std::tuple{&f.sweep_interval, &cfg.sweep_interval, "--sweep-interval"}}) {
    const auto d = parse_duration(*text);
    if (!d || d->count() <= 0) {
      err << "latebind: " << name << " must be a positive duration such as 90s or 3h\n";
      return kExitUsage;
    }
    *target = *d;
  }
  try {
    service::validate_base_url(cfg.base_url);
  } catch (const Error& e) {
    err << "latebind: " << e.what() << "\n";
    return kExitUsage;
  }

  // Block the stop signals before any thread starts so only sigwait sees them.
  sigset_t stop_signals;
  sigemptyset(&stop_signals);
  sigaddset(&stop_signals, SIGINT);
  sigaddset(&stop_signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &stop_signals, &previous);
  struct Restore {
    sigset_t mask;
    ~Restore() { pthread_sigmask(SIG_SETMASK, &mask, nullptr); }
  } restore{previous};

  std::unique_ptr<service::LateBindService> svc;
  try {
    svc = std::make_unique<service::LateBindService>(cfg);
  } catch (const Error& e) {
    err << "latebind: " << e.what() << "\n";
    return e.code() == ErrorCode::invalid_argument ? kExitUsage : kExitOther;
  }
  service::HttpServer server(*svc);
  if (!server.bind(host, port)) {
    err << "latebind: cannot listen on " << f.bind << "\n";
    return kExitOther;
  }
  out << json{{"bind", f.bind},
              {"base_url", svc->config().base_url},
              {"data_dir", std::filesystem::absolute(cfg.data_dir).string()},
              {"font", cfg.font_path.empty() ? render::Font::default_path().string()
                                             : cfg.font_path.string()},
              {"max_blur_radius", cfg.max_blur_radius},
              {"kt_interval", format_duration(cfg.kt_interval)},
              {"min_refresh_interval", format_duration(cfg.min_refresh_interval)},
              {"sweep_interval", format_duration(cfg.sweep_interval)},
              {"revision_cap", cfg.revision_cap},
              {"ui_dir", cfg.ui_dir ? json(cfg.ui_dir->string()) : json(nullptr)},
              {"snapshot_root", cfg.snapshot_root ? json(cfg.snapshot_root->string()) : json(nullptr)}}
             .dump()
      << std::endl;
  svc->start_background();
  std::thread listener([&] { server.listen(); });
  int sig = 0;
  sigwait(&stop_signals, &sig);
  server.stop();
  listener.join();
  svc->stop_background();
  err << "latebind: stopped\n";
  return kExitOk;
}

struct BindFlags {
  std::string url;
  std::string kind;
  std::string text;
  std::string html;
  std::string select = "lb";
  std::string out_path;
  std::string expire_after_first_view;
  std::string expire_at;
  std::uint64_t max_views = 0;
  bool kt = false;
  bool auto_scrub = false;
  bool include_alt = false;
  bool json_output = false;
};

struct Bound {
  std::string content_id;
  std::string token;
  std::string snippet;
};

class Binder {
 public:
  Binder(const BindFlags& f, const ApiClient& client, std::ostream& out)
      : f_(f), client_(client), out_(out) {}

  /// Throws Reply on API failure.
  Bound bind(const std::string& text) {
    json body = {{"kind", kind()}, {"text", text}, {"kt_enabled", f_.kt}};
    json policy = json::object();
    if (!f_.expire_after_first_view.empty()) policy["after_first_view"] = f_.expire_after_first_view;
    if (!f_.expire_at.empty()) policy["absolute_expiry"] = f_.expire_at;
    if (f_.max_views > 0) policy["max_views"] = f_.max_views;
    if (!policy.empty()) body["policy"] = policy;
    if (f_.include_alt) {
      body["include_alt"] = true;
      body["alt_text"] = "";
    }
    const Reply r = client_.post("/api/contents", body);
    if (r.status != 201) throw r;
    if (f_.json_output) {
      out_ << r.body.dump() << "\n";
    } else {
      out_ << "content_id: " << r.body.at("content_id").get<std::string>() << "\n"
           << "edit_token: " << r.body.at("edit_token").get<std::string>() << "\n";
    }
    return {r.body.at("content_id").get<std::string>(), r.body.at("edit_token").get<std::string>(),
            r.body.at("html_snippet").get<std::string>()};
  }

  /// Binds each detected span and returns `text` with the spans replaced by
  /// their snippets. Offsets from the API are code points.
  std::string bind_spans(const std::string& text, std::size_t* count) {
    const Reply r = client_.post("/api/scrub", json{{"text", text}});
    if (r.status != 200) throw r;
    std::vector<std::size_t> byte_of;  // code point index -> byte offset
    for (std::size_t i = 0; i < text.size(); ++i) {
      if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) byte_of.push_back(i);
    }
    byte_of.push_back(text.size());
    std::string result;
    std::size_t cursor = 0;
    *count = 0;
    for (const auto& span : r.body.at("spans")) {
      const std::size_t b = byte_of.at(span.at("start").get<std::size_t>());
      const std::size_t e = byte_of.at(span.at("end").get<std::size_t>());
      result += text.substr(cursor, b - cursor);
      result += bind(text.substr(b, e - b)).snippet;
      cursor = e;
      ++*count;
    }
    result += text.substr(cursor);
    return result;
  }

 private:
  std::string kind() const {
    if (!f_.kind.empty()) return f_.kind;
    const bool policy = !f_.expire_after_first_view.empty() || !f_.expire_at.empty() || f_.max_views;
    return policy ? "self-destruct" : "static";
  }

  const BindFlags& f_;
  const ApiClient& client_;
  std::ostream& out_;
};

int bind_command(const BindFlags& f, std::ostream& out, std::ostream& err, const Env& env) {
  if (f.text.empty() == f.html.empty()) {
    err << "latebind: give exactly one of --text or --html\n";
    return kExitUsage;
  }
  const ApiClient client(url_or_env(f.url, env));
  Binder binder(f, client, out);
  try {
    if (!f.text.empty()) {
      if (f.auto_scrub) {
        std::size_t n = 0;
        const std::string rewritten = binder.bind_spans(f.text, &n);
        if (n == 0) err << "latebind: no sensitive spans found\n";
        out << rewritten << "\n";
      } else {
        out << binder.bind(f.text).snippet << "\n";
      }
      return kExitOk;
    }
    const std::string html = read_text_file(f.html);
    const auto regions = find_markers(html, f.select);
    if (regions.empty()) {
      err << "latebind: no <!--" << f.select << "--> marker in " << f.html << "\n";
      return kExitNoMarker;
    }
    std::string rewritten;
    std::size_t cursor = 0;
    for (const auto& region : regions) {
      rewritten += html.substr(cursor, region.inner_begin - cursor);
      const std::string inner = html.substr(region.inner_begin, region.inner_end - region.inner_begin);
      if (f.auto_scrub) {
        std::size_t n = 0;
        rewritten += binder.bind_spans(inner, &n);
      } else {
        rewritten += binder.bind(html_to_text(inner)).snippet;
      }
      cursor = region.inner_end;
    }
    rewritten += html.substr(cursor);
    const std::string path = f.out_path.empty() ? f.html + ".latebind.html" : f.out_path;
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file << rewritten;
    if (!file) throw Error(ErrorCode::io, "cannot write " + path);
    err << "latebind: wrote " << path << "\n";
    return kExitOk;
  } catch (const Reply& r) {
    return report(r, err);
  }
}

}  // namespace

Env process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
}

std::vector<MarkerRegion> find_markers(std::string_view html, std::string_view name) {
  const std::string open = "<!--" + std::string(name) + "-->";
  const std::string close = "<!--/" + std::string(name) + "-->";
  std::vector<MarkerRegion> out;
  std::size_t pos = 0;
  for (;;) {
    const auto o = html.find(open, pos);
    if (o == std::string_view::npos) break;
    const auto c = html.find(close, o + open.size());
    if (c == std::string_view::npos) {
      throw Error(ErrorCode::invalid_argument, "marker " + open + " is not closed by " + close);
    }
    out.push_back({o + open.size(), c});
    pos = c + close.size();
  }
  return out;
}

std::string html_to_text(std::string_view html) {
  static const std::pair<std::string_view, std::string_view> kEntities[] = {
      {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"},
      {"&apos;", "'"}, {"&nbsp;", " "}};
  std::string out;
  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '<') {
      const auto end = html.find('>', i);
      if (end == std::string_view::npos) break;
      std::string tag(html.substr(i + 1, end - i - 1));
      std::transform(tag.begin(), tag.end(), tag.begin(),
                     [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
      const auto name_end = tag.find_first_of(" \t\r\n/>", tag[0] == '/' ? 1 : 0);
      const std::string name = tag.substr(0, name_end);
      if (name == "br" || name == "/p" || name == "/div" || name == "/li" || name == "/tr") {
        out += '\n';
      }
      i = end + 1;
    } else if (c == '&') {
      bool matched = false;
      for (const auto& [entity, repl] : kEntities) {
        if (html.substr(i, entity.size()) == entity) {
          out += repl;
          i += entity.size();
          matched = true;
          break;
        }
      }
      if (!matched) {
        out += c;
        ++i;
      }
    } else {
      out += c;
      ++i;
    }
  }
  const auto first = out.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = out.find_last_not_of(" \t\r\n");
  return out.substr(first, last - first + 1);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Env& env) {
  CLI::App app{"latebind: late-bound email content server and sender tool", "latebind"};
  app.require_subcommand(1);

  ServeFlags serve_flags;
  auto* serve_cmd = app.add_subcommand("serve", "Run the image service and refresh scheduler");
  serve_cmd->add_option("--bind", serve_flags.bind, "host:port to listen on")->capture_default_str();
  serve_cmd->add_option("--data", serve_flags.data, "Data directory (created if missing)")
      ->capture_default_str();
  serve_cmd->add_option("--base-url", serve_flags.base_url,
                        "Public URL used in image links (default: http://<bind>)");
  serve_cmd->add_option("--font", serve_flags.font, "TrueType font (default: bundled DejaVu Sans)");
  serve_cmd->add_option("--ui-dir", serve_flags.ui_dir, "Static files served under /ui/");
  serve_cmd->add_option("--snapshot-root", serve_flags.snapshot_root,
                        "Directory for the local-file snapshot provider");
  serve_cmd->add_option("--kt-interval", serve_flags.kt_interval, "Blur regeneration interval")
      ->capture_default_str();
  serve_cmd->add_option("--min-refresh", serve_flags.min_refresh, "Smallest binding interval")
      ->capture_default_str();
  serve_cmd->add_option("--sweep-interval", serve_flags.sweep_interval, "Expiry sweep interval")
      ->capture_default_str();
  serve_cmd->add_option("--revision-cap", serve_flags.revision_cap, "Revisions kept per content")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve_cmd->add_option("--max-blur-radius", serve_flags.max_blur_radius,
                        "Blur sigma of the last frame when fully aged, px")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);

  BindFlags bind_flags;
  auto* bind_cmd = app.add_subcommand("bind", "Create late-bound content and print its snippet");
  bind_cmd->add_option("--url", bind_flags.url, "Service URL (env LATEBIND_URL)");
  bind_cmd->add_option("--kind", bind_flags.kind, "static|self-destruct|continuous-edit")
      ->check(CLI::IsMember({"static", "self-destruct", "continuous-edit"}));
  auto* text_opt = bind_cmd->add_option("--text", bind_flags.text, "Text to bind");
  auto* html_opt = bind_cmd->add_option("--html", bind_flags.html, "Email HTML file with markers");
  text_opt->excludes(html_opt);
  bind_cmd->add_option("--select", bind_flags.select, "Marker name: <!--NAME-->...<!--/NAME-->")
      ->capture_default_str();
  bind_cmd->add_option("--out", bind_flags.out_path, "Output HTML (default: <file>.latebind.html)");
  bind_cmd->add_option("--expire-after-first-view", bind_flags.expire_after_first_view,
                       "Duration such as 3d or 90m");
  bind_cmd->add_option("--expire-at", bind_flags.expire_at, "ISO 8601 timestamp");
  bind_cmd->add_option("--max-views", bind_flags.max_views, "View limit")->check(CLI::PositiveNumber);
  bind_cmd->add_flag("--kt", bind_flags.kt, "Kinetic typography animation");
  bind_cmd->add_flag("--auto-scrub", bind_flags.auto_scrub, "Bind each detected sensitive span");
  bind_cmd->add_flag("--include-alt", bind_flags.include_alt, "Emit empty alt attributes");
  bind_cmd->add_flag("--json", bind_flags.json_output, "Print API responses as JSON");

  std::string id;
  std::string token;
  std::string url;
  std::string new_text;
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("content_id", id, "Content id")->required();
    cmd->add_option("--token", token, "Edit token (env LATEBIND_TOKEN)");
    cmd->add_option("--url", url, "Service URL (env LATEBIND_URL)");
  };
  auto* edit_cmd = app.add_subcommand("edit", "Replace the text of continuous-edit content");
  add_common(edit_cmd);
  edit_cmd->add_option("--text", new_text, "New text")->required();
  auto* status_cmd = app.add_subcommand("status", "Show views, expiry and revisions");
  add_common(status_cmd);
  auto* destroy_cmd = app.add_subcommand("destroy", "Delete content now");
  add_common(destroy_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "latebind: " << e.what() << "\n";
    if (app.get_subcommands().empty()) err << app.help();
    return kExitUsage;
  }

  try {
    if (serve_cmd->parsed()) return serve(serve_flags, out, err);
    if (bind_cmd->parsed()) {
      if (bind_flags.text.empty() && bind_flags.html.empty()) {
        err << "latebind: give exactly one of --text or --html\n";
        return kExitUsage;
      }
      return bind_command(bind_flags, out, err, env);
    }
    const ApiClient client(url_or_env(url, env));
    const auto tok = token_or_env(token, env);
    if (!tok) {
      err << "latebind: --token or LATEBIND_TOKEN is required\n";
      return kExitUsage;
    }
    const std::string path = "/api/contents/" + id;
    Reply r;
    if (edit_cmd->parsed()) {
      r = client.patch(path, json{{"text", new_text}}, tok);
      if (r.status == 200) {
        out << "revision " << r.body.at("revision").get<std::uint64_t>() << "\n";
        return kExitOk;
      }
    } else if (status_cmd->parsed()) {
      r = client.get(path, tok);
      if (r.status == 200) {
        out << r.body.dump(2) << "\n";
        return kExitOk;
      }
    } else {
      r = client.del(path, tok);
      if (r.status == 200) {
        out << r.body.at("status").get<std::string>() << "\n";
        return kExitOk;
      }
    }
    return report(r, err);
  } catch (const Error& e) {
    err << "latebind: " << e.what() << "\n";
    return e.code() == ErrorCode::invalid_argument ? kExitUsage : kExitOther;
  }
}

}  // namespace latebind::cli
