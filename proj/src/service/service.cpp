// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/service/service.hpp"

#include <charconv>
#include <set>

#include "latebind/common/time_format.hpp"
#include "latebind/render/gif.hpp"
#include "latebind/render/png.hpp"
#include "latebind/scrub/scrubber.hpp"

namespace latebind::service {

using nlohmann::json;
using store::BoundContent;
using store::ContentKind;

namespace {

template <class F>
ApiResult guarded(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    return error_result(e);
  } catch (const json::exception& e) {
    return error_result(ErrorCode::invalid_argument, e.what());
  } catch (const std::exception& e) {
    return error_result(ErrorCode::internal, e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> keys) {
  const std::set<std::string_view> allowed(keys);
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) throw Error(ErrorCode::invalid_argument, "unknown field '" + k + "'");
  }
}

json opt_time(const std::optional<TimePoint>& t) {
  return t ? json(format_iso8601(*t)) : json(nullptr);
}

/// Custom specs may shrink the budgets but never exceed the safe ones.
render::RenderSpec checked_spec(const json& body, const render::Font& font) {
  render::RenderSpec spec;
  if (body.contains("spec") && !body.at("spec").is_null()) {
    spec = store::spec_from_json(body.at("spec"));
  }
  if (spec.max_width > render::kSafeMaxWidth || spec.max_height > render::kSafeMaxHeight ||
      spec.max_file_bytes > render::kSafeMaxFileBytes) {
    throw Error(ErrorCode::invalid_argument, "spec exceeds the 299x524 / 204800-byte image budget");
  }
  if (spec.font_family != font.family_name()) {
    throw Error(ErrorCode::invalid_argument,
                "font_family must be '" + font.family_name() + "' (the only bundled font)");
  }
  return spec;
}

std::vector<std::string> sources(const BoundContent& c) {
  std::vector<std::string> out;
  for (const auto& r : c.revisions) {
    if (r.source) out.push_back(*r.source);
  }
  return out;
}

}  // namespace

void validate_base_url(std::string_view base_url) {
  try {
    bindings::parse_url(base_url);
  } catch (const Error& e) {
    throw Error(ErrorCode::invalid_argument, "bad base url: " + std::string(e.what()));
  }
  if (base_url.find_first_of("?#") != std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument, "base url must not carry a query or fragment");
  }
}

LateBindService::LateBindService(ServiceConfig config, ServiceDeps deps) : config_(std::move(config)) {
  validate_base_url(config_.base_url);
  while (!config_.base_url.empty() && config_.base_url.back() == '/') config_.base_url.pop_back();
  if (deps.clock) {
    clock_ = deps.clock;
  } else {
    own_clock_ = std::make_unique<SystemClock>();
    clock_ = own_clock_.get();
  }
  if (deps.fetcher) {
    fetcher_ = deps.fetcher;
  } else {
    own_fetcher_ = std::make_unique<bindings::HttplibFetcher>();
    fetcher_ = own_fetcher_.get();
  }
  font_ = render::Font::load(config_.font_path.empty() ? render::Font::default_path()
                                                       : config_.font_path);
  renderer_ = std::make_unique<render::Renderer>(font_, render::RendererOptions{config_.max_blur_radius});
  store_ = std::make_unique<store::ContentStore>(
      store::StoreOptions{config_.data_dir, config_.revision_cap, config_.durable});
  tokens_ = std::make_unique<authz::TokenRegistry>(
      *store_, authz::TokenRegistry::load_or_create_salt(store_->salt_path()), *clock_);
  lifecycle_ = std::make_unique<lifecycle::Lifecycle>(*store_, *tokens_, *renderer_);
  snapshots_.add(std::make_shared<bindings::RemoteImageProvider>(*fetcher_));
  if (config_.snapshot_root) {
    snapshots_.add(std::make_shared<bindings::LocalFileProvider>(*config_.snapshot_root));
  }
  scheduler_ = std::make_unique<bindings::Scheduler>(
      *clock_, bindings::SchedulerOptions{config_.scheduler_workers, 0.1, 0x6c62});
  engine_ = std::make_unique<bindings::BindingEngine>(
      *store_, *renderer_, *fetcher_, snapshots_, *scheduler_,
      bindings::EngineOptions{config_.kt_interval, config_.min_refresh_interval});
  engine_->restore();
  scheduler_->upsert(std::string(kSweepJob), config_.sweep_interval,
                     [this](TimePoint now) { lifecycle_->sweep(now); });
}

LateBindService::~LateBindService() { stop_background(); }

void LateBindService::start_background() { scheduler_->start(); }
void LateBindService::stop_background() {
  if (scheduler_) scheduler_->stop();
}

authz::Validation LateBindService::require_token(const std::string& id,
                                                 const std::optional<std::string>& token,
                                                 bool allow_revoked) {
  const auto v = token ? tokens_->validate(*token, id) : authz::Validation::invalid;
  if (v == authz::Validation::invalid) {
    throw Error(ErrorCode::unauthorized, "missing or invalid edit token");
  }
  if (v == authz::Validation::revoked && !allow_revoked) {
    throw Error(ErrorCode::forbidden, std::string(kRecipientOpened));
  }
  return v;
}

json LateBindService::urls_and_snippet(const std::string& id, const SnippetOptions& options) {
  const auto assets = store_->latest_assets(id);
  json urls = json::array();
  json segments = json::array();
  for (std::size_t i = 0; i < assets.size(); ++i) {
    urls.push_back(image_url(config_.base_url, id, i, assets[i].format));
    segments.push_back({{"index", i},
                        {"width", assets[i].width},
                        {"height", assets[i].height},
                        {"format", std::string(render::file_extension(assets[i].format))},
                        {"bytes", assets[i].byte_length}});
  }
  return {{"image_urls", std::move(urls)},
          {"segments", std::move(segments)},
          {"html_snippet", generate_snippet(id, assets, options)}};
}

json LateBindService::describe(const BoundContent& c, TimePoint now) const {
  const auto verdict = c.status == store::ContentStatus::expired
                           ? lifecycle::PolicyVerdict::expired_by(
                                 c.expiry_reason.value_or(lifecycle::ExpiryReason::absolute_expiry))
                           : lifecycle::evaluate(c.policy, c.view_state, now);
  json doc = {{"content_id", c.content_id},
              {"kind", std::string(store::to_string(c.kind))},
              {"status", std::string(store::to_string(c.status))},
              {"policy", store::policy_to_json(c.policy)},
              {"kt_enabled", c.kt_enabled},
              {"created_at", format_iso8601(c.created_at)},
              {"view_count", c.view_state.view_count},
              {"first_viewed_at", opt_time(c.view_state.first_viewed_at)},
              {"last_viewed_at", opt_time(c.view_state.last_viewed_at)},
              {"revision", c.latest_revision()},
              {"revision_count", c.latest_revision()},
              {"segment_count", c.segment_slots},
              {"verdict",
               {{"status", verdict.expired() ? "expired" : "active"},
                {"reason", verdict.reason ? json(std::string(lifecycle::to_string(*verdict.reason)))
                                          : json(nullptr)}}},
              {"token_status",
               c.token ? json(std::string(authz::to_string(c.token->status))) : json(nullptr)},
              {"spec", store::spec_to_json(c.spec)}};
  json revisions = json::array();
  for (const auto& r : c.revisions) {
    revisions.push_back({{"revision", r.revision}, {"created_at", format_iso8601(r.created_at)}});
  }
  doc["revisions"] = std::move(revisions);
  if (c.live() && !c.revisions.empty() && c.latest().source) doc["text"] = *c.latest().source;
  if (c.binding) doc["binding"] = store::binding_to_json(*c.binding);
  return doc;
}

ImageResult LateBindService::get_image(const std::string& content_id, std::string_view file,
                                       const std::optional<std::string>& token) {
  const auto dot = file.rfind('.');
  const std::string_view ext = dot == std::string_view::npos ? "" : file.substr(dot + 1);
  const auto want = ext == "gif" ? render::ImageFormat::animated : render::ImageFormat::static_raster;
  auto not_found = [&] {
    ImageResult r;
    r.status = 404;
    r.content_type = std::string(render::mime_type(want));
    r.body = want == render::ImageFormat::animated ? render::transparent_gif() : render::transparent_png();
    return r;
  };
  std::size_t segment = 0;
  const std::string_view digits = file.substr(0, dot == std::string_view::npos ? file.size() : dot);
  auto res = std::from_chars(digits.data(), digits.data() + digits.size(), segment);
  if ((ext != "png" && ext != "gif") || digits.empty() || res.ec != std::errc{} ||
      res.ptr != digits.data() + digits.size()) {
    return not_found();
  }
  try {
    auto out = lifecycle_->fetch(content_id, segment, token, clock_->now());
    if (out.asset.format != want) return not_found();
    ImageResult r;
    r.content_type = std::string(render::mime_type(out.asset.format));
    r.body = std::move(out.asset.payload);
    return r;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_found) return not_found();
    ImageResult r = not_found();
    r.status = http_status(e.code());
    return r;
  }
}

ApiResult LateBindService::create_content(const json& body) {
  return guarded([&]() -> ApiResult {
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "body must be an object");
    reject_unknown(body, {"kind", "text", "binding", "spec", "policy", "kt_enabled", "include_alt",
                          "alt_text"});
    const std::string kind_text = body.value("kind", std::string("static"));
    const auto kind = store::parse_content_kind(kind_text);
    if (!kind) throw Error(ErrorCode::invalid_argument, "unknown kind '" + kind_text + "'");
    const bool has_text = body.contains("text") && !body.at("text").is_null();
    const bool has_binding = body.contains("binding") && !body.at("binding").is_null();
    if (has_text && has_binding) {
      throw Error(ErrorCode::invalid_argument, "give either text or binding, not both");
    }
    if (store::is_bound_kind(*kind) && !has_binding) {
      throw Error(ErrorCode::invalid_argument, kind_text + " content needs a binding");
    }
    if (!store::is_bound_kind(*kind) && !has_text) {
      throw Error(ErrorCode::invalid_argument, kind_text + " content needs text");
    }
    if (has_text && !body.at("text").is_string()) {
      throw Error(ErrorCode::invalid_argument, "text must be a string");
    }

    BoundContent c;
    c.kind = *kind;
    c.spec = checked_spec(body, renderer_->font());
    c.policy = store::policy_from_json(body.value("policy", json(nullptr)));
    if (!c.policy.empty() && c.kind != ContentKind::self_destruct) {
      throw Error(ErrorCode::invalid_argument, "policy applies to self-destruct content only");
    }
    if (c.kind == ContentKind::self_destruct && c.policy.empty()) {
      throw Error(ErrorCode::invalid_argument, "self-destruct content needs a policy");
    }
    c.kt_enabled = body.value("kt_enabled", false);
    if (c.kt_enabled && c.kind != ContentKind::self_destruct &&
        c.kind != ContentKind::continuous_edit) {
      throw Error(ErrorCode::invalid_argument,
                  "kt_enabled applies to self-destruct and continuous-edit content");
    }
    SnippetOptions snippet{body.value("include_alt", false), std::nullopt, config_.base_url};
    if (body.contains("alt_text")) snippet.alt_text = body.at("alt_text").get<std::string>();

    const TimePoint now = clock_->now();
    c.created_at = now;
    c.content_id = store_->new_content_id();

    std::optional<std::string> source;
    std::vector<render::ImageAsset> assets;
    std::optional<store::DataBinding> binding;
    std::optional<std::string> first_error;
    if (has_binding) {
      binding = store::binding_from_json(body.at("binding"));
      if (c.kind == ContentKind::web_reference && binding->source != store::BindingSource::snapshot) {
        throw Error(ErrorCode::invalid_argument, "web-reference content needs a snapshot binding");
      }
      engine_->validate(*binding);
      try {
        auto produced = engine_->produce(*binding, c.spec);
        source = std::move(produced.source);
        assets = std::move(produced.assets);
      } catch (const Error& e) {
        first_error = std::string(to_string(e.code())) + ": " + e.what();
        source = std::string(kPlaceholderText);
        assets = renderer_->render_static(kPlaceholderText, c.spec);
      }
    } else {
      source = body.at("text").get<std::string>();
      assets = bindings::render_for(*renderer_, c, *source, {}, now);
    }

    const std::string id = c.content_id;
    store_->create(std::move(c), source, std::move(assets), now);
    const std::string token = tokens_->issue(id);
    std::optional<std::string> binding_id;
    if (binding) {
      binding_id = engine_->register_binding(id, *binding, first_error.has_value());
      if (first_error) {
        store_->update(id, [&](BoundContent& m) { m.binding->last_error = first_error; });
      } else {
        store_->update(id, [&](BoundContent& m) { m.binding->last_refreshed_at = now; });
      }
    }
    const BoundContent stored = store_->get(id);
    if (stored.kt_enabled && stored.kind == ContentKind::self_destruct) engine_->schedule_kt(id);

    ApiResult r;
    r.status = 201;
    r.body = urls_and_snippet(id, snippet);
    r.body["content_id"] = id;
    r.body["kind"] = std::string(store::to_string(stored.kind));
    r.body["edit_token"] = token;
    r.body["revision"] = stored.latest_revision();
    if (binding_id) r.body["binding_id"] = *binding_id;
    return r;
  });
}

ApiResult LateBindService::get_content(const std::string& content_id,
                                       const std::optional<std::string>& token) {
  return guarded([&]() -> ApiResult {
    if (!store_->contains(content_id)) throw Error(ErrorCode::not_found, "unknown content");
    require_token(content_id, token, true);
    const TimePoint now = clock_->now();
    lifecycle_->enforce(content_id, now);
    ApiResult r;
    r.body = describe(store_->get(content_id), now);
    const auto extra = urls_and_snippet(content_id, {false, std::nullopt, config_.base_url});
    r.body["image_urls"] = extra.at("image_urls");
    r.body["segments"] = extra.at("segments");
    return r;
  });
}

ApiResult LateBindService::patch_content(const std::string& content_id,
                                         const std::optional<std::string>& token, const json& body) {
  return guarded([&]() -> ApiResult {
    if (!store_->contains(content_id)) throw Error(ErrorCode::not_found, "unknown content");
    require_token(content_id, token, false);
    const TimePoint now = clock_->now();
    lifecycle_->enforce(content_id, now);
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "body must be an object");
    reject_unknown(body, {"text", "new_text"});
    const char* key = body.contains("new_text") ? "new_text" : "text";
    if (!body.contains(key) || !body.at(key).is_string()) {
      throw Error(ErrorCode::invalid_argument, "text is required");
    }
    const std::string text = body.at(key).get<std::string>();

    auto lock = store_->lock(content_id);
    const BoundContent c = store_->get(content_id);
    if (!c.live()) throw Error(ErrorCode::content_expired, "content is " + std::string(store::to_string(c.status)));
    if (store::is_bound_kind(c.kind)) {
      throw Error(ErrorCode::conflict, "bound content is updated by its data binding");
    }
    auto assets = bindings::render_for(*renderer_, c, text, sources(c), now);
    const auto revision = store_->put_revision(
        content_id, text, std::move(assets), now, [&](const BoundContent& m) {
          if (!m.token || m.token->status != authz::TokenStatus::active) {
            throw Error(ErrorCode::forbidden, std::string(kRecipientOpened));
          }
        });
    lock.unlock();
    ApiResult r;
    r.body = urls_and_snippet(content_id, {false, std::nullopt, config_.base_url});
    r.body["content_id"] = content_id;
    r.body["revision"] = revision;
    return r;
  });
}

ApiResult LateBindService::delete_content(const std::string& content_id,
                                          const std::optional<std::string>& token) {
  return guarded([&]() -> ApiResult {
    if (!store_->contains(content_id)) throw Error(ErrorCode::not_found, "unknown content");
    const auto v = require_token(content_id, token, true);
    const BoundContent c = store_->get(content_id);
    if (v == authz::Validation::revoked && c.kind != ContentKind::self_destruct) {
      throw Error(ErrorCode::forbidden, std::string(kRecipientOpened));
    }
    lifecycle_->delete_content(content_id, clock_->now());
    engine_->unschedule(content_id);
    ApiResult r;
    r.body = {{"content_id", content_id},
              {"status", std::string(store::to_string(store_->get(content_id).status))}};
    return r;
  });
}

ApiResult LateBindService::create_binding(const json& body, const std::optional<std::string>& token) {
  return guarded([&]() -> ApiResult {
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "body must be an object");
    reject_unknown(body, {"content_id", "binding"});
    if (!body.contains("content_id") || !body.at("content_id").is_string()) {
      throw Error(ErrorCode::invalid_argument, "content_id is required");
    }
    if (!body.contains("binding")) throw Error(ErrorCode::invalid_argument, "binding is required");
    const std::string id = body.at("content_id").get<std::string>();
    if (!store_->contains(id)) throw Error(ErrorCode::not_found, "unknown content");
    require_token(id, token, false);
    const auto binding = store::binding_from_json(body.at("binding"));
    const std::string binding_id = engine_->register_binding(id, binding, true);
    ApiResult r;
    r.status = 201;
    r.body = {{"binding_id", binding_id}, {"content_id", id}};
    return r;
  });
}

ApiResult LateBindService::scrub(const json& body) const {
  return guarded([&]() -> ApiResult {
    if (!body.is_object()) throw Error(ErrorCode::invalid_argument, "body must be an object");
    reject_unknown(body, {"text", "categories", "patterns"});
    if (!body.contains("text") || !body.at("text").is_string()) {
      throw Error(ErrorCode::invalid_argument, "text is required");
    }
    const std::string text = body.at("text").get<std::string>();
    std::set<scrub::Category> categories = scrub::builtin_categories();
    if (body.contains("categories")) {
      categories.clear();
      for (const auto& c : body.at("categories")) {
        const auto cat = scrub::parse_category(c.get<std::string>());
        if (!cat) throw Error(ErrorCode::invalid_argument, "unknown category " + c.dump());
        categories.insert(*cat);
      }
    }
    std::vector<std::string> patterns;
    if (body.contains("patterns")) {
      patterns = body.at("patterns").get<std::vector<std::string>>();
      if (!patterns.empty()) categories.insert(scrub::Category::custom_regex);
    }
    const auto spans = scrub::detect(text, categories, patterns);
    json list = json::array();
    for (const auto& s : spans) {
      list.push_back({{"start", s.start},
                      {"end", s.end},
                      {"category", std::string(scrub::to_string(s.category))},
                      {"text", s.matched_text}});
    }
    ApiResult r;
    r.body = {{"spans", std::move(list)}, {"preview", scrub::redact_preview(text, spans)}};
    return r;
  });
}

}  // namespace latebind::service
