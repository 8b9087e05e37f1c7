// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/store/content.hpp"

#include <set>

#include "latebind/common/error.hpp"
#include "latebind/common/time_format.hpp"
#include "latebind/render/raster.hpp"

namespace latebind::store {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::invalid_argument, what); }

void reject_unknown(const json& j, std::initializer_list<std::string_view> keys, const char* where) {
  if (!j.is_object()) bad(std::string(where) + " must be an object");
  const std::set<std::string_view> allowed(keys);
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) bad(std::string("unknown field '") + k + "' in " + where);
  }
}

std::int64_t to_ms(TimePoint t) { return t.time_since_epoch().count(); }
TimePoint from_ms(std::int64_t ms) { return TimePoint{Duration{ms}}; }

json opt_time(const std::optional<TimePoint>& t) { return t ? json(to_ms(*t)) : json(nullptr); }
std::optional<TimePoint> read_opt_time(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return from_ms(j.at(key).get<std::int64_t>());
}

Duration read_duration(const json& j, const char* text_key, const char* ms_key) {
  if (j.contains(ms_key)) {
    const auto& v = j.at(ms_key);
    if (!v.is_number_integer()) bad(std::string(ms_key) + " must be an integer");
    return Duration{v.get<std::int64_t>()};
  }
  const auto& v = j.at(text_key);
  if (v.is_number_integer()) return Duration{v.get<std::int64_t>()};
  if (!v.is_string()) bad(std::string(text_key) + " must be a duration string");
  auto d = parse_duration(v.get<std::string>());
  if (!d) bad(std::string("cannot parse duration '") + v.get<std::string>() + "'");
  return *d;
}

render::Rgba read_color(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_string()) bad(std::string(key) + " must be a color string");
  auto c = render::parse_color(v.get<std::string>());
  if (!c) bad(std::string("cannot parse color '") + v.get<std::string>() + "'");
  return *c;
}

template <class T>
T read_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) bad(std::string(key) + " must be a number");
  return v.get<T>();
}

json asset_ref_to_json(const AssetRef& a) {
  return {{"segment", a.segment_index}, {"digest", a.digest},
          {"format", std::string(render::file_extension(a.format))},
          {"width", a.width}, {"height", a.height}, {"bytes", a.byte_length},
          {"frames", a.frame_count}};
}

AssetRef asset_ref_from_json(const json& j) {
  AssetRef a;
  a.segment_index = j.at("segment").get<std::size_t>();
  a.digest = j.at("digest").get<std::string>();
  a.format = j.at("format").get<std::string>() == "gif" ? render::ImageFormat::animated
                                                       : render::ImageFormat::static_raster;
  a.width = j.at("width").get<int>();
  a.height = j.at("height").get<int>();
  a.byte_length = j.at("bytes").get<std::size_t>();
  a.frame_count = j.at("frames").get<int>();
  return a;
}

}  // namespace

std::string_view to_string(ContentKind kind) noexcept {
  switch (kind) {
    case ContentKind::static_text: return "static";
    case ContentKind::self_destruct: return "self-destruct";
    case ContentKind::continuous_edit: return "continuous-edit";
    case ContentKind::dashboard: return "dashboard";
    case ContentKind::web_reference: return "web-reference";
  }
  return "static";
}

std::optional<ContentKind> parse_content_kind(std::string_view text) noexcept {
  for (auto k : {ContentKind::static_text, ContentKind::self_destruct, ContentKind::continuous_edit,
                 ContentKind::dashboard, ContentKind::web_reference}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ContentStatus status) noexcept {
  switch (status) {
    case ContentStatus::live: return "live";
    case ContentStatus::expired: return "expired";
    case ContentStatus::deleted: return "deleted";
  }
  return "live";
}

std::optional<ContentStatus> parse_content_status(std::string_view text) noexcept {
  for (auto s : {ContentStatus::live, ContentStatus::expired, ContentStatus::deleted}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

bool is_bound_kind(ContentKind kind) noexcept {
  return kind == ContentKind::dashboard || kind == ContentKind::web_reference;
}

const RevisionRecord& BoundContent::latest() const {
  if (revisions.empty()) throw Error(ErrorCode::internal, "content " + content_id + " has no revisions");
  return revisions.back();
}

json spec_to_json(const render::RenderSpec& spec) {
  return {{"font_family", spec.font_family},
          {"font_size", spec.font_size},
          {"text_color", render::to_hex(spec.text_color)},
          {"background_color", render::to_hex(spec.background_color)},
          {"target_width", spec.target_width},
          {"max_width", spec.max_width},
          {"max_height", spec.max_height},
          {"max_file_bytes", spec.max_file_bytes},
          {"line_spacing", spec.line_spacing}};
}

render::RenderSpec spec_from_json(const json& j, render::RenderSpec base) {
  reject_unknown(j,
                 {"font_family", "font_size", "text_color", "background_color", "target_width",
                  "max_width", "max_height", "max_file_bytes", "line_spacing"},
                 "spec");
  try {
    if (j.contains("font_family")) base.font_family = j.at("font_family").get<std::string>();
    if (j.contains("font_size")) base.font_size = read_number<double>(j, "font_size");
    if (j.contains("text_color")) base.text_color = read_color(j, "text_color");
    if (j.contains("background_color")) base.background_color = read_color(j, "background_color");
    if (j.contains("target_width")) base.target_width = read_number<int>(j, "target_width");
    if (j.contains("max_width")) base.max_width = read_number<int>(j, "max_width");
    if (j.contains("max_height")) base.max_height = read_number<int>(j, "max_height");
    if (j.contains("max_file_bytes")) {
      const double v = read_number<double>(j, "max_file_bytes");
      if (v < 0) bad("max_file_bytes must be non-negative");
      base.max_file_bytes = static_cast<std::size_t>(v);
    }
    if (j.contains("line_spacing")) base.line_spacing = read_number<double>(j, "line_spacing");
  } catch (const json::exception& e) {
    bad(std::string("bad spec: ") + e.what());
  }
  base.validate();
  return base;
}

json policy_to_json(const lifecycle::LifecyclePolicy& p) {
  json j = json::object();
  if (p.absolute_expiry) j["absolute_expiry"] = format_iso8601(*p.absolute_expiry);
  if (p.after_first_view) {
    j["after_first_view"] = format_duration(*p.after_first_view);
    j["after_first_view_ms"] = p.after_first_view->count();
  }
  if (p.max_views) j["max_views"] = *p.max_views;
  return j;
}

lifecycle::LifecyclePolicy policy_from_json(const json& j) {
  lifecycle::LifecyclePolicy p;
  if (j.is_null()) return p;
  reject_unknown(j, {"absolute_expiry", "after_first_view", "after_first_view_ms", "max_views"},
                 "policy");
  try {
    if (j.contains("absolute_expiry") && !j.at("absolute_expiry").is_null()) {
      const auto& v = j.at("absolute_expiry");
      if (v.is_number_integer()) {
        p.absolute_expiry = from_ms(v.get<std::int64_t>());
      } else {
        auto t = v.is_string() ? parse_iso8601(v.get<std::string>()) : std::nullopt;
        if (!t) bad("absolute_expiry must be an ISO 8601 timestamp");
        p.absolute_expiry = *t;
      }
    }
    if ((j.contains("after_first_view") && !j.at("after_first_view").is_null()) ||
        j.contains("after_first_view_ms")) {
      p.after_first_view = read_duration(j, "after_first_view", "after_first_view_ms");
    }
    if (j.contains("max_views") && !j.at("max_views").is_null()) {
      const auto& v = j.at("max_views");
      if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
        bad("max_views must be a positive integer");
      }
      p.max_views = v.get<std::uint64_t>();
    }
  } catch (const json::exception& e) {
    bad(std::string("bad policy: ") + e.what());
  }
  p.validate();
  return p;
}

json binding_to_json(const DataBinding& b) {
  json j = {{"binding_id", b.binding_id},
            {"content_id", b.content_id},
            {"source", b.source == BindingSource::http_json ? "http-json" : "snapshot"},
            {"url", b.url},
            {"refresh_interval", format_duration(b.refresh_interval)},
            {"refresh_interval_ms", b.refresh_interval.count()},
            {"last_refreshed_at", opt_time(b.last_refreshed_at)},
            {"last_error", b.last_error ? json(*b.last_error) : json(nullptr)}};
  if (b.source == BindingSource::http_json) {
    j["path"] = b.path;
    j["template"] = b.value_template;
    j["render"] = b.render == BindingRender::text ? "text" : "bar-chart";
    if (!b.labels.empty()) j["labels"] = b.labels;
  } else {
    j["provider"] = b.provider;
    if (b.crop) {
      j["crop"] = {{"x", b.crop->x}, {"y", b.crop->y}, {"width", b.crop->width},
                   {"height", b.crop->height}};
    }
  }
  return j;
}

DataBinding binding_from_json(const json& j) {
  reject_unknown(j,
                 {"binding_id", "content_id", "source", "url", "path", "template", "render",
                  "labels", "provider", "crop", "refresh_interval", "refresh_interval_ms",
                  "last_refreshed_at", "last_error"},
                 "binding");
  DataBinding b;
  try {
    if (j.contains("binding_id")) b.binding_id = j.at("binding_id").get<std::string>();
    if (j.contains("content_id")) b.content_id = j.at("content_id").get<std::string>();
    const std::string source = j.value("source", std::string("http-json"));
    if (source == "http-json") {
      b.source = BindingSource::http_json;
    } else if (source == "snapshot") {
      b.source = BindingSource::snapshot;
    } else {
      bad("binding source must be http-json or snapshot");
    }
    if (!j.contains("url") || !j.at("url").is_string()) bad("binding url is required");
    b.url = j.at("url").get<std::string>();
    if (b.source == BindingSource::http_json) {
      b.path = j.value("path", std::string());
      b.value_template = j.value("template", std::string("{value}"));
      const std::string mode = j.value("render", std::string("text"));
      if (mode == "text") {
        b.render = BindingRender::text;
      } else if (mode == "bar-chart") {
        b.render = BindingRender::bar_chart;
      } else {
        bad("binding render must be text or bar-chart");
      }
      if (j.contains("labels")) b.labels = j.at("labels").get<std::vector<std::string>>();
    } else {
      b.provider = j.value("provider", std::string("remote-image"));
      if (j.contains("crop") && !j.at("crop").is_null()) {
        const auto& c = j.at("crop");
        reject_unknown(c, {"x", "y", "width", "height"}, "crop");
        b.crop = CropRect{c.value("x", 0), c.value("y", 0), c.at("width").get<int>(),
                          c.at("height").get<int>()};
        if (b.crop->x < 0 || b.crop->y < 0 || b.crop->width <= 0 || b.crop->height <= 0) {
          bad("crop must have a non-negative origin and positive size");
        }
      }
    }
    if (j.contains("refresh_interval") || j.contains("refresh_interval_ms")) {
      b.refresh_interval = read_duration(j, "refresh_interval", "refresh_interval_ms");
    }
    if (b.refresh_interval.count() <= 0) bad("refresh_interval must be positive");
    b.last_refreshed_at = read_opt_time(j, "last_refreshed_at");
    if (j.contains("last_error") && !j.at("last_error").is_null()) {
      b.last_error = j.at("last_error").get<std::string>();
    }
  } catch (const json::exception& e) {
    bad(std::string("bad binding: ") + e.what());
  }
  return b;
}

json content_to_json(const BoundContent& c) {
  json revisions = json::array();
  for (const auto& r : c.revisions) {
    json assets = json::array();
    for (const auto& a : r.assets) assets.push_back(asset_ref_to_json(a));
    revisions.push_back({{"revision", r.revision},
                         {"source", r.source ? json(*r.source) : json(nullptr)},
                         {"created_at", to_ms(r.created_at)},
                         {"assets", std::move(assets)},
                         {"notification", r.notification}});
  }
  json j = {{"content_id", c.content_id},
            {"kind", std::string(to_string(c.kind))},
            {"spec", spec_to_json(c.spec)},
            {"policy", policy_to_json(c.policy)},
            {"view_state",
             {{"view_count", c.view_state.view_count},
              {"first_viewed_at", opt_time(c.view_state.first_viewed_at)},
              {"last_viewed_at", opt_time(c.view_state.last_viewed_at)}}},
            {"revisions", std::move(revisions)},
            {"kt_enabled", c.kt_enabled},
            {"status", std::string(to_string(c.status))},
            {"expiry_reason", c.expiry_reason ? json(std::string(lifecycle::to_string(*c.expiry_reason)))
                                              : json(nullptr)},
            {"created_at", to_ms(c.created_at)},
            {"segment_slots", c.segment_slots}};
  if (c.token) {
    j["token"] = {{"hash", c.token->hash_hex},
                  {"status", std::string(authz::to_string(c.token->status))},
                  {"issued_at", to_ms(c.token->issued_at)}};
  }
  if (c.binding) j["binding"] = binding_to_json(*c.binding);
  return j;
}

BoundContent content_from_json(const json& j) {
  BoundContent c;
  try {
    c.content_id = j.at("content_id").get<std::string>();
    auto kind = parse_content_kind(j.at("kind").get<std::string>());
    if (!kind) bad("unknown kind");
    c.kind = *kind;
    c.spec = spec_from_json(j.at("spec"));
    c.policy = policy_from_json(j.at("policy"));
    const auto& vs = j.at("view_state");
    c.view_state.view_count = vs.at("view_count").get<std::uint64_t>();
    c.view_state.first_viewed_at = read_opt_time(vs, "first_viewed_at");
    c.view_state.last_viewed_at = read_opt_time(vs, "last_viewed_at");
    for (const auto& r : j.at("revisions")) {
      RevisionRecord rec;
      rec.revision = r.at("revision").get<std::uint64_t>();
      if (!r.at("source").is_null()) rec.source = r.at("source").get<std::string>();
      rec.created_at = from_ms(r.at("created_at").get<std::int64_t>());
      for (const auto& a : r.at("assets")) rec.assets.push_back(asset_ref_from_json(a));
      rec.notification = r.value("notification", false);
      c.revisions.push_back(std::move(rec));
    }
    c.kt_enabled = j.at("kt_enabled").get<bool>();
    auto status = parse_content_status(j.at("status").get<std::string>());
    if (!status) bad("unknown status");
    c.status = *status;
    if (!j.at("expiry_reason").is_null()) {
      c.expiry_reason = lifecycle::parse_expiry_reason(j.at("expiry_reason").get<std::string>());
    }
    c.created_at = from_ms(j.at("created_at").get<std::int64_t>());
    c.segment_slots = j.at("segment_slots").get<std::size_t>();
    if (j.contains("token")) {
      const auto& t = j.at("token");
      auto st = authz::parse_token_status(t.at("status").get<std::string>());
      if (!st) bad("unknown token status");
      c.token = authz::TokenRecord{t.at("hash").get<std::string>(), *st,
                                   from_ms(t.at("issued_at").get<std::int64_t>())};
    }
    if (j.contains("binding")) c.binding = binding_from_json(j.at("binding"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("corrupt content metadata: ") + e.what());
  }
  return c;
}

}  // namespace latebind::store
