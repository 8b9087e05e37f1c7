// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/bindings/engine.hpp"

#include "latebind/bindings/json_path.hpp"
#include "latebind/bindings/value_template.hpp"
#include "latebind/common/encoding.hpp"
#include "latebind/common/error.hpp"
#include "latebind/common/time_format.hpp"
#include "latebind/lifecycle/policy.hpp"

namespace latebind::bindings {

using store::BindingRender;
using store::BindingSource;
using store::BoundContent;
using store::ContentKind;
using store::DataBinding;

std::string_view to_string(RefreshStatus s) noexcept {
  switch (s) {
    case RefreshStatus::updated: return "updated";
    case RefreshStatus::unchanged: return "unchanged";
    case RefreshStatus::failed: return "failed";
    case RefreshStatus::skipped: return "skipped";
  }
  return "skipped";
}

std::vector<render::ImageAsset> render_for(const render::Renderer& renderer,
                                           const BoundContent& content, std::string_view text,
                                           std::span<const std::string> history, TimePoint now) {
  if (content.kt_enabled && content.kind == ContentKind::self_destruct) {
    const double f =
        lifecycle::elapsed_fraction(content.policy, content.view_state, content.created_at, now);
    return renderer.render_blur_animations(text, content.spec, f);
  }
  if (content.kt_enabled && content.kind == ContentKind::continuous_edit) {
    std::vector<std::string> revisions(history.begin(), history.end());
    revisions.emplace_back(text);
    return renderer.render_history_animations(revisions, content.spec);
  }
  return renderer.render_static(text, content.spec);
}

BindingEngine::BindingEngine(store::ContentStore& store, const render::Renderer& renderer,
                             HttpFetcher& fetcher, SnapshotRegistry& snapshots, Scheduler& scheduler,
                             EngineOptions options)
    : store_(store),
      renderer_(renderer),
      fetcher_(fetcher),
      snapshots_(snapshots),
      scheduler_(scheduler),
      options_(options) {}

void BindingEngine::validate(const DataBinding& b) const {
  if (b.refresh_interval < options_.min_refresh_interval) {
    throw Error(ErrorCode::invalid_argument,
                "refresh_interval " + format_duration(b.refresh_interval) + " is below the minimum " +
                    format_duration(options_.min_refresh_interval));
  }
  if (b.source == BindingSource::http_json) {
    parse_url(b.url);
    JsonPath::parse(b.path);
    validate_template(b.value_template);
  } else if (!snapshots_.find(b.provider)) {
    throw Error(ErrorCode::invalid_argument, "unknown snapshot provider '" + b.provider + "'");
  }
}

Produced BindingEngine::produce(const DataBinding& b, const render::RenderSpec& spec) const {
  Produced out;
  if (b.source == BindingSource::snapshot) {
    auto provider = snapshots_.find(b.provider);
    if (!provider) throw Error(ErrorCode::extract, "unknown snapshot provider '" + b.provider + "'");
    out.assets.push_back(fit_snapshot(provider->capture(b.url), b.crop, spec));
    return out;
  }
  const FetchResponse res = fetcher_.get(b.url);
  nlohmann::json doc = nlohmann::json::parse(res.body, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::extract, "response from " + b.url + " is not JSON");
  const nlohmann::json& value = JsonPath::parse(b.path).extract(doc);
  if (b.render == BindingRender::bar_chart) {
    if (!value.is_array() || value.empty()) {
      throw Error(ErrorCode::extract, "bar chart path must select a non-empty array of numbers");
    }
    std::vector<double> values;
    for (const auto& v : value) {
      if (!v.is_number()) throw Error(ErrorCode::extract, "bar chart values must be numbers");
      values.push_back(v.get<double>());
    }
    std::vector<std::string> labels = b.labels;
    labels.resize(values.size());
    out.source = nlohmann::json{{"values", value}, {"labels", labels}}.dump();
    try {
      out.assets.push_back(renderer_.render_bar_chart(values, labels, spec));
    } catch (const Error& e) {
      throw Error(ErrorCode::extract, e.what());
    }
    return out;
  }
  const std::string text = apply_template(b.value_template, format_value(value));
  out.assets = renderer_.render_static(text, spec);
  out.source = text;
  return out;
}

void BindingEngine::schedule_binding(const std::string& content_id, Duration interval,
                                     bool immediate) {
  scheduler_.upsert(
      binding_job(content_id), interval,
      [this, content_id](TimePoint now) { refresh_once(content_id, now); }, immediate);
}

std::string BindingEngine::register_binding(const std::string& content_id, DataBinding binding,
                                            bool immediate) {
  const BoundContent c = store_.get(content_id);
  if (!store::is_bound_kind(c.kind)) {
    throw Error(ErrorCode::conflict,
                std::string(store::to_string(c.kind)) + " content cannot have a data binding");
  }
  if (c.kind == ContentKind::web_reference && binding.source != BindingSource::snapshot) {
    throw Error(ErrorCode::invalid_argument, "web-reference content needs a snapshot binding");
  }
  if (!c.live()) throw Error(ErrorCode::content_expired, "content " + content_id + " is not live");
  validate(binding);
  binding.content_id = content_id;
  binding.binding_id = random_identifier(80);
  binding.last_refreshed_at.reset();
  binding.last_error.reset();
  store_.update(content_id, [&](BoundContent& m) { m.binding = binding; });
  schedule_binding(content_id, binding.refresh_interval, immediate);
  return binding.binding_id;
}

RefreshOutcome BindingEngine::refresh_once(const std::string& content_id, TimePoint now) {
  RefreshOutcome out;
  BoundContent c;
  try {
    c = store_.get(content_id);
  } catch (const Error&) {
    scheduler_.remove(binding_job(content_id));
    out.reason = "content removed";
    return out;
  }
  if (!c.live()) {
    scheduler_.remove(binding_job(content_id));
    out.reason = "content is " + std::string(store::to_string(c.status));
    return out;
  }
  if (!c.binding) {
    out.reason = "no binding";
    return out;
  }
  const DataBinding binding = *c.binding;
  auto record = [&](std::optional<std::string> error) {
    store_.update(content_id, [&](BoundContent& m) {
      if (!m.binding || m.binding->binding_id != binding.binding_id) return;
      m.binding->last_refreshed_at = now;
      m.binding->last_error = std::move(error);
    });
  };
  try {
    Produced p = produce(binding, c.spec);
    const auto& latest = c.latest();
    bool same = false;
    if (binding.source == BindingSource::snapshot) {
      const auto current = store_.get_latest_asset(content_id, 0);
      same = current.payload == p.assets.front().payload && latest.assets.size() == 1;
    } else {
      same = latest.source && p.source && *latest.source == *p.source;
    }
    if (same) {
      record(std::nullopt);
      out.status = RefreshStatus::unchanged;
      out.revision = latest.revision;
      return out;
    }
    out.revision = store_.put_revision(content_id, p.source, std::move(p.assets), now,
                                       [&](const BoundContent& m) {
                                         if (!m.binding || m.binding->binding_id != binding.binding_id) {
                                           throw Error(ErrorCode::conflict, "binding replaced");
                                         }
                                       });
    record(std::nullopt);
    out.status = RefreshStatus::updated;
  } catch (const Error& e) {
    out.status = RefreshStatus::failed;
    out.reason = std::string(latebind::to_string(e.code())) + ": " + e.what();
    try {
      record(out.reason);
    } catch (const Error&) {
    }
  }
  return out;
}

RefreshOutcome BindingEngine::regenerate_kt(const std::string& content_id, TimePoint now) {
  RefreshOutcome out;
  BoundContent c;
  try {
    c = store_.get(content_id);
  } catch (const Error&) {
    scheduler_.remove(kt_job(content_id));
    out.reason = "content removed";
    return out;
  }
  if (!c.live()) {
    scheduler_.remove(kt_job(content_id));
    out.reason = "content is " + std::string(store::to_string(c.status));
    return out;
  }
  if (!c.kt_enabled || c.kind != ContentKind::self_destruct || !c.latest().source) {
    out.reason = "no blur animation";
    return out;
  }
  try {
    const std::string text = *c.latest().source;
    auto assets = render_for(renderer_, c, text, {}, now);
    const auto current = store_.latest_assets(content_id);
    bool same = assets.size() == c.latest().assets.size();
    for (std::size_t i = 0; same && i < assets.size(); ++i) {
      same = assets[i].payload == current[i].payload;
    }
    if (same) {
      out.status = RefreshStatus::unchanged;
      out.revision = c.latest_revision();
      return out;
    }
    out.revision = store_.put_revision(content_id, text, std::move(assets), now,
                                       [&](const BoundContent& m) {
                                         if (m.latest_revision() != c.latest_revision()) {
                                           throw Error(ErrorCode::conflict, "edited concurrently");
                                         }
                                       });
    out.status = RefreshStatus::updated;
  } catch (const Error& e) {
    out.status = RefreshStatus::failed;
    out.reason = e.what();
  }
  return out;
}

void BindingEngine::schedule_kt(const std::string& content_id) {
  scheduler_.upsert(
      kt_job(content_id), options_.kt_interval,
      [this, content_id](TimePoint now) { regenerate_kt(content_id, now); }, false);
}

void BindingEngine::unschedule(const std::string& content_id) {
  scheduler_.remove(binding_job(content_id));
  scheduler_.remove(kt_job(content_id));
}

void BindingEngine::restore() {
  for (const auto& id : store_.list()) {
    const BoundContent c = store_.get(id);
    if (!c.live()) continue;
    if (c.binding) schedule_binding(id, c.binding->refresh_interval, true);
    if (c.kt_enabled && c.kind == ContentKind::self_destruct) schedule_kt(id);
  }
}

}  // namespace latebind::bindings
