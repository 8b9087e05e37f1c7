// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <fstream>
#include <iterator>
#include <set>
#include <thread>

#include "doctest.h"
#include "image_oracle.hpp"
#include "latebind/common/error.hpp"
#include "latebind/common/time_format.hpp"
#include "stack.hpp"

using namespace latebind;
using namespace latebind::store;
using latebind::testing::shared_renderer;
using latebind::testing::Stack;
using namespace std::chrono_literals;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::internal;
}

std::vector<render::ImageAsset> two_segments(const std::string& tag) {
  std::string text;
  for (int i = 0; i < 40; ++i) text += tag + " " + std::to_string(i) + "\n";
  auto assets = shared_renderer().render_static(text, render::RenderSpec{});
  REQUIRE(assets.size() == 2);
  return assets;
}

std::size_t asset_files(const std::filesystem::path& dir) {
  std::size_t n = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().parent_path().filename() == "assets") ++n;
  }
  return n;
}

}  // namespace

TEST_CASE("content ids are 160-bit lowercase base32") {
  Stack s;
  std::set<std::string> ids;
  for (int i = 0; i < 200; ++i) {
    const std::string id = s.store.new_content_id();
    CHECK(id.size() == 32);
    CHECK(id.find_first_not_of("abcdefghijklmnopqrstuvwxyz234567") == std::string::npos);
    ids.insert(id);
  }
  CHECK(ids.size() == 200);
}

TEST_CASE("revisions append and the latest is served") {
  Stack s;
  const auto c = s.create(ContentKind::continuous_edit, "first");
  CHECK(s.store.get(c.id).latest_revision() == 1);
  const auto v1 = s.store.get_latest_asset(c.id, 0);
  CHECK(v1.revision == 1);
  auto assets = shared_renderer().render_static("second", render::RenderSpec{});
  const auto expected = assets[0].payload;
  CHECK(s.store.put_revision(c.id, "second", assets, s.clock.now()) == 2);
  const auto v2 = s.store.get_latest_asset(c.id, 0);
  CHECK(v2.revision == 2);
  CHECK(v2.payload == expected);
  CHECK(*s.store.get(c.id).latest().source == "second");
  CHECK(code_of([&] { s.store.get_latest_asset(c.id, 1); }) == ErrorCode::not_found);
  CHECK(code_of([&] { s.store.get_latest_asset("missing", 0); }) == ErrorCode::not_found);
  CHECK(code_of([&] { s.store.put_revision("missing", "x", assets, s.clock.now()); }) ==
        ErrorCode::not_found);
  CHECK(code_of([&] { s.store.put_revision(c.id, "x", two_segments("x"), s.clock.now()); }) ==
        ErrorCode::conflict);
}

TEST_CASE("surplus segment slots serve a transparent pixel") {
  Stack s;
  std::string text;
  for (int i = 0; i < 40; ++i) text += "line\n";
  const auto c = s.create(ContentKind::continuous_edit, text);
  REQUIRE(s.store.get(c.id).segment_slots == 2);
  s.store.put_revision(c.id, "short", shared_renderer().render_static("short", render::RenderSpec{}),
                       s.clock.now());
  const auto extra = s.store.get_latest_asset(c.id, 1);
  CHECK(extra.width == 1);
  CHECK(extra.height == 1);
  CHECK(code_of([&] { s.store.get_latest_asset(c.id, 2); }) == ErrorCode::not_found);
}

TEST_CASE("put on retired content fails with content-expired") {
  Stack s;
  const auto c = s.create(ContentKind::self_destruct, "bye");
  s.lifecycle.expire_content(c.id, lifecycle::ExpiryReason::view_limit, s.clock.now());
  CHECK(code_of([&] {
          s.store.put_revision(c.id, "x", shared_renderer().render_static("x", render::RenderSpec{}),
                               s.clock.now());
        }) == ErrorCode::content_expired);
}

TEST_CASE("guard runs under the content lock and can veto a revision") {
  Stack s;
  const auto c = s.create(ContentKind::continuous_edit, "guarded");
  auto assets = shared_renderer().render_static("vetoed", render::RenderSpec{});
  CHECK(code_of([&] {
          s.store.put_revision(c.id, "vetoed", assets, s.clock.now(), [](const BoundContent&) {
            throw Error(ErrorCode::forbidden, "no");
          });
        }) == ErrorCode::forbidden);
  CHECK(s.store.get(c.id).latest_revision() == 1);
}

TEST_CASE("concurrent puts get distinct ordinals and the latest is whole") {
  Stack s;
  store::BoundContent meta;
  meta.content_id = s.store.new_content_id();
  meta.kind = ContentKind::continuous_edit;
  s.store.create(meta, "base", two_segments("base"), s.clock.now());
  const auto a = two_segments("alpha");
  const auto b = two_segments("beta");
  std::uint64_t ra = 0;
  std::uint64_t rb = 0;
  std::thread ta([&] { ra = s.store.put_revision(meta.content_id, "alpha", a, s.clock.now()); });
  std::thread tb([&] { rb = s.store.put_revision(meta.content_id, "beta", b, s.clock.now()); });
  ta.join();
  tb.join();
  CHECK(ra != rb);
  CHECK(std::set<std::uint64_t>{ra, rb} == std::set<std::uint64_t>{2, 3});
  const auto latest = s.store.latest_assets(meta.content_id);
  REQUIRE(latest.size() == 2);
  const auto& winner = ra > rb ? a : b;
  CHECK(latest[0].payload == winner[0].payload);
  CHECK(latest[1].payload == winner[1].payload);
}

TEST_CASE("interleaved puts and gets never observe a torn revision") {
  Stack s;
  store::BoundContent meta;
  meta.content_id = s.store.new_content_id();
  meta.kind = ContentKind::continuous_edit;
  std::vector<std::vector<render::ImageAsset>> versions;
  for (int v = 0; v < 6; ++v) versions.push_back(two_segments("v" + std::to_string(v)));
  s.store.create(meta, "v0", versions[0], s.clock.now());
  std::map<std::vector<std::uint8_t>, std::pair<int, std::size_t>> owner;  // bytes -> version, segment
  for (int v = 0; v < 6; ++v) {
    for (std::size_t seg = 0; seg < 2; ++seg) owner[versions[v][seg].payload] = {v, seg};
  }
  std::atomic<bool> done{false};
  std::atomic<int> bad{0};
  std::atomic<int> reads{0};
  std::vector<std::thread> readers;
  for (int r = 0; r < 4; ++r) {
    readers.emplace_back([&] {
      std::uint64_t last = 0;
      while (!done) {
        const auto pair = s.store.latest_assets(meta.content_id);
        const auto it0 = owner.find(pair.at(0).payload);
        const auto it1 = owner.find(pair.at(1).payload);
        if (it0 == owner.end() || it1 == owner.end() || it0->second.first != it1->second.first ||
            pair[0].revision != pair[1].revision || pair[0].revision < last) {
          ++bad;
        }
        last = pair[0].revision;
        const auto one = s.store.get_latest_asset(meta.content_id, 1);
        if (!owner.count(one.payload) || one.revision < last) ++bad;
        ++reads;
      }
    });
  }
  for (int round = 0; round < 30; ++round) {
    const int v = 1 + round % 5;
    s.store.put_revision(meta.content_id, "v" + std::to_string(v), versions[v], s.clock.now());
  }
  done = true;
  for (auto& t : readers) t.join();
  CHECK(bad == 0);
  CHECK(reads > 0);
}

TEST_CASE("state survives a restart") {
  testing::TempDir dir;
  ManualClock clock;
  std::string id;
  std::vector<std::uint8_t> bytes;
  {
    ContentStore st({dir.path(), 20, true});
    BoundContent meta;
    meta.content_id = id = st.new_content_id();
    meta.kind = ContentKind::self_destruct;
    meta.policy.max_views = 4;
    st.create(meta, "persist me", shared_renderer().render_static("persist me", render::RenderSpec{}),
              clock.now());
    auto next = shared_renderer().render_static("updated", render::RenderSpec{});
    bytes = next[0].payload;
    st.put_revision(id, "updated", next, clock.now());
    st.update(id, [](BoundContent& c) { c.view_state.view_count = 2; });
  }
  ContentStore again({dir.path(), 20, true});
  REQUIRE(again.contains(id));
  const auto c = again.get(id);
  CHECK(c.latest_revision() == 2);
  CHECK(c.view_state.view_count == 2);
  CHECK(c.policy.max_views == 4u);
  CHECK(again.get_latest_asset(id, 0).payload == bytes);
  CHECK(again.list() == std::vector<std::string>{id});
}

TEST_CASE("revision cap trims old revisions and their files") {
  Stack s(3);
  const auto c = s.create(ContentKind::continuous_edit, "r1");
  for (int i = 2; i <= 10; ++i) {
    const std::string text = "r" + std::to_string(i);
    s.store.put_revision(c.id, text, shared_renderer().render_static(text, render::RenderSpec{}),
                         s.clock.now());
  }
  const auto meta = s.store.get(c.id);
  REQUIRE(meta.revisions.size() == 3);
  CHECK(meta.revisions.front().revision == 8);
  CHECK(meta.latest_revision() == 10);
  CHECK(asset_files(s.dir.path()) == 3);
}

TEST_CASE("purge source") {
  Stack s;
  const auto c = s.create(ContentKind::self_destruct, "classified");
  CHECK(code_of([&] { s.store.purge_source(c.id); }) == ErrorCode::conflict);
  CHECK(code_of([&] { s.store.purge_source("unknown"); }) == ErrorCode::not_found);
  const auto before = s.store.get_latest_asset(c.id, 0).payload;
  s.lifecycle.expire_content(c.id, lifecycle::ExpiryReason::absolute_expiry, s.clock.now());
  CHECK_NOTHROW(s.store.purge_source(c.id));
  CHECK_NOTHROW(s.store.purge_source(c.id));
  const auto meta = s.store.get(c.id);
  REQUIRE(meta.revisions.size() == 1);
  CHECK(meta.revisions[0].notification);
  CHECK_FALSE(meta.revisions[0].source);
  CHECK(asset_files(s.dir.path()) == 1);
  CHECK(s.store.get_latest_asset(c.id, 0).payload != before);
  // Nothing on disk still holds the text.
  for (const auto& e : std::filesystem::recursive_directory_iterator(s.dir.path())) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    const std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(body.find("classified") == std::string::npos);
  }
}

TEST_CASE("metadata json round trip") {
  BoundContent c;
  c.content_id = "abc";
  c.kind = ContentKind::dashboard;
  c.spec.font_size = 16;
  c.policy.absolute_expiry = TimePoint{Duration{1'900'000'000'123}};
  c.policy.after_first_view = 90s;
  c.policy.max_views = 3;
  c.view_state = {2, TimePoint{Duration{5}}, TimePoint{Duration{9}}};
  c.kt_enabled = true;
  c.created_at = TimePoint{Duration{1}};
  c.segment_slots = 2;
  c.token = authz::TokenRecord{"ff", authz::TokenStatus::revoked, TimePoint{Duration{3}}};
  DataBinding b;
  b.binding_id = "b1";
  b.content_id = "abc";
  b.url = "http://x/y";
  b.path = "a.b[0]";
  b.value_template = "v={value}";
  b.refresh_interval = 5s;
  b.last_error = "boom";
  c.binding = b;
  RevisionRecord r;
  r.revision = 4;
  r.source = "text";
  r.assets.push_back({0, "d1", render::ImageFormat::animated, 10, 20, 30, 10});
  c.revisions.push_back(r);
  const auto back = content_from_json(content_to_json(c));
  CHECK(back.content_id == c.content_id);
  CHECK(back.kind == c.kind);
  CHECK(back.spec == c.spec);
  CHECK(back.policy == c.policy);
  CHECK(back.view_state == c.view_state);
  CHECK(back.kt_enabled);
  CHECK(back.segment_slots == 2);
  CHECK(back.token == c.token);
  REQUIRE(back.binding);
  CHECK(back.binding->path == "a.b[0]");
  CHECK(back.binding->refresh_interval == 5s);
  CHECK(back.binding->last_error == "boom");
  REQUIRE(back.revisions.size() == 1);
  CHECK(back.revisions[0].assets[0] == r.assets[0]);
  CHECK(back.revisions[0].source == "text");
}

TEST_CASE("policy and spec json parsing") {
  const auto p = policy_from_json(nlohmann::json{{"after_first_view", "3d"}, {"max_views", 2}});
  CHECK(p.after_first_view == std::chrono::duration_cast<Duration>(72h));
  CHECK(p.max_views == 2u);
  CHECK_THROWS_AS(policy_from_json(nlohmann::json{{"max_views", 0}}), Error);
  CHECK_THROWS_AS(policy_from_json(nlohmann::json{{"after_first_view", "soon"}}), Error);
  const auto q = policy_from_json(nlohmann::json{{"absolute_expiry", "2030-01-02T03:04:05Z"}});
  CHECK(format_iso8601(*q.absolute_expiry) == "2030-01-02T03:04:05.000Z");
  const auto spec = spec_from_json(nlohmann::json{{"font_size", 18}, {"text_color", "#ff0000"}});
  CHECK(spec.font_size == 18);
  CHECK(spec.text_color == render::Rgba{255, 0, 0, 255});
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"colour", "red"}}), Error);
  CHECK_THROWS_AS(spec_from_json(nlohmann::json{{"target_width", 400}}), Error);
}
