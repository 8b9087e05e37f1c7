// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include <sys/stat.h>

#include <fstream>
#include <iterator>
#include <set>

#include "doctest.h"
#include "latebind/common/encoding.hpp"
#include "latebind/common/error.hpp"
#include "stack.hpp"

using namespace latebind;
using namespace latebind::authz;

namespace {

std::vector<std::uint8_t> fixed_salt() { return std::vector<std::uint8_t>(32, 0x5a); }

std::string slurp_tree(const std::filesystem::path& root) {
  std::string all;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    all.append(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return all;
}

}  // namespace

TEST_CASE("issue, validate and revoke round trip") {
  InMemoryTokenRepository repo;
  ManualClock clock;
  TokenRegistry reg(repo, fixed_salt(), clock);
  CHECK_THROWS_AS(reg.issue("missing"), Error);
  repo.add_subject("c1");
  const std::string tok = reg.issue("c1");
  CHECK(tok.size() == 22);  // 16 bytes, unpadded base64url
  CHECK(tok.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_") ==
        std::string::npos);
  CHECK(reg.validate(tok, "c1") == Validation::authorized);
  try {
    reg.issue("c1");
    FAIL("second issue must fail");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::conflict);
  }
  CHECK(reg.validate("", "c1") == Validation::invalid);
  CHECK(reg.validate(tok + "x", "c1") == Validation::invalid);
  CHECK(reg.validate(tok, "c2") == Validation::invalid);
  reg.revoke("c1");
  CHECK(reg.validate(tok, "c1") == Validation::revoked);
  CHECK_NOTHROW(reg.revoke("c1"));
  CHECK(reg.validate(tok, "c1") == Validation::revoked);
  repo.add_subject("c3");
  CHECK_NOTHROW(reg.revoke("c3"));
  CHECK_FALSE(repo.find_token("c3").has_value());
  CHECK_NOTHROW(reg.revoke("unknown"));
}

TEST_CASE("only the salted hash is stored") {
  InMemoryTokenRepository repo;
  ManualClock clock;
  TokenRegistry reg(repo, fixed_salt(), clock);
  repo.add_subject("c");
  const std::string tok = reg.issue("c");
  const auto rec = repo.find_token("c");
  REQUIRE(rec);
  CHECK(rec->status == TokenStatus::active);
  CHECK(rec->issued_at == clock.now());
  std::vector<std::uint8_t> material = fixed_salt();
  material.insert(material.end(), tok.begin(), tok.end());
  CHECK(rec->hash_hex == sha256_hex(material));
  CHECK(rec->hash_hex.find(tok) == std::string::npos);

  // A different deployment salt gives a different digest.
  InMemoryTokenRepository other;
  TokenRegistry reg2(other, std::vector<std::uint8_t>(32, 1), clock);
  CHECK(reg2.hash(tok) != reg.hash(tok));
}

TEST_CASE("tokens across 10^4 contents are pairwise distinct") {
  InMemoryTokenRepository repo;
  ManualClock clock;
  TokenRegistry reg(repo, fixed_salt(), clock);
  std::set<std::string> seen;
  for (int i = 0; i < 10000; ++i) {
    const std::string id = "c" + std::to_string(i);
    repo.add_subject(id);
    seen.insert(reg.issue(id));
  }
  CHECK(seen.size() == 10000);
}

TEST_CASE("digest comparison") {
  CHECK(digest_equal("abcd", "abcd"));
  CHECK_FALSE(digest_equal("abcd", "abce"));
  CHECK_FALSE(digest_equal("abcd", "abc"));
  CHECK_FALSE(digest_equal("", "a"));
  CHECK(digest_equal("", ""));
}

TEST_CASE("salt file is created once with owner-only mode") {
  testing::TempDir dir;
  const auto path = dir.path() / "salt";
  const auto a = TokenRegistry::load_or_create_salt(path);
  CHECK(a.size() == TokenRegistry::kSaltBytes);
  struct stat st {};
  REQUIRE(::stat(path.c_str(), &st) == 0);
  CHECK((st.st_mode & 0777) == 0600);
  CHECK(TokenRegistry::load_or_create_salt(path) == a);
}

TEST_CASE("persisted store never contains a clear token") {
  testing::Stack s;
  const auto c = s.create(store::ContentKind::continuous_edit, "hello");
  const auto d = s.create(store::ContentKind::self_destruct, "world");
  const std::string disk = slurp_tree(s.dir.path());
  CHECK(disk.find(c.token) == std::string::npos);
  CHECK(disk.find(d.token) == std::string::npos);
  CHECK(s.tokens.validate(c.token, c.id) == Validation::authorized);
  CHECK(s.tokens.validate(c.token, d.id) == Validation::invalid);
}
