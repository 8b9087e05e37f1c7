// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#include "latebind/authz/token.hpp"

#include <openssl/crypto.h>
#include <sys/stat.h>

#include <fstream>
#include <iterator>

#include "latebind/common/encoding.hpp"
#include "latebind/common/error.hpp"

namespace latebind::authz {

std::string_view to_string(TokenStatus status) noexcept {
  return status == TokenStatus::active ? "active" : "revoked";
}

std::optional<TokenStatus> parse_token_status(std::string_view text) noexcept {
  if (text == "active") return TokenStatus::active;
  if (text == "revoked") return TokenStatus::revoked;
  return std::nullopt;
}

std::string_view to_string(Validation v) noexcept {
  switch (v) {
    case Validation::authorized: return "authorized";
    case Validation::revoked: return "revoked";
    case Validation::invalid: return "invalid";
  }
  return "invalid";
}

void InMemoryTokenRepository::add_subject(const std::string& content_id) {
  std::unique_lock lock(mu_);
  subjects_.insert(content_id);
}

bool InMemoryTokenRepository::has_subject(const std::string& content_id) const {
  std::shared_lock lock(mu_);
  return subjects_.count(content_id) != 0;
}

bool InMemoryTokenRepository::insert_token(const std::string& content_id, const TokenRecord& record) {
  std::unique_lock lock(mu_);
  return records_.emplace(content_id, record).second;
}

std::optional<TokenRecord> InMemoryTokenRepository::find_token(const std::string& content_id) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(content_id);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void InMemoryTokenRepository::mark_revoked(const std::string& content_id) {
  std::unique_lock lock(mu_);
  auto it = records_.find(content_id);
  if (it != records_.end()) it->second.status = TokenStatus::revoked;
}

bool digest_equal(std::string_view a, std::string_view b) noexcept {
  if (a.size() != b.size()) return false;
  return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

TokenRegistry::TokenRegistry(TokenRepository& repo, std::vector<std::uint8_t> salt,
                             const Clock& clock)
    : repo_(repo), salt_(std::move(salt)), clock_(clock) {
  if (salt_.empty()) throw Error(ErrorCode::invalid_argument, "token salt must not be empty");
}

std::vector<std::uint8_t> TokenRegistry::load_or_create_salt(const std::filesystem::path& path) {
  {
    std::ifstream in(path, std::ios::binary);
    if (in) {
      std::vector<std::uint8_t> salt((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
      if (salt.size() == kSaltBytes) return salt;
      throw Error(ErrorCode::io, "salt file " + path.string() + " is corrupt");
    }
  }
  auto salt = secure_random_bytes(kSaltBytes);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(salt.data()), static_cast<std::streamsize>(salt.size()));
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp);
  }
  ::chmod(tmp.c_str(), 0600);
  std::filesystem::rename(tmp, path);
  return salt;
}

std::string TokenRegistry::hash(std::string_view token) const {
  std::vector<std::uint8_t> buf(salt_);
  buf.insert(buf.end(), token.begin(), token.end());
  return sha256_hex(buf);
}

std::string TokenRegistry::issue(const std::string& content_id) {
  if (!repo_.has_subject(content_id)) {
    throw Error(ErrorCode::not_found, "unknown content " + content_id);
  }
  const std::string token = base64url(secure_random_bytes(kTokenBytes));
  TokenRecord record{hash(token), TokenStatus::active, clock_.now()};
  if (!repo_.insert_token(content_id, record)) {
    throw Error(ErrorCode::conflict, "token already issued for " + content_id);
  }
  return token;
}

Validation TokenRegistry::validate(std::string_view presented, const std::string& content_id) const {
  if (presented.empty()) return Validation::invalid;
  const auto record = repo_.find_token(content_id);
  if (!record) return Validation::invalid;
  if (!digest_equal(hash(presented), record->hash_hex)) return Validation::invalid;
  return record->status == TokenStatus::active ? Validation::authorized : Validation::revoked;
}

void TokenRegistry::revoke(const std::string& content_id) { repo_.mark_revoked(content_id); }

}  // namespace latebind::authz
