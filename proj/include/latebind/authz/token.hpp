// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "latebind/common/clock.hpp"

namespace latebind::authz {

enum class TokenStatus { active, revoked };

std::string_view to_string(TokenStatus status) noexcept;
std::optional<TokenStatus> parse_token_status(std::string_view text) noexcept;

/// Server-side record. The clear token is never stored.
struct TokenRecord {
  std::string hash_hex;  // sha256(salt || token)
  TokenStatus status = TokenStatus::active;
  TimePoint issued_at{};

  friend bool operator==(const TokenRecord&, const TokenRecord&) = default;
};

enum class Validation { authorized, revoked, invalid };

std::string_view to_string(Validation v) noexcept;

/// Storage for token records, keyed by content id.
class TokenRepository {
 public:
  virtual ~TokenRepository() = default;

  virtual bool has_subject(const std::string& content_id) const = 0;
  /// Inserts unless a record already exists; returns false in that case.
  virtual bool insert_token(const std::string& content_id, const TokenRecord& record) = 0;
  virtual std::optional<TokenRecord> find_token(const std::string& content_id) const = 0;
  /// active -> revoked. No-op when revoked already or when there is no record.
  virtual void mark_revoked(const std::string& content_id) = 0;
};

class InMemoryTokenRepository final : public TokenRepository {
 public:
  void add_subject(const std::string& content_id);

  bool has_subject(const std::string& content_id) const override;
  bool insert_token(const std::string& content_id, const TokenRecord& record) override;
  std::optional<TokenRecord> find_token(const std::string& content_id) const override;
  void mark_revoked(const std::string& content_id) override;

 private:
  mutable std::shared_mutex mu_;
  std::set<std::string> subjects_;
  std::map<std::string, TokenRecord> records_;
};

class TokenRegistry {
 public:
  static constexpr std::size_t kTokenBytes = 16;
  static constexpr std::size_t kSaltBytes = 32;

  TokenRegistry(TokenRepository& repo, std::vector<std::uint8_t> salt, const Clock& clock);

  /// Reads the deployment salt, creating it (mode 0600) on first use.
  static std::vector<std::uint8_t> load_or_create_salt(const std::filesystem::path& path);

  /// Returns the clear token exactly once. Errors: not_found, conflict.
  std::string issue(const std::string& content_id);
  Validation validate(std::string_view presented, const std::string& content_id) const;
  void revoke(const std::string& content_id);

  std::string hash(std::string_view token) const;

 private:
  TokenRepository& repo_;
  std::vector<std::uint8_t> salt_;
  const Clock& clock_;
};

/// Constant-time equality of two hex digests.
bool digest_equal(std::string_view a, std::string_view b) noexcept;

}  // namespace latebind::authz
