// Copyright 2026 The latebind Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace latebind {

/// Bytes from the operating system CSPRNG. Throws Error(internal) on failure.
std::vector<std::uint8_t> secure_random_bytes(std::size_t count);

std::string base32_lower(std::span<const std::uint8_t> bytes);
std::string base64url(std::span<const std::uint8_t> bytes);
std::string hex_encode(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> sha256(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::span<const std::uint8_t> bytes);

/// Random identifier of `bits` entropy rendered as lowercase base32.
std::string random_identifier(std::size_t bits);

}  // namespace latebind
