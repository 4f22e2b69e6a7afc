#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace scpatcher {

/// Lowercase hex SHA-256 of `data` (64 chars).
std::string sha256_hex(std::string_view data);

/// First 16 hex characters of the SHA-256; used for content-addressed ids.
std::string short_digest(std::string_view data);

/// 64-bit FNV-1a. Stable across platforms, used for feature hashing.
constexpr std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace scpatcher
