// SHA-256 helpers (OpenSSL-backed) used for key fingerprints and config hashes.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace famx {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(const void* data, std::size_t len);
Sha256Digest sha256(std::string_view s);

// First 8 bytes of the digest, big-endian, as a 64-bit value.
std::uint64_t digest_prefix64(const Sha256Digest& d);

std::string to_hex(const std::uint8_t* data, std::size_t len);
std::string to_hex(const Sha256Digest& d);

// Strict lowercase/uppercase hex decode; throws std::invalid_argument on
// malformed input or length mismatch.
void from_hex(std::string_view hex, std::uint8_t* out, std::size_t len);

// Domain-separated PRNG seed: first 64 bits of SHA-256(domain || seed_le64).
// Distinct domains decouple streams even when users reuse one seed value.
std::uint64_t derive_seed(std::string_view domain, std::uint64_t seed);

} // namespace famx
