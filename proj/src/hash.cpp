#include "famx/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace famx {

Sha256Digest sha256(const void* data, std::size_t len) {
    Sha256Digest out{};
    unsigned int out_len = 0;
    if (EVP_Digest(data, len, out.data(), &out_len, EVP_sha256(), nullptr) != 1 ||
        out_len != out.size()) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    return out;
}

Sha256Digest sha256(std::string_view s) { return sha256(s.data(), s.size()); }

std::uint64_t digest_prefix64(const Sha256Digest& d) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[std::size_t(i)];
    return v;
}

static constexpr char kHexChars[] = "0123456789abcdef";

std::string to_hex(const std::uint8_t* data, std::size_t len) {
    std::string s;
    s.reserve(len * 2);
    for (std::size_t i = 0; i < len; ++i) {
        s.push_back(kHexChars[data[i] >> 4]);
        s.push_back(kHexChars[data[i] & 0x0f]);
    }
    return s;
}

std::string to_hex(const Sha256Digest& d) { return to_hex(d.data(), d.size()); }

static int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw std::invalid_argument("invalid hex character");
}

void from_hex(std::string_view hex, std::uint8_t* out, std::size_t len) {
    if (hex.size() != len * 2) throw std::invalid_argument("hex string length mismatch");
    for (std::size_t i = 0; i < len; ++i) {
        out[i] = std::uint8_t((hex_nibble(hex[2 * i]) << 4) | hex_nibble(hex[2 * i + 1]));
    }
}

std::uint64_t derive_seed(std::string_view domain, std::uint64_t seed) {
    std::string material(domain);
    for (int i = 0; i < 8; ++i) material.push_back(char(std::uint8_t(seed >> (8 * i))));
    return digest_prefix64(sha256(material));
}

} // namespace famx
