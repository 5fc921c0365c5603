// Revocable protection keys, the key-to-latent mapping and key lifecycle.
//
// A key is a 256-bit uniform secret; its fingerprint (key_id) is the first
// 64 bits of SHA-256(secret). The key-to-latent map seeds a famx-prng-v1
// stream with the first 64 bits of SHA-256(secret || "famx-latent-v1"),
// draws a standard-normal base vector, pushes it through the backend's
// mapping network and broadcasts the result to all L layers.

#pragma once

#include "famx/latent.hpp"
#include "famx/numcore.hpp"
#include "famx/rng.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace famx {

struct ProtectionKey {
    std::array<std::uint8_t, 32> secret{};

    std::uint64_t key_id() const;
    std::string secret_hex() const;          // 64 lowercase hex characters
    std::string key_id_hex() const;          // 16 lowercase hex characters
    std::uint64_t latent_seed() const;       // PRNG seed for key_to_latent

    static ProtectionKey from_hex(const std::string& hex);
    bool operator==(const ProtectionKey& other) const { return secret == other.secret; }
};

// Single-hidden-layer mapping network: base -> tanh(W base + b).
struct MappingNetwork {
    Matrix w;
    Vector b;

    Vector apply(const Vector& base) const { return affine_tanh(w, b, base); }
};

// Issues a fresh key from the given PRNG stream.
ProtectionKey issue_key(Rng& rng);

// Deterministic synthetic latent for a key: the mapped base vector broadcast
// to all L layers. Pure function of (secret, mapper parameters, L, d).
LatentCode key_to_latent(const ProtectionKey& key, const MappingNetwork& mapper,
                         std::size_t layers, std::size_t dim);

enum class KeyAction { Issue, Revoke };

struct KeyEvent {
    std::int64_t timestamp; // seconds; logical under a deterministic clock
    std::uint64_t key_id;
    KeyAction action;
};

// Append-only key status registry. A revoked key never returns to active.
class KeyRegistry {
public:
    void record_issue(std::uint64_t key_id, std::int64_t timestamp);
    // Idempotent; throws std::invalid_argument for an unknown key_id.
    void revoke(std::uint64_t key_id, std::int64_t timestamp);
    bool is_known(std::uint64_t key_id) const;
    bool is_active(std::uint64_t key_id) const;

    const std::vector<KeyEvent>& events() const { return events_; }

    // Line-oriented log: "<timestamp>\t<key_id hex16>\t<issue|revoke>".
    std::string serialize() const;
    static KeyRegistry parse(const std::string& text);

private:
    std::vector<KeyEvent> events_;
    std::map<std::uint64_t, bool> active_;
};

} // namespace famx
