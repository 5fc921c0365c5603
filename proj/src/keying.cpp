#include "famx/keying.hpp"

#include "famx/hash.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>
#include <stdexcept>

namespace famx {

std::uint64_t ProtectionKey::key_id() const {
    return digest_prefix64(sha256(secret.data(), secret.size()));
}

std::string ProtectionKey::secret_hex() const {
    return to_hex(secret.data(), secret.size());
}

std::string ProtectionKey::key_id_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(key_id()));
    return std::string(buf);
}

std::uint64_t ProtectionKey::latent_seed() const {
    static constexpr char kDomain[] = "famx-latent-v1";
    std::vector<std::uint8_t> buf(secret.begin(), secret.end());
    buf.insert(buf.end(), kDomain, kDomain + sizeof(kDomain) - 1);
    return digest_prefix64(sha256(buf.data(), buf.size()));
}

ProtectionKey ProtectionKey::from_hex(const std::string& hex) {
    ProtectionKey key;
    famx::from_hex(hex, key.secret.data(), key.secret.size());
    return key;
}

ProtectionKey issue_key(Rng& rng) {
    ProtectionKey key;
    for (std::size_t i = 0; i < key.secret.size(); i += 8) {
        const std::uint64_t word = rng.next_u64();
        for (std::size_t b = 0; b < 8; ++b) {
            key.secret[i + b] = std::uint8_t(word >> (8 * b));
        }
    }
    return key;
}

LatentCode key_to_latent(const ProtectionKey& key, const MappingNetwork& mapper,
                         std::size_t layers, std::size_t dim) {
    if (mapper.w.rows() != dim) {
        throw std::invalid_argument("key_to_latent: mapper output dim != latent layer dim");
    }
    Rng rng(key.latent_seed());
    const Vector base = rng.gaussian_vector(mapper.w.cols());
    const Vector mapped = mapper.apply(base);
    LatentCode z(layers, dim);
    for (std::size_t l = 0; l < layers; ++l) {
        std::memcpy(z.layer(l), mapped.data(), dim * sizeof(double));
    }
    return z;
}

void KeyRegistry::record_issue(std::uint64_t key_id, std::int64_t timestamp) {
    events_.push_back({timestamp, key_id, KeyAction::Issue});
    // Issuing an already-revoked id does not resurrect it.
    if (!active_.contains(key_id)) active_[key_id] = true;
}

void KeyRegistry::revoke(std::uint64_t key_id, std::int64_t timestamp) {
    auto it = active_.find(key_id);
    if (it == active_.end()) throw std::invalid_argument("revoke: unknown key_id");
    if (!it->second) return; // already revoked, idempotent
    events_.push_back({timestamp, key_id, KeyAction::Revoke});
    it->second = false;
}

bool KeyRegistry::is_known(std::uint64_t key_id) const { return active_.contains(key_id); }

bool KeyRegistry::is_active(std::uint64_t key_id) const {
    auto it = active_.find(key_id);
    return it != active_.end() && it->second;
}

std::string KeyRegistry::serialize() const {
    std::ostringstream out;
    for (const auto& e : events_) {
        char id[17];
        std::snprintf(id, sizeof(id), "%016llx", static_cast<unsigned long long>(e.key_id));
        out << e.timestamp << '\t' << id << '\t'
            << (e.action == KeyAction::Issue ? "issue" : "revoke") << '\n';
    }
    return out.str();
}

KeyRegistry KeyRegistry::parse(const std::string& text) {
    KeyRegistry reg;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::int64_t ts;
        std::string id_hex, action;
        if (!(ls >> ts >> id_hex >> action) || id_hex.size() != 16) {
            throw std::invalid_argument("KeyRegistry::parse: malformed line: " + line);
        }
        std::uint8_t id_bytes[8];
        from_hex(id_hex, id_bytes, 8);
        std::uint64_t id = 0;
        for (int i = 0; i < 8; ++i) id = (id << 8) | id_bytes[i];
        if (action == "issue") reg.record_issue(id, ts);
        else if (action == "revoke") reg.revoke(id, ts);
        else throw std::invalid_argument("KeyRegistry::parse: unknown action: " + action);
    }
    return reg;
}

} // namespace famx
