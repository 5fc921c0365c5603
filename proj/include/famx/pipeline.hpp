// End-to-end protection flow: inversion, key mapping, naive mixing,
// augmentation, refinement and template output, plus verification and the
// persisted template format.

#pragma once

#include "famx/backends.hpp"
#include "famx/hash.hpp"
#include "famx/keying.hpp"
#include "famx/optimize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace famx {

struct AugmentationPolicy {
    std::size_t count = 5;
    double sigma_coarse = 0.1;
    double sigma_fine = 0.1; // mid band is never jittered

    void validate() const;
};

struct ProtectedTemplate {
    LatentCode latent;       // z_p*, the refined protected code
    FaceVector face;         // x_p == generate(z_p*)
    std::uint64_t key_id = 0;
    std::string subject_id;
    Sha256Digest config_hash{};
    std::int64_t created_at = 0; // not part of the wire format
};

struct ProtectOptions {
    LossWeights weights;
    OptimizerConfig optimizer;
    AugmentationPolicy augmentation;
    std::uint64_t augmentation_seed = 7;
    std::string subject_id;
    Sha256Digest config_hash{};
    std::int64_t created_at = 0;
};

// Band-limited latent jitter on the coarse and fine bands only; identity
// content in the mid band is untouched. Deterministic given the rng stream.
std::vector<FaceVector> augment(const Backend& backend, const FaceVector& x_r,
                                const BandSpec& bands, const AugmentationPolicy& policy,
                                Rng& rng);

// Full protection flow for one face. When a registry is given the key must
// be active in it. Pure function of (x_r, key, options) otherwise.
ProtectedTemplate protect(const Backend& backend, const BandSpec& bands, const FaceVector& x_r,
                          const ProtectionKey& key, const ProtectOptions& options,
                          const KeyRegistry* registry = nullptr);

struct VerifyResult {
    double score = 0.0;
    bool match = false; // score >= threshold counts as a match
};

VerifyResult verify(const Backend& backend, const ProtectedTemplate& t1,
                    const ProtectedTemplate& t2, double threshold);

// "FAMX" template container, version 1: magic, u16 version, u32 L/d/d_img,
// latent and face as little-endian doubles (layer-major), 8-byte key id,
// 32-byte config hash, length-prefixed UTF-8 subject id. Round trips
// bit-exactly.
std::vector<std::uint8_t> serialize_template(const ProtectedTemplate& t);
ProtectedTemplate deserialize_template(const std::vector<std::uint8_t>& blob);

} // namespace famx
