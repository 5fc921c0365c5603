#include "famx/pipeline.hpp"

#include <cstring>
#include <stdexcept>

namespace famx {

void AugmentationPolicy::validate() const {
    if (count < 1) throw std::invalid_argument("AugmentationPolicy: count must be >= 1");
    if (sigma_coarse < 0.0 || sigma_fine < 0.0) {
        throw std::invalid_argument("AugmentationPolicy: sigma must be >= 0");
    }
}

std::vector<FaceVector> augment(const Backend& backend, const FaceVector& x_r,
                                const BandSpec& bands, const AugmentationPolicy& policy,
                                Rng& rng) {
    policy.validate();
    const LatentCode z_r = backend.invert(x_r);
    const std::size_t d = z_r.layer_dim();
    std::vector<FaceVector> out;
    out.reserve(policy.count);
    for (std::size_t i = 0; i < policy.count; ++i) {
        LatentCode z = z_r;
        for (std::size_t l = 0; l < z.layer_count(); ++l) {
            if (bands.in_mid(l)) continue;
            const double sigma = l < bands.coarse_end ? policy.sigma_coarse : policy.sigma_fine;
            if (sigma == 0.0) continue;
            double* layer = z.layer(l);
            for (std::size_t c = 0; c < d; ++c) layer[c] += sigma * rng.gaussian();
        }
        out.push_back(backend.generate(z));
    }
    return out;
}

ProtectedTemplate protect(const Backend& backend, const BandSpec& bands, const FaceVector& x_r,
                          const ProtectionKey& key, const ProtectOptions& options,
                          const KeyRegistry* registry) {
    if (registry && !registry->is_active(key.key_id())) {
        throw std::runtime_error("protect: key is not active");
    }

    // Inversion and key mapping.
    const LatentCode z_r = backend.invert(x_r);
    const LatentCode z_f =
        key_to_latent(key, backend.mapper(), backend.layer_count(), backend.layer_dim());

    // Naive initialization for the primary code and every augmentation.
    const LatentCode z_p0 = mix_naive(z_r, z_f, bands);
    Rng aug_rng(derive_seed("famx-augment-v1", options.augmentation_seed));
    const std::vector<FaceVector> x_aug = augment(backend, x_r, bands, options.augmentation, aug_rng);
    std::vector<LatentCode> z_aug0;
    z_aug0.reserve(x_aug.size());
    for (const auto& x : x_aug) z_aug0.push_back(mix_naive(backend.invert(x), z_f, bands));

    const Vector e_r = backend.identity_embed(x_r);
    const Vector a_r = backend.attribute_embed(x_r);

    RefineResult refined = refine(backend, z_p0, z_aug0, e_r, a_r, options.weights,
                                  options.optimizer);

    ProtectedTemplate t;
    t.latent = std::move(refined.primary);
    t.face = backend.generate(t.latent);
    t.key_id = key.key_id();
    t.subject_id = options.subject_id;
    t.config_hash = options.config_hash;
    t.created_at = options.created_at;
    return t;
}

VerifyResult verify(const Backend& backend, const ProtectedTemplate& t1,
                    const ProtectedTemplate& t2, double threshold) {
    const Vector e1 = backend.identity_embed(t1.face);
    const Vector e2 = backend.identity_embed(t2.face);
    VerifyResult r;
    r.score = cosine(e1, e2);
    r.match = r.score >= threshold;
    return r;
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(bits >> (8 * i)));
}

struct Reader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos >= buf.size()) throw std::invalid_argument("template blob truncated");
        return buf[pos++];
    }
    std::uint16_t u16() { return std::uint16_t(u8()) | std::uint16_t(u8()) << 8; }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(u8()) << (8 * i);
        return v;
    }
    double f64() {
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t(u8()) << (8 * i);
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

} // namespace

std::vector<std::uint8_t> serialize_template(const ProtectedTemplate& t) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'F', 'A', 'M', 'X'});
    put_u16(out, 1);
    const std::uint32_t layers = std::uint32_t(t.latent.layer_count());
    const std::uint32_t dim = std::uint32_t(t.latent.layer_dim());
    put_u32(out, layers);
    put_u32(out, dim);
    put_u32(out, std::uint32_t(t.face.size()));
    for (double v : t.latent.flat()) put_f64(out, v);
    for (double v : t.face.values) put_f64(out, v);
    // key_id as 8 big-endian bytes, matching the hex fingerprint order.
    for (int i = 7; i >= 0; --i) out.push_back(std::uint8_t(t.key_id >> (8 * i)));
    out.insert(out.end(), t.config_hash.begin(), t.config_hash.end());
    put_u32(out, std::uint32_t(t.subject_id.size()));
    out.insert(out.end(), t.subject_id.begin(), t.subject_id.end());
    return out;
}

ProtectedTemplate deserialize_template(const std::vector<std::uint8_t>& blob) {
    Reader r{blob};
    if (blob.size() < 4 || blob[0] != 'F' || blob[1] != 'A' || blob[2] != 'M' || blob[3] != 'X') {
        throw std::invalid_argument("template blob: bad magic");
    }
    r.pos = 4;
    if (r.u16() != 1) throw std::invalid_argument("template blob: unsupported version");
    const std::uint32_t layers = r.u32();
    const std::uint32_t dim = r.u32();
    const std::uint32_t face_dim = r.u32();

    ProtectedTemplate t;
    Vector flat(std::size_t(layers) * dim);
    for (auto& v : flat) v = r.f64();
    t.latent = unflatten(flat, layers, dim);
    t.face.values.resize(face_dim);
    for (auto& v : t.face.values) v = r.f64();
    t.key_id = 0;
    for (int i = 0; i < 8; ++i) t.key_id = (t.key_id << 8) | r.u8();
    for (auto& b : t.config_hash) b = r.u8();
    const std::uint32_t id_len = r.u32();
    t.subject_id.resize(id_len);
    for (auto& c : t.subject_id) c = char(r.u8());
    if (r.pos != blob.size()) throw std::invalid_argument("template blob: trailing bytes");
    return t;
}

} // namespace famx
