#include "famx/backends.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace famx {

namespace {

constexpr double kSaturationMargin = 1e-9;
constexpr double kZeroEmbeddingNorm = 1e-12;

Matrix gaussian_matrix(Rng& rng, std::size_t rows, std::size_t cols, double sigma) {
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        double* p = m.row_ptr(r);
        for (std::size_t c = 0; c < cols; ++c) p[c] = sigma * rng.gaussian();
    }
    return m;
}

// Rows orthonormalized with modified Gram-Schmidt; degenerate rows are
// redrawn.
Matrix orthonormal_rows(Rng& rng, std::size_t rows, std::size_t cols) {
    if (rows > cols) throw std::invalid_argument("orthonormal_rows: rows > cols");
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (int attempt = 0;; ++attempt) {
            if (attempt > 16) throw std::runtime_error("orthonormal_rows: rank deficiency");
            Vector v = rng.gaussian_vector(cols);
            for (std::size_t k = 0; k < r; ++k) {
                const double* rowk = m.row_ptr(k);
                double proj = 0.0;
                for (std::size_t c = 0; c < cols; ++c) proj += rowk[c] * v[c];
                for (std::size_t c = 0; c < cols; ++c) v[c] -= proj * rowk[c];
            }
            const double n = norm2(v);
            if (n > 1e-8) {
                for (std::size_t c = 0; c < cols; ++c) m(r, c) = v[c] / n;
                break;
            }
        }
    }
    return m;
}

} // namespace

Vector Backend::identity_embed_latent(const LatentCode& z) const {
    return identity_embed(generate(z));
}

Vector Backend::identity_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const {
    const FaceVector x = generate(z);
    return generate_vjp(z, identity_vjp(x, upstream));
}

Vector Backend::attribute_embed_latent(const LatentCode& z) const {
    return attribute_embed(generate(z));
}

Vector Backend::attribute_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const {
    const FaceVector x = generate(z);
    return generate_vjp(z, attribute_vjp(x, upstream));
}

ToyBackend::ToyBackend(const ToyBackendConfig& cfg) : cfg_(cfg) {
    cfg_.bands.validate(cfg_.layers);
    const std::size_t flat = cfg_.layers * cfg_.dim;
    if (cfg_.face_dim == 0) cfg_.face_dim = 2 * flat;
    if (cfg_.face_dim < flat) {
        throw std::invalid_argument("ToyBackend: face_dim must be >= layers*dim");
    }
    if (cfg_.leak < 0.0 || cfg_.leak >= 1.0) {
        throw std::invalid_argument("ToyBackend: leak must be in [0, 1)");
    }
    const std::size_t mid_w = cfg_.bands.mid_count() * cfg_.dim;
    const std::size_t other_w = flat - mid_w;
    if (cfg_.identity_dim > mid_w) {
        throw std::invalid_argument("ToyBackend: identity_dim exceeds mid band width");
    }

    // Fixed derivation order; every component gets its own child stream.
    Rng root(cfg_.seed);
    Rng rng_wgen = root.split();
    Rng rng_bgen = root.split();
    Rng rng_pid = root.split();
    Rng rng_pleak = root.split();
    Rng rng_pattr = root.split();
    Rng rng_mapper = root.split();

    w_gen_ = gaussian_matrix(rng_wgen, cfg_.face_dim, flat, 1.0 / std::sqrt(double(flat)));
    b_gen_ = Vector(cfg_.face_dim);
    for (auto& b : b_gen_) b = cfg_.bias_scale * rng_bgen.gaussian();

    gram_chol_ = Cholesky(gram(w_gen_));

    p_id_ = orthonormal_rows(rng_pid, cfg_.identity_dim, mid_w);
    p_leak_ = gaussian_matrix(rng_pleak, cfg_.identity_dim, other_w,
                              1.0 / std::sqrt(double(other_w)));
    p_attr_ = gaussian_matrix(rng_pattr, cfg_.attribute_dim, other_w,
                              1.0 / std::sqrt(double(other_w)));

    mapper_.w = gaussian_matrix(rng_mapper, cfg_.dim, cfg_.dim, 1.0 / std::sqrt(double(cfg_.dim)));
    mapper_.b = Vector(cfg_.dim);
    for (auto& b : mapper_.b) b = 0.1 * rng_mapper.gaussian();
}

FaceVector ToyBackend::generate(const LatentCode& z) const {
    if (z.layer_count() != cfg_.layers || z.layer_dim() != cfg_.dim) {
        throw std::invalid_argument("generate: latent shape mismatch");
    }
    return FaceVector{affine_tanh(w_gen_, b_gen_, z.flat())};
}

Vector ToyBackend::generate_vjp(const LatentCode& z, const Vector& upstream) const {
    if (z.layer_count() != cfg_.layers || z.layer_dim() != cfg_.dim) {
        throw std::invalid_argument("generate_vjp: latent shape mismatch");
    }
    return vjp_affine_tanh(w_gen_, b_gen_, z.flat(), upstream);
}

LatentCode ToyBackend::invert(const FaceVector& x) const {
    if (x.size() != cfg_.face_dim) throw std::invalid_argument("invert: face dim mismatch");
    Vector pre(cfg_.face_dim);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x.values[i]) >= 1.0 - kSaturationMargin) {
            throw std::domain_error("invert: saturated face entry");
        }
        pre[i] = std::atanh(x.values[i]) - b_gen_[i];
    }
    const Vector flat = gram_chol_.solve(matvec_transposed(w_gen_, pre));
    return unflatten(flat, cfg_.layers, cfg_.dim);
}

Vector ToyBackend::embed_unnormalized(const LatentCode& z) const {
    Vector u = matvec(p_id_, mid_band(z, cfg_.bands));
    if (cfg_.leak != 0.0) {
        const Vector leak = matvec(p_leak_, other_bands(z, cfg_.bands));
        axpy(cfg_.leak, leak, u);
    }
    return u;
}

Vector ToyBackend::identity_embed_latent(const LatentCode& z) const {
    Vector u = embed_unnormalized(z);
    const double n = norm2(u);
    if (n < kZeroEmbeddingNorm) throw std::domain_error("identity_embed: zero embedding");
    scale(u, 1.0 / n);
    return u;
}

Vector ToyBackend::identity_embed(const FaceVector& x) const {
    return identity_embed_latent(invert(x));
}

// Gradient of the normalized embedding w.r.t. flatten(z):
// with u the unnormalized embedding and e = u/|u|, the pullback of g is
// (g - (g.e)e)/|u| through the projections into the mid/other bands.
Vector ToyBackend::latent_grad_from_embedding_grad(const LatentCode& z, const Vector& upstream) const {
    Vector u = embed_unnormalized(z);
    const double n = norm2(u);
    if (n < kZeroEmbeddingNorm) throw std::domain_error("identity_vjp: zero embedding");
    const double ge = dot(upstream, u) / (n * n);
    Vector gu(upstream.size());
    for (std::size_t i = 0; i < gu.size(); ++i) gu[i] = (upstream[i] - ge * u[i]) / n;

    Vector grad(cfg_.layers * cfg_.dim, 0.0);
    scatter_mid_band(matvec_transposed(p_id_, gu), cfg_.bands, cfg_.layers, cfg_.dim, grad);
    if (cfg_.leak != 0.0) {
        Vector leak_grad = matvec_transposed(p_leak_, gu);
        scale(leak_grad, cfg_.leak);
        scatter_other_bands(leak_grad, cfg_.bands, cfg_.layers, cfg_.dim, grad);
    }
    return grad;
}

Vector ToyBackend::identity_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const {
    return latent_grad_from_embedding_grad(z, upstream);
}

// Pullback through the encoder: z = (W^T W)^{-1} W^T (atanh(x) - b), so
// dL/dx = (W (W^T W)^{-1} dL/dz) / (1 - x^2) elementwise.
Vector ToyBackend::face_grad_from_latent_grad(const FaceVector& x, const Vector& grad_z) const {
    Vector gx = matvec(w_gen_, gram_chol_.solve(grad_z));
    for (std::size_t i = 0; i < gx.size(); ++i) {
        gx[i] /= (1.0 - x.values[i] * x.values[i]);
    }
    return gx;
}

Vector ToyBackend::identity_vjp(const FaceVector& x, const Vector& upstream) const {
    const LatentCode z = invert(x);
    return face_grad_from_latent_grad(x, latent_grad_from_embedding_grad(z, upstream));
}

Vector ToyBackend::attribute_embed_latent(const LatentCode& z) const {
    return matvec(p_attr_, other_bands(z, cfg_.bands));
}

Vector ToyBackend::attribute_embed(const FaceVector& x) const {
    return attribute_embed_latent(invert(x));
}

Vector ToyBackend::attribute_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const {
    (void)z;
    Vector grad(cfg_.layers * cfg_.dim, 0.0);
    scatter_other_bands(matvec_transposed(p_attr_, upstream), cfg_.bands, cfg_.layers, cfg_.dim,
                        grad);
    return grad;
}

Vector ToyBackend::attribute_vjp(const FaceVector& x, const Vector& upstream) const {
    const LatentCode z = invert(x);
    return face_grad_from_latent_grad(x, attribute_embed_latent_vjp(z, upstream));
}

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

struct Reader {
    const std::vector<std::uint8_t>& buf;
    std::size_t pos = 0;

    std::uint8_t u8() {
        if (pos >= buf.size()) throw std::invalid_argument("backend blob truncated");
        return buf[pos++];
    }
    std::uint16_t u16() { return std::uint16_t(u8()) | std::uint16_t(u8()) << 8; }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(u8()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(u8()) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
};

} // namespace

std::vector<std::uint8_t> ToyBackend::serialize() const {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'F', 'A', 'M', 'B'});
    put_u16(out, 1);
    put_u64(out, cfg_.seed);
    put_u32(out, std::uint32_t(cfg_.layers));
    put_u32(out, std::uint32_t(cfg_.dim));
    put_u32(out, std::uint32_t(cfg_.face_dim));
    put_u32(out, std::uint32_t(cfg_.identity_dim));
    put_u32(out, std::uint32_t(cfg_.attribute_dim));
    put_u32(out, std::uint32_t(cfg_.bands.coarse_end));
    put_u32(out, std::uint32_t(cfg_.bands.mid_end));
    put_f64(out, cfg_.leak);
    put_f64(out, cfg_.bias_scale);
    return out;
}

ToyBackend ToyBackend::deserialize(const std::vector<std::uint8_t>& blob) {
    Reader r{blob};
    if (blob.size() < 4 || blob[0] != 'F' || blob[1] != 'A' || blob[2] != 'M' || blob[3] != 'B') {
        throw std::invalid_argument("backend blob: bad magic");
    }
    r.pos = 4;
    const std::uint16_t version = r.u16();
    if (version != 1) throw std::invalid_argument("backend blob: unsupported version");
    ToyBackendConfig cfg;
    cfg.seed = r.u64();
    cfg.layers = r.u32();
    cfg.dim = r.u32();
    cfg.face_dim = r.u32();
    cfg.identity_dim = r.u32();
    cfg.attribute_dim = r.u32();
    cfg.bands.coarse_end = r.u32();
    cfg.bands.mid_end = r.u32();
    cfg.leak = r.f64();
    cfg.bias_scale = r.f64();
    return ToyBackend(cfg);
}

} // namespace famx
