// Pluggable differentiable models behind the pipeline: generator D, inversion
// encoder E, identity embedder I and attribute embedder A, plus a fully
// deterministic toy implementation whose encoder is an exact inverse of the
// generator.

#pragma once

#include "famx/keying.hpp"
#include "famx/latent.hpp"
#include "famx/numcore.hpp"

#include <cstdint>
#include <memory>

namespace famx {

// Flat numeric stand-in for a face image. Entries live in (-1, 1) so the
// toy encoder's atanh is defined.
struct FaceVector {
    Vector values;

    std::size_t size() const { return values.size(); }
    bool operator==(const FaceVector& other) const { return values == other.values; }
};

// One interface groups the four model roles: every role is a deterministic
// forward evaluation plus a VJP (gradient of a scalar downstream loss with
// respect to the role's input).
class Backend {
public:
    virtual ~Backend() = default;

    virtual std::size_t layer_count() const = 0;
    virtual std::size_t layer_dim() const = 0;
    virtual std::size_t face_dim() const = 0;
    virtual std::size_t identity_dim() const = 0;
    virtual std::size_t attribute_dim() const = 0;

    // Generator D: W+ -> X
    virtual FaceVector generate(const LatentCode& z) const = 0;
    // Gradient w.r.t. flatten(z) given upstream = dL/dx.
    virtual Vector generate_vjp(const LatentCode& z, const Vector& upstream) const = 0;

    // Encoder E: X -> W+
    virtual LatentCode invert(const FaceVector& x) const = 0;

    // Identity embedder I: X -> unit sphere in R^{d_I}
    virtual Vector identity_embed(const FaceVector& x) const = 0;
    virtual Vector identity_vjp(const FaceVector& x, const Vector& upstream) const = 0;

    // Attribute embedder A: X -> R^{d_A}
    virtual Vector attribute_embed(const FaceVector& x) const = 0;
    virtual Vector attribute_vjp(const FaceVector& x, const Vector& upstream) const = 0;

    // Latent-space routes for I(D(z)) and A(D(z)). The base implementations
    // compose the face-space operations; implementations may provide an
    // algebraically identical shortcut. Contract: results agree with the
    // composed route to numerical precision.
    virtual Vector identity_embed_latent(const LatentCode& z) const;
    virtual Vector identity_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const;
    virtual Vector attribute_embed_latent(const LatentCode& z) const;
    virtual Vector attribute_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const;

    // Key-to-latent mapping network S(k) operates through.
    virtual const MappingNetwork& mapper() const = 0;
};

struct ToyBackendConfig {
    std::uint64_t seed = 42;
    std::size_t layers = 18;
    std::size_t dim = 64;
    std::size_t face_dim = 0;     // 0 -> 2 * layers * dim
    std::size_t identity_dim = 32;
    std::size_t attribute_dim = 32;
    BandSpec bands;
    // Fraction of non-mid coordinates mixed into the identity embedding;
    // models imperfect identity/attribute disentanglement.
    double leak = 0.2;
    double bias_scale = 0.05;
};

// Affine + tanh generator with an exact pseudo-inverse encoder. All
// parameters derive from a single seed; construction is the only stateful
// step, evaluation is pure and thread-safe.
class ToyBackend final : public Backend {
public:
    explicit ToyBackend(const ToyBackendConfig& cfg);

    std::size_t layer_count() const override { return cfg_.layers; }
    std::size_t layer_dim() const override { return cfg_.dim; }
    std::size_t face_dim() const override { return cfg_.face_dim; }
    std::size_t identity_dim() const override { return cfg_.identity_dim; }
    std::size_t attribute_dim() const override { return cfg_.attribute_dim; }
    const ToyBackendConfig& config() const { return cfg_; }
    const BandSpec& bands() const { return cfg_.bands; }

    FaceVector generate(const LatentCode& z) const override;
    Vector generate_vjp(const LatentCode& z, const Vector& upstream) const override;
    LatentCode invert(const FaceVector& x) const override;
    Vector identity_embed(const FaceVector& x) const override;
    Vector identity_vjp(const FaceVector& x, const Vector& upstream) const override;
    Vector attribute_embed(const FaceVector& x) const override;
    Vector attribute_vjp(const FaceVector& x, const Vector& upstream) const override;

    Vector identity_embed_latent(const LatentCode& z) const override;
    Vector identity_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const override;
    Vector attribute_embed_latent(const LatentCode& z) const override;
    Vector attribute_embed_latent_vjp(const LatentCode& z, const Vector& upstream) const override;

    const MappingNetwork& mapper() const override { return mapper_; }

    // Parameter blob: magic "FAMB", version, seed and dims. The parameters
    // themselves are re-derived from the seed on load.
    std::vector<std::uint8_t> serialize() const;
    static ToyBackend deserialize(const std::vector<std::uint8_t>& blob);

private:
    Vector embed_unnormalized(const LatentCode& z) const;
    Vector latent_grad_from_embedding_grad(const LatentCode& z, const Vector& upstream) const;
    Vector face_grad_from_latent_grad(const FaceVector& x, const Vector& grad_z) const;

    ToyBackendConfig cfg_;
    Matrix w_gen_;      // face_dim x (layers*dim)
    Vector b_gen_;
    Cholesky gram_chol_; // factor of W^T W, backs the pseudo-inverse
    Matrix p_id_;       // identity_dim x mid width, orthonormal rows
    Matrix p_leak_;     // identity_dim x other width
    Matrix p_attr_;     // attribute_dim x other width
    MappingNetwork mapper_;
};

} // namespace famx
