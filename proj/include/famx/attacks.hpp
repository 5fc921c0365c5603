// Irreversibility attacks: latent-space reconstruction from a protected
// template and a learned (closed-form ridge) image-to-image mapper.
// The threat model is white-box: the attacker holds the protected face, the
// key-derived latent and the backend itself.

#pragma once

#include "famx/backends.hpp"
#include "famx/numcore.hpp"
#include "famx/pipeline.hpp"

#include <string>
#include <vector>

namespace famx {

// Latent surgery on a protected template: invert the protected face and
// regenerate from the recovered code, discarding nothing the template still
// carries. The key latent z_f tells the attacker which band the protection
// replaced, but the original mid band is absent from the template, so the
// recovered code's own bands are the best reconstruction available.
FaceVector latent_replacement_attack(const Backend& backend, const ProtectedTemplate& t,
                                     const LatentCode& z_f, const BandSpec& bands);

// Affine map fitted by closed-form ridge regression on protected/original
// pairs. Deterministic given the pairs and the ridge coefficient.
struct LinearMapper {
    Matrix weight; // face_dim x face_dim
    Vector bias;
    double alpha = 0.0;
};

// Solves min |Y - X W^T - b|^2 + alpha |W - I|^2 in closed form via the
// normal equations; uses the dual (Gram) form when there are fewer pairs
// than dimensions. The penalty shrinks toward the identity map rather than
// zero, matching the skip-connection bias of the translation networks this
// stands in for. alpha == 0 with a singular system throws
// std::runtime_error.
LinearMapper train_mapper(const std::vector<std::pair<FaceVector, FaceVector>>& pairs,
                          double alpha);

// Affine evaluation, clamped into the open (-1, 1) face range so the result
// stays a valid face vector.
FaceVector apply_mapper(const LinearMapper& mapper, const FaceVector& x_p);

struct AttackReport {
    std::string attack_name;
    std::vector<double> fmr_list;
    std::vector<double> psr_per_fmr;       // reconstruction-vs-original PSR
    double mean_identity_cosine = 0.0;     // reconstructions vs originals
};

} // namespace famx
