// The three objective terms driving latent refinement, their weighted total
// and the full gradient with respect to the latent codes.

#pragma once

#include "famx/backends.hpp"
#include "famx/latent.hpp"
#include "famx/numcore.hpp"

#include <vector>

namespace famx {

struct LossWeights {
    double anonymity = 10.0;
    double identity_preservation = 10.0;
    double attribute = 0.15;
    double margin = 0.0;

    void validate() const;
};

struct LossBreakdown {
    double anonymity = 0.0;
    double identity_preservation = 0.0;
    double attribute = 0.0;
    double total = 0.0;
};

// max(0, cos(e_p, e_r) - m). Inputs must be unit vectors (tolerance 1e-6).
double anonymity_loss(const Vector& protected_embedding, const Vector& original_embedding,
                      double margin);

// (1 / (N(N-1))) * sum_{i<j} |e_i - e_j|_2 over the given embeddings.
// The sum runs over unordered pairs while the normalizer counts ordered
// pairs; implemented literally for reproducibility.
double identity_preservation_loss(const std::vector<Vector>& embeddings);

// |a_p - a_r|_1
double attribute_loss(const Vector& protected_attrs, const Vector& original_attrs);

LossBreakdown total_loss(double anonymity, double identity_preservation, double attribute,
                         const LossWeights& weights);

// Loss state and gradients for one refinement step. The embedding list for
// the identity-preservation term ranges over the primary code plus all
// augmented codes, anchoring the primary code to the consensus identity.
struct LossGradients {
    LossBreakdown breakdown;
    Vector primary;                  // dL_total/d flatten(z_p)
    std::vector<Vector> augmented;   // dL_total/d flatten(z_p^i)
};

// Evaluates Eq-style total loss and its gradient w.r.t. every latent code.
// Routes through the backend's latent-space embedding operations; the hinge
// in the anonymity term contributes zero gradient when cos <= margin.
LossGradients loss_grad_wrt_latents(const Backend& backend, const LatentCode& z_p,
                                    const std::vector<LatentCode>& z_aug,
                                    const Vector& original_identity,
                                    const Vector& original_attributes,
                                    const LossWeights& weights);

// Gradient of cos(u, v) with respect to u (general, not unit-restricted).
Vector cosine_grad_wrt_first(const Vector& u, const Vector& v);

} // namespace famx
