#include "famx/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace famx {

void LossWeights::validate() const {
    if (anonymity < 0.0 || identity_preservation < 0.0 || attribute < 0.0) {
        throw std::invalid_argument("LossWeights: weights must be nonnegative");
    }
    if (margin < -1.0 || margin > 1.0) {
        throw std::invalid_argument("LossWeights: margin must be in [-1, 1]");
    }
}

double anonymity_loss(const Vector& protected_embedding, const Vector& original_embedding,
                      double margin) {
    if (std::abs(norm2(protected_embedding) - 1.0) > 1e-6 ||
        std::abs(norm2(original_embedding) - 1.0) > 1e-6) {
        throw std::invalid_argument("anonymity_loss: embeddings must be unit norm");
    }
    return std::max(0.0, cosine(protected_embedding, original_embedding) - margin);
}

double identity_preservation_loss(const std::vector<Vector>& embeddings) {
    const std::size_t n = embeddings.size();
    if (n < 2) throw std::invalid_argument("identity_preservation_loss: need at least 2 embeddings");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            acc += norm2(sub(embeddings[i], embeddings[j]));
        }
    }
    return acc / (double(n) * double(n - 1));
}

double attribute_loss(const Vector& protected_attrs, const Vector& original_attrs) {
    if (protected_attrs.size() != original_attrs.size()) {
        throw std::invalid_argument("attribute_loss: dimension mismatch");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < protected_attrs.size(); ++i) {
        acc += std::abs(protected_attrs[i] - original_attrs[i]);
    }
    return acc;
}

LossBreakdown total_loss(double anonymity, double identity_preservation, double attribute,
                         const LossWeights& weights) {
    LossBreakdown b;
    b.anonymity = anonymity;
    b.identity_preservation = identity_preservation;
    b.attribute = attribute;
    b.total = weights.anonymity * anonymity +
              weights.identity_preservation * identity_preservation +
              weights.attribute * attribute;
    return b;
}

Vector cosine_grad_wrt_first(const Vector& u, const Vector& v) {
    const double nu = norm2(u);
    const double nv = norm2(v);
    if (nu <= 0.0 || nv <= 0.0) throw std::invalid_argument("cosine_grad: zero-norm input");
    const double c = dot(u, v) / (nu * nv);
    Vector g(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        g[i] = v[i] / (nu * nv) - c * u[i] / (nu * nu);
    }
    return g;
}

LossGradients loss_grad_wrt_latents(const Backend& backend, const LatentCode& z_p,
                                    const std::vector<LatentCode>& z_aug,
                                    const Vector& original_identity,
                                    const Vector& original_attributes,
                                    const LossWeights& weights) {
    weights.validate();

    const Vector e_p = backend.identity_embed_latent(z_p);
    std::vector<Vector> embeddings;
    embeddings.reserve(1 + z_aug.size());
    embeddings.push_back(e_p);
    for (const auto& z : z_aug) embeddings.push_back(backend.identity_embed_latent(z));
    const Vector a_p = backend.attribute_embed_latent(z_p);

    const double cos_pr = cosine(e_p, original_identity);
    const double anon = std::max(0.0, cos_pr - weights.margin);
    const double idp =
        embeddings.size() >= 2 ? identity_preservation_loss(embeddings) : 0.0;
    const double attr = attribute_loss(a_p, original_attributes);

    LossGradients out;
    out.breakdown = total_loss(anon, idp, attr, weights);

    // Accumulate dL/de for every embedding, then pull each back to its code.
    const std::size_t m = embeddings.size();
    std::vector<Vector> grad_e(m, Vector(e_p.size(), 0.0));

    // Anonymity hinge: flat side chosen at the kink, gradient only if cos > m.
    if (weights.anonymity > 0.0 && cos_pr > weights.margin) {
        Vector g = cosine_grad_wrt_first(e_p, original_identity);
        scale(g, weights.anonymity);
        axpy(1.0, g, grad_e[0]);
    }

    // Identity preservation: d|e_i - e_j|/de_i = (e_i - e_j)/|e_i - e_j|,
    // subgradient 0 for coincident embeddings.
    if (weights.identity_preservation > 0.0 && m >= 2) {
        const double w = weights.identity_preservation / (double(m) * double(m - 1));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                Vector diff = sub(embeddings[i], embeddings[j]);
                const double n = norm2(diff);
                if (n <= 0.0) continue;
                scale(diff, w / n);
                axpy(1.0, diff, grad_e[i]);
                axpy(-1.0, diff, grad_e[j]);
            }
        }
    }

    out.primary = backend.identity_embed_latent_vjp(z_p, grad_e[0]);

    if (weights.attribute > 0.0) {
        Vector grad_a(a_p.size());
        for (std::size_t i = 0; i < a_p.size(); ++i) {
            const double d = a_p[i] - original_attributes[i];
            grad_a[i] = weights.attribute * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0));
        }
        axpy(1.0, backend.attribute_embed_latent_vjp(z_p, grad_a), out.primary);
    }

    out.augmented.reserve(z_aug.size());
    for (std::size_t i = 0; i < z_aug.size(); ++i) {
        out.augmented.push_back(backend.identity_embed_latent_vjp(z_aug[i], grad_e[i + 1]));
    }
    return out;
}

} // namespace famx
