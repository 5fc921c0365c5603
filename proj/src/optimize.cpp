#include "famx/optimize.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace famx {

void adam_step(AdamState& state, Vector& params, const Vector& grad, const OptimizerConfig& cfg) {
    if (params.size() != grad.size() || params.size() != state.first_moment.size()) {
        throw std::invalid_argument("adam_step: dimension mismatch");
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, double(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, double(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.first_moment[i] = cfg.beta1 * state.first_moment[i] + (1.0 - cfg.beta1) * grad[i];
        state.second_moment[i] =
            cfg.beta2 * state.second_moment[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
        const double m_hat = state.first_moment[i] / bc1;
        const double v_hat = state.second_moment[i] / bc2;
        params[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
    }
}

void sgd_step(Vector& params, const Vector& grad, double learning_rate) {
    if (params.size() != grad.size()) throw std::invalid_argument("sgd_step: dimension mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= learning_rate * grad[i];
}

RefineResult refine(const Backend& backend, const LatentCode& z_p,
                    const std::vector<LatentCode>& z_aug, const Vector& original_identity,
                    const Vector& original_attributes, const LossWeights& weights,
                    const OptimizerConfig& opt) {
    RefineResult result;
    result.primary = z_p;
    result.augmented = z_aug;

    const std::size_t dim = z_p.flat().size();
    AdamState primary_state(dim);
    std::vector<AdamState> aug_states(z_aug.size(), AdamState(dim));

    for (std::size_t t = 0; t < opt.steps; ++t) {
        LossGradients g = loss_grad_wrt_latents(backend, result.primary, result.augmented,
                                                original_identity, original_attributes, weights);
        if (!std::isfinite(g.breakdown.total)) {
            throw std::runtime_error("refine: non-finite loss at step " + std::to_string(t));
        }
        result.trace.steps.push_back(g.breakdown);

        if (opt.kind == OptimizerKind::Adam) {
            adam_step(primary_state, result.primary.flat(), g.primary, opt);
            for (std::size_t i = 0; i < result.augmented.size(); ++i) {
                adam_step(aug_states[i], result.augmented[i].flat(), g.augmented[i], opt);
            }
        } else {
            sgd_step(result.primary.flat(), g.primary, opt.learning_rate);
            for (std::size_t i = 0; i < result.augmented.size(); ++i) {
                sgd_step(result.augmented[i].flat(), g.augmented[i], opt.learning_rate);
            }
        }
    }
    return result;
}

} // namespace famx
