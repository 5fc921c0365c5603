// Adam/SGD over flattened latent vectors and the fixed-length refinement
// loop that drives the mixed codes toward the loss objectives.

#pragma once

#include "famx/losses.hpp"

#include <cstddef>
#include <vector>

namespace famx {

enum class OptimizerKind { Adam, Sgd };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::Adam;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::size_t steps = 50;
};

// Per-parameter-vector Adam state; moments match the parameter dimension
// and the step counter increments by exactly one per step.
struct AdamState {
    Vector first_moment;
    Vector second_moment;
    std::size_t step = 0;

    explicit AdamState(std::size_t dim)
        : first_moment(dim, 0.0), second_moment(dim, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
void adam_step(AdamState& state, Vector& params, const Vector& grad, const OptimizerConfig& cfg);
void sgd_step(Vector& params, const Vector& grad, double learning_rate);

// Per-step loss history of one refinement run.
struct OptTrace {
    std::vector<LossBreakdown> steps;
};

struct RefineResult {
    LatentCode primary;
    std::vector<LatentCode> augmented;
    OptTrace trace;
};

// The T-step refinement loop: at every step the losses and their latent
// gradients are evaluated and every code is updated synchronously, each
// with its own optimizer state. Aborts with std::runtime_error (naming the
// step index) if a non-finite loss appears.
RefineResult refine(const Backend& backend, const LatentCode& z_p,
                    const std::vector<LatentCode>& z_aug, const Vector& original_identity,
                    const Vector& original_attributes, const LossWeights& weights,
                    const OptimizerConfig& opt);

} // namespace famx
