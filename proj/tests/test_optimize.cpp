#include "doctest.h"

#include "famx/optimize.hpp"
#include "famx/rng.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

using namespace famx;

namespace {

ToyBackend small_backend() {
    ToyBackendConfig cfg;
    cfg.seed = 42;
    cfg.layers = 6;
    cfg.dim = 8;
    cfg.bands = BandSpec{2, 4};
    cfg.identity_dim = 12;
    cfg.attribute_dim = 10;
    return ToyBackend(cfg);
}

LatentCode random_code(Rng& rng, const Backend& b, double scale = 0.7) {
    LatentCode z(b.layer_count(), b.layer_dim());
    for (double& v : z.flat()) v = scale * rng.gaussian();
    return z;
}

} // namespace

TEST_CASE("adam matches a hand-rolled reference over several steps") {
    OptimizerConfig cfg;
    cfg.learning_rate = 0.1;

    Rng rng(1);
    const std::size_t dim = 4;
    Vector params = rng.gaussian_vector(dim);
    Vector ref = params;
    Vector m(dim, 0.0), v(dim, 0.0);

    AdamState state(dim);
    for (std::size_t t = 1; t <= 7; ++t) {
        const Vector grad = rng.gaussian_vector(dim);
        adam_step(state, params, grad, cfg);
        for (std::size_t i = 0; i < dim; ++i) {
            m[i] = cfg.beta1 * m[i] + (1 - cfg.beta1) * grad[i];
            v[i] = cfg.beta2 * v[i] + (1 - cfg.beta2) * grad[i] * grad[i];
            const double mhat = m[i] / (1 - std::pow(cfg.beta1, double(t)));
            const double vhat = v[i] / (1 - std::pow(cfg.beta2, double(t)));
            ref[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
        CHECK(state.step == t);
        for (std::size_t i = 0; i < dim; ++i) {
            CHECK(params[i] == doctest::Approx(ref[i]).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(adam_step(state, params, Vector(dim + 1), cfg), std::invalid_argument);
}

TEST_CASE("adam converges on a separable quadratic") {
    OptimizerConfig cfg;
    cfg.learning_rate = 0.05;
    Vector params = {3.0, -2.0, 1.5};
    AdamState state(params.size());
    for (int t = 0; t < 2000; ++t) {
        Vector grad = params; // d/dx of 0.5 x^2
        adam_step(state, params, grad, cfg);
    }
    for (double p : params) CHECK(std::abs(p) < 1e-3);
}

TEST_CASE("sgd step is a plain scaled subtraction") {
    Vector params = {1.0, 2.0};
    sgd_step(params, {0.5, -1.0}, 0.1);
    CHECK(params[0] == doctest::Approx(0.95));
    CHECK(params[1] == doctest::Approx(2.1));
    CHECK_THROWS_AS(sgd_step(params, Vector(3), 0.1), std::invalid_argument);
}

TEST_CASE("refine is deterministic and reduces the loss") {
    const ToyBackend backend = small_backend();
    Rng rng(2);
    const LatentCode z_p = random_code(rng, backend);
    std::vector<LatentCode> z_aug;
    for (int i = 0; i < 3; ++i) z_aug.push_back(random_code(rng, backend));
    const Vector e_r = backend.identity_embed_latent(random_code(rng, backend));
    const Vector a_r = backend.attribute_embed_latent(z_p);
    LossWeights weights;
    OptimizerConfig opt;
    opt.steps = 30;

    const RefineResult a = refine(backend, z_p, z_aug, e_r, a_r, weights, opt);
    const RefineResult b = refine(backend, z_p, z_aug, e_r, a_r, weights, opt);
    CHECK(a.primary == b.primary);
    REQUIRE(a.trace.steps.size() == opt.steps);
    CHECK(a.trace.steps.back().total < a.trace.steps.front().total);

    // The trace records the loss before each update, so step 0 equals the
    // loss of the untouched inputs.
    const double initial =
        loss_grad_wrt_latents(backend, z_p, z_aug, e_r, a_r, weights).breakdown.total;
    CHECK(a.trace.steps.front().total == doctest::Approx(initial).epsilon(1e-12));

    // Inputs stay untouched; the result carries updated copies.
    CHECK(!(a.primary == z_p));
    CHECK(a.augmented.size() == z_aug.size());
}

TEST_CASE("refine with sgd also runs and differs from adam") {
    const ToyBackend backend = small_backend();
    Rng rng(3);
    const LatentCode z_p = random_code(rng, backend);
    const Vector e_r = backend.identity_embed_latent(random_code(rng, backend));
    const Vector a_r = backend.attribute_embed_latent(z_p);
    LossWeights weights;
    OptimizerConfig adam, sgd;
    adam.steps = sgd.steps = 10;
    sgd.kind = OptimizerKind::Sgd;

    const RefineResult ra = refine(backend, z_p, {}, e_r, a_r, weights, adam);
    const RefineResult rs = refine(backend, z_p, {}, e_r, a_r, weights, sgd);
    CHECK(!(ra.primary == rs.primary));
    CHECK(rs.trace.steps.size() == 10);
}

TEST_CASE("refine aborts on non-finite losses") {
    const ToyBackend backend = small_backend();
    Rng rng(4);
    const LatentCode z_p = random_code(rng, backend);
    const Vector e_r = backend.identity_embed_latent(random_code(rng, backend));
    // An infinite attribute target makes the attribute loss non-finite at
    // the very first step.
    Vector a_r(backend.attribute_dim(), 0.0);
    a_r[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_WITH_AS(
        refine(backend, z_p, {}, e_r, a_r, LossWeights{}, OptimizerConfig{}),
        doctest::Contains("non-finite"), std::runtime_error);
}
