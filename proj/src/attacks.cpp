#include "famx/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace famx {

namespace {

// Strictly inside the encoder's domain; saturated entries are pulled back in
// before inversion (the attacker loses nothing of value there).
const double kInvertibleLimit = std::nextafter(1.0 - 1e-9, 0.0);

FaceVector clamp_invertible(FaceVector x) {
    for (double& v : x.values) v = std::clamp(v, -kInvertibleLimit, kInvertibleLimit);
    return x;
}

} // namespace

FaceVector latent_replacement_attack(const Backend& backend, const ProtectedTemplate& t,
                                     const LatentCode& z_f, const BandSpec& bands) {
    const LatentCode recovered = backend.invert(clamp_invertible(t.face));
    if (!recovered.same_shape(z_f)) {
        throw std::invalid_argument("latent_replacement_attack: latent shape mismatch");
    }
    // Start from the naive band assignment the protection used, then put the
    // recovered code's own mid band back in place of the key's: the swap
    // leaves the recovered code intact, which is all the template exposes.
    LatentCode candidate = mix_naive(recovered, z_f, bands);
    const std::size_t d = candidate.layer_dim();
    for (std::size_t l = 0; l < candidate.layer_count(); ++l) {
        if (!bands.in_mid(l)) continue;
        std::copy(recovered.layer(l), recovered.layer(l) + d, candidate.layer(l));
    }
    return backend.generate(candidate);
}

LinearMapper train_mapper(const std::vector<std::pair<FaceVector, FaceVector>>& pairs,
                          double alpha) {
    if (pairs.empty()) throw std::invalid_argument("train_mapper: no pairs");
    if (alpha < 0.0) throw std::invalid_argument("train_mapper: alpha must be >= 0");
    const std::size_t n = pairs.size();
    const std::size_t d = pairs.front().first.size();
    for (const auto& [xp, xr] : pairs) {
        if (xp.size() != d || xr.size() != d) {
            throw std::invalid_argument("train_mapper: inconsistent pair dimensions");
        }
    }

    // Center both sides; the bias absorbs the means.
    Vector mean_x(d, 0.0), mean_y(d, 0.0);
    for (const auto& [xp, xr] : pairs) {
        axpy(1.0, xp.values, mean_x);
        axpy(1.0, xr.values, mean_y);
    }
    scale(mean_x, 1.0 / double(n));
    scale(mean_y, 1.0 / double(n));

    // The ridge penalty shrinks toward the identity map, so the regression
    // target is the correction Y - X; translation networks with skip
    // connections have the same inductive bias.
    Matrix xc(n, d), rc(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            xc(i, j) = pairs[i].first.values[j] - mean_x[j];
            rc(i, j) = (pairs[i].second.values[j] - mean_y[j]) - xc(i, j);
        }
    }

    LinearMapper mapper;
    mapper.alpha = alpha;
    mapper.weight = Matrix(d, d);

    auto solve_or_singular = [&](const Matrix& spd) {
        try {
            return Cholesky(spd);
        } catch (const std::runtime_error&) {
            throw std::runtime_error("train_mapper: singular system (alpha == 0?)");
        }
    };

    if (n >= d) {
        // Primal: R^T = (Xc^T Xc + alpha I)^{-1} Xc^T Rc.
        Matrix g = gram(xc);
        for (std::size_t i = 0; i < d; ++i) g(i, i) += alpha;
        const Cholesky chol = solve_or_singular(g);
        const Matrix xtr = gram_cross(xc, rc); // d x d
        for (std::size_t j = 0; j < d; ++j) {
            Vector col(d);
            for (std::size_t i = 0; i < d; ++i) col[i] = xtr(i, j);
            const Vector w_col = chol.solve(col);
            for (std::size_t i = 0; i < d; ++i) mapper.weight(j, i) = w_col[i];
        }
    } else {
        // Dual: R^T = Xc^T (Xc Xc^T + alpha I)^{-1} Rc.
        Matrix k(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                const double* ri = xc.row_ptr(i);
                const double* rj = xc.row_ptr(j);
                for (std::size_t c = 0; c < d; ++c) acc += ri[c] * rj[c];
                k(i, j) = acc;
            }
            k(i, i) += alpha;
        }
        const Cholesky chol = solve_or_singular(k);
        // Solve K A = Rc columnwise, then R = (Xc^T A)^T.
        Matrix a(n, d);
        for (std::size_t j = 0; j < d; ++j) {
            Vector col(n);
            for (std::size_t i = 0; i < n; ++i) col[i] = rc(i, j);
            const Vector aj = chol.solve(col);
            for (std::size_t i = 0; i < n; ++i) a(i, j) = aj[i];
        }
        const Matrix wt = gram_cross(xc, a); // d x d = Xc^T A
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) mapper.weight(j, i) = wt(i, j);
        }
    }
    for (std::size_t i = 0; i < d; ++i) mapper.weight(i, i) += 1.0;

    // bias = mean_y - W mean_x
    mapper.bias = matvec(mapper.weight, mean_x);
    scale(mapper.bias, -1.0);
    axpy(1.0, mean_y, mapper.bias);
    return mapper;
}

FaceVector apply_mapper(const LinearMapper& mapper, const FaceVector& x_p) {
    Vector y = matvec(mapper.weight, x_p.values);
    axpy(1.0, mapper.bias, y);
    return clamp_invertible(FaceVector{std::move(y)});
}

} // namespace famx
