#include "famx/numcore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace famx {

static void check(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

Vector matvec(const Matrix& m, const Vector& v) {
    check(m.cols() == v.size(), "matvec: dimension mismatch");
    Vector out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row_ptr(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols(); ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
    check(m.rows() == v.size(), "matvec_transposed: dimension mismatch");
    Vector out(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const double* row = m.row_ptr(r);
        const double vr = v[r];
        for (std::size_t c = 0; c < m.cols(); ++c) out[c] += vr * row[c];
    }
    return out;
}

Matrix gram(const Matrix& a) {
    Matrix c(a.cols(), a.cols());
    // Accumulate rank-1 updates row by row; fills the full symmetric matrix.
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* row = a.row_ptr(r);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ai = row[i];
            if (ai == 0.0) continue;
            double* ci = c.row_ptr(i);
            for (std::size_t j = 0; j < a.cols(); ++j) ci[j] += ai * row[j];
        }
    }
    return c;
}

Matrix gram_cross(const Matrix& a, const Matrix& b) {
    check(a.rows() == b.rows(), "gram_cross: row mismatch");
    Matrix c(a.cols(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        const double* ar = a.row_ptr(r);
        const double* br = b.row_ptr(r);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double ai = ar[i];
            if (ai == 0.0) continue;
            double* ci = c.row_ptr(i);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += ai * br[j];
        }
    }
    return c;
}

double dot(const Vector& u, const Vector& v) {
    check(u.size() == v.size(), "dot: dimension mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
    return acc;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double norm1(const Vector& v) {
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc;
}

double norm_inf(const Vector& v) {
    double acc = 0.0;
    for (double x : v) acc = std::max(acc, std::abs(x));
    return acc;
}

double cosine(const Vector& u, const Vector& v) {
    const double nu = norm2(u);
    const double nv = norm2(v);
    check(nu > 0.0 && nv > 0.0, "cosine: zero-norm input");
    double c = dot(u, v) / (nu * nv);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return c;
}

void axpy(double a, const Vector& x, Vector& y) {
    check(x.size() == y.size(), "axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(Vector& v, double a) {
    for (double& x : v) x *= a;
}

Vector add(const Vector& u, const Vector& v) {
    check(u.size() == v.size(), "add: dimension mismatch");
    Vector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] + v[i];
    return out;
}

Vector sub(const Vector& u, const Vector& v) {
    check(u.size() == v.size(), "sub: dimension mismatch");
    Vector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] - v[i];
    return out;
}

Vector tanh_vec(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::tanh(v[i]);
    return out;
}

Vector atanh_vec(const Vector& v) {
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        check(std::abs(v[i]) < 1.0, "atanh: input outside (-1, 1)");
        out[i] = std::atanh(v[i]);
    }
    return out;
}

Vector affine_tanh(const Matrix& w, const Vector& b, const Vector& x, DualTrace* trace) {
    check(w.rows() == b.size(), "affine_tanh: bias dimension mismatch");
    Vector y = matvec(w, x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(y[i] + b[i]);
    if (trace) trace->output = y;
    return y;
}

Vector vjp_affine_tanh(const Matrix& w, const Vector& b, const Vector& x, const Vector& upstream) {
    DualTrace trace;
    affine_tanh(w, b, x, &trace);
    return vjp_affine_tanh(w, trace, upstream);
}

Vector vjp_affine_tanh(const Matrix& w, const DualTrace& trace, const Vector& upstream) {
    check(trace.output.size() == upstream.size(), "vjp_affine_tanh: upstream dimension mismatch");
    Vector scaled(upstream.size());
    for (std::size_t i = 0; i < upstream.size(); ++i) {
        const double t = trace.output[i];
        scaled[i] = upstream[i] * (1.0 - t * t);
    }
    return matvec_transposed(w, scaled);
}

Cholesky::Cholesky(const Matrix& spd) : l_(spd.rows(), spd.cols()) {
    if (spd.rows() != spd.cols()) throw std::invalid_argument("Cholesky: matrix not square");
    const std::size_t n = spd.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = spd(j, j);
        const double* lj = l_.row_ptr(j);
        for (std::size_t k = 0; k < j; ++k) diag -= lj[k] * lj[k];
        if (diag <= 0.0) throw std::runtime_error("Cholesky: matrix not positive definite");
        const double ljj = std::sqrt(diag);
        l_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double acc = spd(i, j);
            const double* li = l_.row_ptr(i);
            for (std::size_t k = 0; k < j; ++k) acc -= li[k] * lj[k];
            l_(i, j) = acc / ljj;
        }
    }
}

Vector Cholesky::solve(const Vector& b) const {
    const std::size_t n = dim();
    check(b.size() == n, "Cholesky::solve: dimension mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = b[i];
        const double* li = l_.row_ptr(i);
        for (std::size_t k = 0; k < i; ++k) acc -= li[k] * y[k];
        y[i] = acc / li[i];
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double acc = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) acc -= l_(k, ii) * x[k];
        x[ii] = acc / l_(ii, ii);
    }
    return x;
}

} // namespace famx
