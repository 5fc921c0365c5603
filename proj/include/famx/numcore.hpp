// Dense double-precision vector/matrix kernels and the hand-written
// vector-Jacobian products used by the toy backends.
//
// Everything here is a pure function with a fixed left-to-right accumulation
// order, so identical inputs give bit-identical outputs within one build.
// There is no autodiff graph: the network shapes are fixed and small, each
// architecture gets its own VJP.

#pragma once

#include <cstddef>
#include <vector>

namespace famx {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* row_ptr(std::size_t r) { return data_.data() + r * cols_; }
    const double* row_ptr(std::size_t r) const { return data_.data() + r * cols_; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

// y = M v
Vector matvec(const Matrix& m, const Vector& v);
// y = M^T v
Vector matvec_transposed(const Matrix& m, const Vector& v);
// C = A^T A (symmetric Gram matrix)
Matrix gram(const Matrix& a);
// C = A^T B
Matrix gram_cross(const Matrix& a, const Matrix& b);

double dot(const Vector& u, const Vector& v);
double norm2(const Vector& v);
double norm1(const Vector& v);
double norm_inf(const Vector& v);

// u.v / (|u| |v|), in [-1, 1]. Throws on zero-norm input.
double cosine(const Vector& u, const Vector& v);

// y += a * x
void axpy(double a, const Vector& x, Vector& y);
void scale(Vector& v, double a);
Vector add(const Vector& u, const Vector& v);
Vector sub(const Vector& u, const Vector& v);

Vector tanh_vec(const Vector& v);
Vector atanh_vec(const Vector& v);

// Forward-pass record for y = tanh(W x + b). A trace is valid only for the
// inputs it was recorded from.
struct DualTrace {
    Vector output; // tanh(W x + b); tanh' = 1 - output^2
};

Vector affine_tanh(const Matrix& w, const Vector& b, const Vector& x, DualTrace* trace = nullptr);

// Gradient w.r.t. x of a scalar loss, given upstream = dL/dy for
// y = tanh(W x + b): returns W^T (upstream .* (1 - tanh^2(W x + b))).
Vector vjp_affine_tanh(const Matrix& w, const Vector& b, const Vector& x, const Vector& upstream);
Vector vjp_affine_tanh(const Matrix& w, const DualTrace& trace, const Vector& upstream);

// Cholesky factorization of a symmetric positive-definite matrix.
// Throws std::runtime_error if the matrix is not positive definite.
class Cholesky {
public:
    Cholesky() = default;
    explicit Cholesky(const Matrix& spd);

    std::size_t dim() const { return l_.rows(); }
    // Solves (L L^T) x = b.
    Vector solve(const Vector& b) const;

private:
    Matrix l_; // lower-triangular factor
};

} // namespace famx
