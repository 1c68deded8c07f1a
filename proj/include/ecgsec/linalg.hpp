#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ecgsec/error.hpp"

namespace ecgsec {

// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, value) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const noexcept { return data_; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct SymmetricEigen {
    std::vector<double> values;  // diagonal after convergence, in rotation order
    Matrix vectors;              // column j is the eigenvector for values[j]
    int sweeps = 0;
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Each sweep rotates
// every upper-triangle entry in row order; iteration stops once the
// off-diagonal Frobenius norm is at most rel_tol * ||S||_F (the Frobenius
// norm is invariant under the rotations, so it is taken once up front).
inline SymmetricEigen jacobi_eigen_symmetric(Matrix s, double rel_tol = 1e-12, int max_sweeps = 100) {
    if (s.rows() != s.cols())
        throw error(errc::dimension_mismatch, "symmetric eigensolver needs a square matrix, got " +
                                                  std::to_string(s.rows()) + "x" + std::to_string(s.cols()));
    const std::size_t n = s.rows();
    Matrix v = Matrix::identity(n);

    const auto off_norm = [&s, n] {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) acc += 2.0 * s(i, j) * s(i, j);
        return std::sqrt(acc);
    };

    double frob = 0.0;
    for (double x : s.data()) frob += x * x;
    frob = std::sqrt(frob);
    const double target = rel_tol * frob;

    int sweep = 0;
    double off = off_norm();
    while (off > target) {
        if (sweep >= max_sweeps)
            throw error(errc::no_convergence, "jacobi eigensolver: off-diagonal residual " +
                                                  std::to_string(off) + " after " +
                                                  std::to_string(sweep) + " sweeps");
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (apq == 0.0) continue;
                const double tau = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;

                s(p, p) -= t * apq;
                s(q, q) += t * apq;
                s(p, q) = 0.0;
                s(q, p) = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (i == p || i == q) continue;
                    const double aip = s(i, p);
                    const double aiq = s(i, q);
                    s(i, p) = c * aip - sn * aiq;
                    s(p, i) = s(i, p);
                    s(i, q) = sn * aip + c * aiq;
                    s(q, i) = s(i, q);
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p);
                    const double viq = v(i, q);
                    v(i, p) = c * vip - sn * viq;
                    v(i, q) = sn * vip + c * viq;
                }
            }
        }
        ++sweep;
        off = off_norm();
    }

    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = s(i, i);
    out.vectors = std::move(v);
    out.sweeps = sweep;
    return out;
}

}  // namespace ecgsec
