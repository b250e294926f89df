#pragma once

#include <cmath>
#include <random>

#include "wspice/types.hpp"

namespace wspice::test {

inline VectorXcd random_complex(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    VectorXcd v(n);
    for (auto& x : v) x = {g(rng), g(rng)};
    return v;
}

inline MatrixXcd random_complex(Index r, Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    MatrixXcd m(r, c);
    for (Index j = 0; j < c; ++j) {
        for (Index i = 0; i < r; ++i) m(i, j) = {g(rng), g(rng)};
    }
    return m;
}

inline MatrixXd random_real(Index r, Index c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    MatrixXd m(r, c);
    for (Index j = 0; j < c; ++j) {
        for (Index i = 0; i < r; ++i) m(i, j) = g(rng);
    }
    return m;
}

inline VectorXd random_positive(Index n, std::mt19937_64& rng, double lo = 0.1, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    VectorXd v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

/// Explicit 2-D Fourier dictionary built from the column definition.
inline MatrixXcd fourier_dense(Index n1, Index n2, Index kr, Index kd) {
    MatrixXcd b(n1 * n2, kr * kd);
    for (Index d = 0; d < kd; ++d) {
        for (Index r = 0; r < kr; ++r) {
            const double wr = 2.0 * M_PI * static_cast<double>(r) / static_cast<double>(kr);
            const double wd = 2.0 * M_PI * static_cast<double>(d) / static_cast<double>(kd);
            for (Index j = 0; j < n2; ++j) {
                for (Index i = 0; i < n1; ++i) {
                    b(j * n1 + i, d * kr + r) = std::polar(1.0, wr * static_cast<double>(i) + wd * static_cast<double>(j));
                }
            }
        }
    }
    return b;
}

/// Kronecker product of two dense matrices.
inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

inline double max_abs(const VectorXcd& a, const VectorXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }
inline double max_abs(const VectorXd& a, const VectorXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace wspice::test
