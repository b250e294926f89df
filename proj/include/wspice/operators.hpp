#pragma once

#include <variant>

#include "wspice/types.hpp"

namespace wspice {

/// Sizes of a uniform-grid 2-D Fourier dictionary.
///
/// Rows are indexed by (n1, n2) with n1 fastest; columns by (kr, kd) with kr
/// fastest. Column (kr, kd) is psi_{n2}(2 pi kd / kd_count) (x) psi_{n1}(2 pi kr / kr_count).
struct Fourier2DShape {
    Index n1 = 1;
    Index n2 = 1;
    Index kr = 1;
    Index kd = 1;
};

/// Factors of a dictionary B = doppler (x) code, as in a phase-coded radar.
struct KroneckerFactors {
    MatrixXd code;      // N1 x Kr, real delay-steering matrix
    MatrixXcd doppler;  // N2 x Kd, Doppler steering rows
};

/// Immutable N x M linear operator standing in for a sparse-recovery dictionary.
///
/// All indices are zero-based. The Fourier path never materializes B; the
/// Kronecker path works on the N1 x N2 reshaped data. Instances are safe to
/// share across threads.
class Dictionary {
public:
    enum class Kind { Dense, Fourier2D, Kronecker };

    static Dictionary dense(MatrixXcd matrix);
    static Dictionary fourier2d(Index n1, Index n2, Index kr, Index kd);
    static Dictionary kronecker(MatrixXd code, MatrixXcd doppler);

    Kind kind() const;
    Index rows() const { return rows_; }
    Index cols() const { return cols_; }

    /// B x.
    VectorXcd matvec(const VectorXcd& x) const;
    /// B^H y.
    VectorXcd adjoint_matvec(const VectorXcd& y) const;

    /// k-th column b_k of B.
    VectorXcd column(Index k) const;
    /// n-th row of B, returned as a column vector (b_n with b_n^T the row).
    VectorXcd row(Index n) const;

    double column_norm_sq(Index k) const;
    VectorXd column_norms_sq() const;

    MatrixXcd to_dense() const;

    /// Non-null only for the matching kind.
    const MatrixXcd* dense_matrix() const { return std::get_if<MatrixXcd>(&rep_); }
    const Fourier2DShape* fourier_shape() const { return std::get_if<Fourier2DShape>(&rep_); }
    const KroneckerFactors* kronecker_factors() const { return std::get_if<KroneckerFactors>(&rep_); }

private:
    using Rep = std::variant<MatrixXcd, Fourier2DShape, KroneckerFactors>;

    Dictionary(Rep rep, Index rows, Index cols) : rep_(std::move(rep)), rows_(rows), cols_(cols) {}

    void check_column(Index k) const;

    Rep rep_;
    Index rows_;
    Index cols_;
};

/// Uniform DFT grid frequency 2 pi k / count.
inline double grid_frequency(Index k, Index count) {
    return 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(count);
}

/// N2 x Kd matrix with entries exp(j * 2 pi kd / Kd * n2), n2 zero-based.
MatrixXcd doppler_steering(Index n2, Index kd);

/// Unscaled 1-D DFTs shared by the structured operators and covariance code.
/// forward: X[k] = sum_n x[n] e^{-j 2 pi k n / K}; inverse: x[n] = sum_k X[k] e^{+j 2 pi k n / K}.
VectorXcd dft_forward(const VectorXcd& x);
VectorXcd dft_inverse_unscaled(const VectorXcd& x);

/// Column-wise / row-wise transforms of a matrix (each column or row independently).
void dft_columns(MatrixXcd& a, bool inverse);
void dft_rows(MatrixXcd& a, bool inverse);

}  // namespace wspice
