#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Cholesky>

#include "wspice/cg.hpp"
#include "wspice/operators.hpp"

namespace wspice {

enum class SolverKind { Auto, Dense, Toeplitz, Cgls };

SolverKind parse_solver_kind(std::string_view name);
std::string_view to_string(SolverKind kind);

/// Factorized (or matvec-only) form of R = B diag(p) B^H + diag(noise).
///
/// One instance per iterate; not safe for concurrent use because the dense
/// implementation builds R^{-1} lazily on the first quadratic-form request.
class Covariance {
public:
    Covariance(const Dictionary& dict, VectorXd powers, VectorXd noise);
    virtual ~Covariance() = default;
    Covariance(const Covariance&) = delete;
    Covariance& operator=(const Covariance&) = delete;

    const Dictionary& dictionary() const { return dict_; }
    const VectorXd& powers() const { return powers_; }
    const VectorXd& noise() const { return noise_; }

    /// R v through the dictionary operator.
    VectorXcd apply(const VectorXcd& v) const;
    /// tr R = sum_k p_k ||b_k||^2 + sum_n noise_n.
    double trace() const;

    /// R^{-1} v. `guess` is only used by iterative implementations.
    virtual VectorXcd solve(const VectorXcd& v, const VectorXcd* guess = nullptr) const = 0;
    /// b_k^H R^{-1} b_k for every dictionary column.
    virtual VectorXd dictionary_forms() const = 0;
    /// e_n^T R^{-1} e_n, i.e. the diagonal of R^{-1}.
    virtual VectorXd noise_forms() const = 0;
    /// ln det R. Throws NumericalError when the implementation cannot provide it.
    virtual double log_det() const = 0;
    virtual SolverKind kind() const = 0;

protected:
    const Dictionary& dict_;
    VectorXd powers_;
    VectorXd noise_;
};

/// Dense R with a Cholesky factorization. R is assembled from the dictionary
/// structure when it has one (2-D Fourier or DFT-Doppler Kronecker), which
/// avoids the O(N^2 M) product.
class DenseCovariance final : public Covariance {
public:
    DenseCovariance(const Dictionary& dict, VectorXd powers, VectorXd noise);

    VectorXcd solve(const VectorXcd& v, const VectorXcd* guess = nullptr) const override;
    VectorXd dictionary_forms() const override;
    VectorXd noise_forms() const override;
    double log_det() const override;
    SolverKind kind() const override { return SolverKind::Dense; }

    const MatrixXcd& matrix() const { return r_; }
    const MatrixXcd& inverse() const;

private:
    MatrixXcd r_;
    Eigen::LLT<MatrixXcd> llt_;
    mutable std::optional<MatrixXcd> inverse_;

    // Block-Toeplitz shortcut for structured dictionaries with a constant noise level.
    bool block_toeplitz() const;
    void compute_lag_sums() const;
    Index block_size_ = 0;
    mutable std::vector<MatrixXcd> lag_sums_;
    mutable VectorXd q_diag_;
};

/// Levinson recursion plus the Trench recurrence for a 1-D Fourier dictionary
/// with a tied noise level, where R is Hermitian Toeplitz. Solves cost
/// O(N log N); the full set of quadratic forms costs O(N^2 + M log M).
class ToeplitzCovariance final : public Covariance {
public:
    ToeplitzCovariance(const Dictionary& dict, VectorXd powers, VectorXd noise);

    VectorXcd solve(const VectorXcd& v, const VectorXcd* guess = nullptr) const override;
    VectorXd dictionary_forms() const override;
    VectorXd noise_forms() const override;
    double log_det() const override { return log_det_; }
    SolverKind kind() const override { return SolverKind::Toeplitz; }

    /// First column of R.
    const VectorXcd& first_column() const { return r_; }
    /// Column-minus-row diagonal sums D(d) = sum_{n-m=d} Q[m,n] of Q = R^{-1},
    /// stored at index d + N - 1.
    const VectorXcd& diagonal_sums() const { return diag_sums_; }

private:
    void levinson();
    void trench_sums();

    VectorXcd r_;
    VectorXcd x_;  // R^{-1} e_0
    double log_det_ = 0.0;
    VectorXcd diag_sums_;
    VectorXd q_diag_;
    // Spectra of the two Gohberg-Semencul generators, zero padded to fft_size_.
    Index fft_size_ = 0;
    VectorXcd gen1_hat_;
    VectorXcd gen2_hat_;
};

/// Matvec-only R; solves run conjugate gradients.
class CgCovariance final : public Covariance {
public:
    CgCovariance(const Dictionary& dict, VectorXd powers, VectorXd noise, CglsOptions opts);

    VectorXcd solve(const VectorXcd& v, const VectorXcd* guess = nullptr) const override;
    /// One CG solve per column; only sensible for small M.
    VectorXd dictionary_forms() const override;
    VectorXd noise_forms() const override;
    double log_det() const override;
    SolverKind kind() const override { return SolverKind::Cgls; }

    Index last_iterations() const { return last_iterations_; }
    /// True when solves use the low-rank preconditioner.
    bool preconditioned() const { return strong_.cols() > 0; }
    /// Columns kept explicitly by the preconditioner.
    Index preconditioner_rank() const { return strong_.cols(); }

    /// Most columns the preconditioner keeps; its setup costs O(N K^2).
    static constexpr Index kMaxPreconditionerRank = 64;

private:
    VectorXcd precondition(const VectorXcd& v) const;

    CglsOptions opts_;
    mutable Index last_iterations_ = 0;
    // M = level I + S D S^H with S the strongest columns; applied through
    // the Woodbury identity with the K x K factor of level D^{-1} + S^H S.
    double level_ = 0.0;
    MatrixXcd strong_;
    Eigen::LLT<MatrixXcd> core_;
};

/// Toeplitz for a 1-D Fourier dictionary with constant noise, dense otherwise.
SolverKind resolve_solver(SolverKind requested, const Dictionary& dict, const VectorXd& noise);

std::unique_ptr<Covariance> make_covariance(const Dictionary& dict, VectorXd powers, VectorXd noise,
                                            SolverKind kind, const CglsOptions& opts = {});

/// R assembled densely from its definition, B diag(p) B^H + diag(noise).
MatrixXcd dense_covariance_matrix(const Dictionary& dict, const VectorXd& powers, const VectorXd& noise);

/// True when the Kronecker Doppler factor is exactly the DFT steering matrix.
bool has_dft_doppler(const KroneckerFactors& f);

}  // namespace wspice
