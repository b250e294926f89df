#include "wspice/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wspice {

namespace {

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

Index next_pow2(Index n) {
    Index p = 1;
    while (p < n) p <<= 1;
    return p;
}

void check_powers(const Dictionary& dict, const VectorXd& powers, const VectorXd& noise) {
    require_size(powers.size(), dict.cols(), "Covariance powers");
    require_size(noise.size(), dict.rows(), "Covariance noise");
    if ((powers.array() < 0.0).any() || (noise.array() < 0.0).any()) {
        throw DimensionError("Covariance: negative power");
    }
    if (!powers.allFinite() || !noise.allFinite()) {
        throw NumericalError("Covariance: non-finite power");
    }
}

VectorXcd causal(VectorXcd v, Index n) {
    v.tail(v.size() - n).setZero();
    return v;
}

bool is_constant(const VectorXd& v) {
    return v.size() == 0 || (v.array() == v(0)).all();
}

// Unscaled 2-D inverse DFT of the Kr x Kd power grid: c(a, b) = sum p e^{j(w_r a + w_d b)}.
MatrixXcd power_autocorrelation(const VectorXd& powers, Index kr, Index kd) {
    MatrixXcd c = Eigen::Map<const MatrixXd>(powers.data(), kr, kd).cast<Complex>();
    dft_columns(c, true);
    dft_rows(c, true);
    return c;
}

MatrixXcd build_fourier(const Fourier2DShape& f, const VectorXd& powers) {
    const MatrixXcd c = power_autocorrelation(powers, f.kr, f.kd);
    const Index n = f.n1 * f.n2;
    MatrixXcd r(n, n);
    for (Index col = 0; col < n; ++col) {
        const Index j1 = col % f.n1;
        const Index j2 = col / f.n1;
        for (Index row = 0; row < n; ++row) {
            r(row, col) = c(wrap(row % f.n1 - j1, f.kr), wrap(row / f.n1 - j2, f.kd));
        }
    }
    return r;
}

// Block (a, b) of R for B = Phi (x) S with DFT Doppler columns is S diag(c(:, a - b)) S^T.
MatrixXcd build_kronecker(const KroneckerFactors& f, const VectorXd& powers) {
    const Index n1 = f.code.rows();
    const Index n2 = f.doppler.rows();
    const Index kr = f.code.cols();
    const Index kd = f.doppler.cols();
    MatrixXcd c = Eigen::Map<const MatrixXd>(powers.data(), kr, kd).cast<Complex>();
    dft_rows(c, true);
    const MatrixXcd code = f.code.cast<Complex>();
    MatrixXcd r(n1 * n2, n1 * n2);
    for (Index lag = -(n2 - 1); lag <= n2 - 1; ++lag) {
        const MatrixXcd block = code * c.col(wrap(lag, kd)).asDiagonal() * code.transpose();
        for (Index b = 0; b < n2; ++b) {
            const Index a = b + lag;
            if (a < 0 || a >= n2) continue;
            r.block(a * n1, b * n1, n1, n1) = block;
        }
    }
    return r;
}

// S(lag) = sum_a Q[a, a + lag] over m x m blocks, stored at lag + nb - 1.
std::vector<MatrixXcd> block_lag_sums(const MatrixXcd& q, Index m) {
    const Index nb = q.rows() / m;
    std::vector<MatrixXcd> sums(2 * nb - 1, MatrixXcd::Zero(m, m));
    for (Index a = 0; a < nb; ++a) {
        for (Index b = 0; b < nb; ++b) sums[b - a + nb - 1] += q.block(a * m, b * m, m, m);
    }
    return sums;
}

// b_k^H Q b_k for a 2-D Fourier dictionary from the block lag sums of Q.
VectorXd fourier_forms(const Fourier2DShape& f, const std::vector<MatrixXcd>& sums) {
    MatrixXcd d = MatrixXcd::Zero(f.kr, f.kd);
    for (Index lag = -(f.n2 - 1); lag <= f.n2 - 1; ++lag) {
        const MatrixXcd& s = sums[lag + f.n2 - 1];
        const Index col = wrap(lag, f.kd);
        for (Index c1 = 0; c1 < f.n1; ++c1) {
            for (Index r1 = 0; r1 < f.n1; ++r1) d(wrap(c1 - r1, f.kr), col) += s(r1, c1);
        }
    }
    dft_columns(d, true);
    dft_rows(d, true);
    return Eigen::Map<const VectorXcd>(d.data(), d.size()).real();
}

VectorXd kronecker_forms(const KroneckerFactors& f, const std::vector<MatrixXcd>& sums) {
    const Index n2 = f.doppler.rows();
    const Index kr = f.code.cols();
    const Index kd = f.doppler.cols();
    const MatrixXcd code = f.code.cast<Complex>();
    MatrixXcd d = MatrixXcd::Zero(kr, kd);
    for (Index lag = -(n2 - 1); lag <= n2 - 1; ++lag) {
        const MatrixXcd qs = sums[lag + n2 - 1] * code;
        d.col(wrap(lag, kd)) += (code.array() * qs.array()).colwise().sum().transpose().matrix();
    }
    dft_rows(d, true);
    return Eigen::Map<const VectorXcd>(d.data(), d.size()).real();
}

}  // namespace

SolverKind parse_solver_kind(std::string_view name) {
    if (name == "auto") return SolverKind::Auto;
    if (name == "dense") return SolverKind::Dense;
    if (name == "toeplitz") return SolverKind::Toeplitz;
    if (name == "cgls" || name == "cg") return SolverKind::Cgls;
    throw ConfigError("unknown solver '" + std::string(name) + "' (expected auto, dense, toeplitz or cgls)");
}

std::string_view to_string(SolverKind kind) {
    switch (kind) {
        case SolverKind::Auto:
            return "auto";
        case SolverKind::Dense:
            return "dense";
        case SolverKind::Toeplitz:
            return "toeplitz";
        case SolverKind::Cgls:
            return "cgls";
    }
    return "auto";
}

bool has_dft_doppler(const KroneckerFactors& f) {
    const Index kd = f.doppler.cols();
    for (Index k = 0; k < kd; ++k) {
        for (Index n = 0; n < f.doppler.rows(); ++n) {
            const Complex expected = std::polar(1.0, grid_frequency((k * n) % kd, kd));
            if (std::abs(f.doppler(n, k) - expected) > 1e-12) return false;
        }
    }
    return true;
}

MatrixXcd dense_covariance_matrix(const Dictionary& dict, const VectorXd& powers, const VectorXd& noise) {
    check_powers(dict, powers, noise);
    MatrixXcd r;
    if (const auto* f = dict.fourier_shape()) {
        r = build_fourier(*f, powers);
    } else if (const auto* k = dict.kronecker_factors(); k != nullptr && has_dft_doppler(*k)) {
        r = build_kronecker(*k, powers);
    } else {
        const MatrixXcd b = dict.to_dense();
        r = b * powers.asDiagonal() * b.adjoint();
    }
    r.diagonal() += noise.cast<Complex>();
    return r;
}

Covariance::Covariance(const Dictionary& dict, VectorXd powers, VectorXd noise)
    : dict_(dict), powers_(std::move(powers)), noise_(std::move(noise)) {
    check_powers(dict_, powers_, noise_);
}

VectorXcd Covariance::apply(const VectorXcd& v) const {
    require_size(v.size(), dict_.rows(), "Covariance::apply");
    VectorXcd x = dict_.adjoint_matvec(v);
    x.array() *= powers_.array();
    VectorXcd out = dict_.matvec(x);
    out.array() += noise_.array() * v.array();
    return out;
}

double Covariance::trace() const { return powers_.dot(dict_.column_norms_sq()) + noise_.sum(); }

// ---------------------------------------------------------------------------

DenseCovariance::DenseCovariance(const Dictionary& dict, VectorXd powers, VectorXd noise)
    : Covariance(dict, std::move(powers), std::move(noise)) {
    r_ = dense_covariance_matrix(dict_, powers_, noise_);
    llt_.compute(r_);
    if (llt_.info() != Eigen::Success) {
        throw NumericalError("DenseCovariance: R is not positive definite");
    }
    if (const auto* f = dict_.fourier_shape()) {
        block_size_ = f->n1;
    } else if (const auto* k = dict_.kronecker_factors(); k != nullptr && has_dft_doppler(*k)) {
        block_size_ = k->code.rows();
    }
}

VectorXcd DenseCovariance::solve(const VectorXcd& v, const VectorXcd*) const {
    require_size(v.size(), dict_.rows(), "DenseCovariance::solve");
    return llt_.solve(v);
}

const MatrixXcd& DenseCovariance::inverse() const {
    if (!inverse_) {
        const Index n = r_.rows();
        MatrixXcd linv = MatrixXcd::Identity(n, n);
        llt_.matrixL().solveInPlace(linv);
        inverse_ = linv.adjoint() * linv;
    }
    return *inverse_;
}

bool DenseCovariance::block_toeplitz() const { return block_size_ > 0 && is_constant(noise_); }

// For Hermitian block-Toeplitz R with first and last block columns X, Y of
// Q = R^{-1}, the block Gohberg-Semencul displacement gives
//   Q[i+1, j+1] = Q[i, j] + X_{i+1} X_0^{-1} X_{j+1}^H - Y_i Y_last^{-1} Y_j^H,
// so the lag sums follow by walking block diagonals from the first block column.
void DenseCovariance::compute_lag_sums() const {
    if (!lag_sums_.empty()) return;
    const Index m = block_size_;
    const Index n = r_.rows();
    const Index nb = n / m;
    MatrixXcd ends = MatrixXcd::Zero(n, 2 * m);
    ends.topLeftCorner(m, m).setIdentity();
    ends.bottomRightCorner(m, m).setIdentity();
    ends = llt_.solve(ends);
    const auto x = ends.leftCols(m);
    const auto y = ends.rightCols(m);
    const MatrixXcd x0 = x.topRows(m);
    const MatrixXcd yl = y.bottomRows(m);
    // Rows of a = X X_0^{-1}, b = Y Y_last^{-1}; both pivots are Hermitian PD.
    const MatrixXcd a = x0.llt().solve(x.adjoint()).adjoint();
    const MatrixXcd b = yl.llt().solve(y.adjoint()).adjoint();

    lag_sums_.assign(2 * nb - 1, MatrixXcd::Zero(m, m));
    q_diag_.resize(n);
    MatrixXcd q(m, m);
    for (Index d = 0; d < nb; ++d) {
        // Lower block diagonal i - j = d: sum_j Q[j + d, j] = S(-d).
        q = x.middleRows(d * m, m);
        MatrixXcd sum = q;
        if (d == 0) q_diag_.head(m) = q.diagonal().real();
        for (Index j = 0; j + d + 1 < nb; ++j) {
            const Index i = j + d;
            q.noalias() += a.middleRows((i + 1) * m, m) * x.middleRows((j + 1) * m, m).adjoint();
            q.noalias() -= b.middleRows(i * m, m) * y.middleRows(j * m, m).adjoint();
            sum += q;
            if (d == 0) q_diag_.segment((j + 1) * m, m) = q.diagonal().real();
        }
        lag_sums_[nb - 1 - d] = sum;
        lag_sums_[nb - 1 + d] = sum.adjoint();
    }
}

VectorXd DenseCovariance::dictionary_forms() const {
    if (block_toeplitz()) {
        compute_lag_sums();
        if (const auto* f = dict_.fourier_shape()) return fourier_forms(*f, lag_sums_);
        return kronecker_forms(*dict_.kronecker_factors(), lag_sums_);
    }
    if (const auto* f = dict_.fourier_shape()) {
        return fourier_forms(*f, block_lag_sums(inverse(), f->n1));
    }
    if (const auto* k = dict_.kronecker_factors(); k != nullptr && has_dft_doppler(*k)) {
        return kronecker_forms(*k, block_lag_sums(inverse(), k->code.rows()));
    }
    const MatrixXcd b = dict_.to_dense();
    const MatrixXcd x = llt_.solve(b);
    return (b.conjugate().array() * x.array()).colwise().sum().real().transpose();
}

VectorXd DenseCovariance::noise_forms() const {
    if (block_toeplitz()) {
        compute_lag_sums();
        return q_diag_;
    }
    return inverse().diagonal().real();
}

double DenseCovariance::log_det() const {
    return 2.0 * llt_.matrixLLT().diagonal().real().array().log().sum();
}

// ---------------------------------------------------------------------------

ToeplitzCovariance::ToeplitzCovariance(const Dictionary& dict, VectorXd powers, VectorXd noise)
    : Covariance(dict, std::move(powers), std::move(noise)) {
    const auto* f = dict_.fourier_shape();
    if (f == nullptr || f->n2 != 1 || f->kd != 1) {
        throw ConfigError("Toeplitz solver needs a 1-D Fourier dictionary");
    }
    if (!is_constant(noise_)) {
        throw ConfigError("Toeplitz solver needs a constant noise level");
    }
    const Index n = f->n1;
    VectorXcd c = dft_inverse_unscaled(powers_.cast<Complex>());
    r_.resize(n);
    for (Index m = 0; m < n; ++m) r_(m) = c(wrap(m, f->kr));
    r_(0) += noise_(0);
    levinson();
    trench_sums();

    // Q = (L1 L1^H - L2 L2^H) / x0 with L1 lower-triangular Toeplitz from x and
    // L2 from (0, conj x_{N-1}, ..., conj x_1).
    fft_size_ = next_pow2(2 * n);
    VectorXcd g1 = VectorXcd::Zero(fft_size_);
    VectorXcd g2 = VectorXcd::Zero(fft_size_);
    g1.head(n) = x_;
    for (Index m = 1; m < n; ++m) g2(m) = std::conj(x_(n - m));
    gen1_hat_ = dft_forward(g1);
    gen2_hat_ = dft_forward(g2);
}

void ToeplitzCovariance::levinson() {
    const Index n = r_.size();
    double e = r_(0).real();
    if (!(e > 0.0)) {
        throw NumericalError("ToeplitzCovariance: non-positive diagonal");
    }
    log_det_ = std::log(e);
    VectorXcd a = VectorXcd::Zero(n);
    VectorXcd prev(n);
    a(0) = 1.0;
    for (Index m = 1; m < n; ++m) {
        Complex delta = 0.0;
        for (Index i = 0; i < m; ++i) delta += a(i) * r_(m - i);
        const Complex k = -delta / e;
        prev.head(m + 1) = a.head(m + 1);
        for (Index i = 0; i <= m; ++i) a(i) += k * std::conj(prev(m - i));
        e *= 1.0 - std::norm(k);
        if (!(e > 0.0)) {
            throw NumericalError("ToeplitzCovariance: R is not positive definite");
        }
        log_det_ += std::log(e);
    }
    x_ = a / e;
}

void ToeplitzCovariance::trench_sums() {
    const Index n = r_.size();
    const double x0 = x_(0).real();
    diag_sums_ = VectorXcd::Zero(2 * n - 1);
    q_diag_.resize(n);
    // Walk each lower diagonal i - j = d with Q[i+1, j+1] = Q[i, j] + (x_{i+1} conj x_{j+1}
    // - conj x_{N-1-i} x_{N-1-j}) / x0, starting from Q[d, 0] = x_d.
    for (Index d = 0; d < n; ++d) {
        Complex q = x_(d);
        Complex sum = q;
        if (d == 0) q_diag_(0) = q.real();
        for (Index j = 0; j + d + 1 < n; ++j) {
            const Index i = j + d;
            q += (x_(i + 1) * std::conj(x_(j + 1)) - std::conj(x_(n - 1 - i)) * x_(n - 1 - j)) / x0;
            sum += q;
            if (d == 0) q_diag_(j + 1) = q.real();
        }
        // Lower diagonal i - j = d is column-minus-row offset -d; the upper one is its conjugate.
        diag_sums_(n - 1 - d) = sum;
        diag_sums_(n - 1 + d) = std::conj(sum);
    }
}

VectorXcd ToeplitzCovariance::solve(const VectorXcd& v, const VectorXcd*) const {
    const Index n = r_.size();
    require_size(v.size(), n, "ToeplitzCovariance::solve");
    VectorXcd pad = VectorXcd::Zero(fft_size_);
    pad.head(n) = v;
    const VectorXcd v_hat = dft_forward(pad);
    // L^H v is a correlation and L u a convolution; padding to >= 2N keeps both acyclic.
    VectorXcd acc = gen1_hat_.cwiseProduct(dft_forward(causal(dft_inverse_unscaled(gen1_hat_.conjugate().cwiseProduct(v_hat)), n)));
    acc -= gen2_hat_.cwiseProduct(dft_forward(causal(dft_inverse_unscaled(gen2_hat_.conjugate().cwiseProduct(v_hat)), n)));
    const double scale = static_cast<double>(fft_size_) * static_cast<double>(fft_size_) * x_(0).real();
    return dft_inverse_unscaled(acc).head(n) / scale;
}

VectorXd ToeplitzCovariance::dictionary_forms() const {
    const auto* f = dict_.fourier_shape();
    const Index n = r_.size();
    VectorXcd d = VectorXcd::Zero(f->kr);
    for (Index lag = -(n - 1); lag <= n - 1; ++lag) d(wrap(lag, f->kr)) += diag_sums_(lag + n - 1);
    return dft_inverse_unscaled(d).real();
}

VectorXd ToeplitzCovariance::noise_forms() const { return q_diag_; }

// ---------------------------------------------------------------------------

CgCovariance::CgCovariance(const Dictionary& dict, VectorXd powers, VectorXd noise, CglsOptions opts)
    : Covariance(dict, std::move(powers), std::move(noise)), opts_(opts) {
    if ((noise_.array() <= 0.0).any()) {
        throw ConfigError("CG solver needs strictly positive noise powers");
    }
    const auto* f = dict_.fourier_shape();
    if (!opts_.precondition || f == nullptr || f->kr < f->n1 || f->kd < f->n2) return;

    // On a full grid B B^H = M I, so the smallest power contributes exactly
    // M p_min I and only the excess over it needs explicit columns.
    const double floor = powers_.minCoeff();
    level_ = noise_.mean() + floor * static_cast<double>(dict_.cols());
    const double n = static_cast<double>(dict_.rows());
    std::vector<Index> order;
    for (Index k = 0; k < powers_.size(); ++k) {
        if ((powers_(k) - floor) * n > level_) order.push_back(k);
    }
    if (order.empty()) return;
    const auto rank = std::min<Index>(static_cast<Index>(order.size()), kMaxPreconditionerRank);
    std::partial_sort(order.begin(), order.begin() + rank, order.end(),
                      [&](Index x, Index y) { return powers_(x) > powers_(y); });
    strong_.resize(dict_.rows(), rank);
    MatrixXcd core = MatrixXcd::Zero(rank, rank);
    for (Index j = 0; j < rank; ++j) {
        strong_.col(j) = dict_.column(order[j]);
        core(j, j) = level_ / (powers_(order[j]) - floor);
    }
    core += strong_.adjoint() * strong_;
    core_.compute(core);
    if (core_.info() != Eigen::Success) strong_.resize(0, 0);
}

VectorXcd CgCovariance::precondition(const VectorXcd& v) const {
    const VectorXcd coef = core_.solve(strong_.adjoint() * v);
    return (v - strong_ * coef) / level_;
}

VectorXcd CgCovariance::solve(const VectorXcd& v, const VectorXcd* guess) const {
    require_size(v.size(), dict_.rows(), "CgCovariance::solve");
    auto op = [this](const VectorXcd& x) { return apply(x); };
    auto res = preconditioned()
                   ? preconditioned_cgls_solve<double>(op, [this](const VectorXcd& x) { return precondition(x); }, v, opts_, guess)
                   : cgls_solve<double>(op, v, opts_, guess);
    last_iterations_ = res.iterations;
    return std::move(res.x);
}

VectorXd CgCovariance::dictionary_forms() const {
    VectorXd w(dict_.cols());
    for (Index k = 0; k < dict_.cols(); ++k) {
        const VectorXcd b = dict_.column(k);
        w(k) = std::real(b.dot(solve(b)));
    }
    return w;
}

VectorXd CgCovariance::noise_forms() const {
    const Index n = dict_.rows();
    VectorXd out(n);
    for (Index i = 0; i < n; ++i) {
        VectorXcd e = VectorXcd::Zero(n);
        e(i) = 1.0;
        out(i) = solve(e)(i).real();
    }
    return out;
}

double CgCovariance::log_det() const {
    throw NumericalError("log-determinant is not available from the CG solver");
}

// ---------------------------------------------------------------------------

SolverKind resolve_solver(SolverKind requested, const Dictionary& dict, const VectorXd& noise) {
    if (requested != SolverKind::Auto) return requested;
    if (const auto* f = dict.fourier_shape(); f != nullptr && f->n2 == 1 && f->kd == 1 && is_constant(noise)) {
        return SolverKind::Toeplitz;
    }
    return SolverKind::Dense;
}

std::unique_ptr<Covariance> make_covariance(const Dictionary& dict, VectorXd powers, VectorXd noise,
                                            SolverKind kind, const CglsOptions& opts) {
    switch (resolve_solver(kind, dict, noise)) {
        case SolverKind::Toeplitz:
            return std::make_unique<ToeplitzCovariance>(dict, std::move(powers), std::move(noise));
        case SolverKind::Cgls:
            return std::make_unique<CgCovariance>(dict, std::move(powers), std::move(noise), opts);
        default:
            return std::make_unique<DenseCovariance>(dict, std::move(powers), std::move(noise));
    }
}

}  // namespace wspice
