#include "wspice/operators.hpp"

#include <unsupported/Eigen/FFT>

namespace wspice {

namespace {

// Eigen::FFT caches twiddles per size and is not safe to share between threads.
Eigen::FFT<double>& fft_engine() {
    thread_local Eigen::FFT<double> engine = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::Unscaled);
        return f;
    }();
    return engine;
}

Index wrap(Index i, Index n) { return ((i % n) + n) % n; }

// kissfft mishandles length one, which is a legitimate axis here (N2 = 1).
void transform(VectorXcd& out, const VectorXcd& in, bool inverse) {
    if (in.size() <= 1) {
        out = in;
    } else if (inverse) {
        fft_engine().inv(out, in);
    } else {
        fft_engine().fwd(out, in);
    }
}

}  // namespace

VectorXcd dft_forward(const VectorXcd& x) {
    VectorXcd out(x.size());
    transform(out, x, false);
    return out;
}

VectorXcd dft_inverse_unscaled(const VectorXcd& x) {
    VectorXcd out(x.size());
    transform(out, x, true);
    return out;
}

void dft_columns(MatrixXcd& a, bool inverse) {
    VectorXcd in(a.rows());
    VectorXcd out(a.rows());
    for (Index c = 0; c < a.cols(); ++c) {
        in = a.col(c);
        transform(out, in, inverse);
        a.col(c) = out;
    }
}

void dft_rows(MatrixXcd& a, bool inverse) {
    VectorXcd in(a.cols());
    VectorXcd out(a.cols());
    for (Index r = 0; r < a.rows(); ++r) {
        in = a.row(r).transpose();
        transform(out, in, inverse);
        a.row(r) = out.transpose();
    }
}

MatrixXcd doppler_steering(Index n2, Index kd) {
    MatrixXcd phi(n2, kd);
    for (Index k = 0; k < kd; ++k) {
        const double w = grid_frequency(k, kd);
        for (Index n = 0; n < n2; ++n) {
            phi(n, k) = std::polar(1.0, w * static_cast<double>(n));
        }
    }
    return phi;
}

Dictionary Dictionary::dense(MatrixXcd matrix) {
    if (matrix.rows() == 0 || matrix.cols() == 0) {
        throw DimensionError("dense dictionary must be non-empty");
    }
    const Index n = matrix.rows();
    const Index m = matrix.cols();
    return Dictionary(std::move(matrix), n, m);
}

Dictionary Dictionary::fourier2d(Index n1, Index n2, Index kr, Index kd) {
    if (n1 < 1 || n2 < 1 || kr < 1 || kd < 1) {
        throw DimensionError("Fourier dictionary sizes must be positive");
    }
    return Dictionary(Fourier2DShape{n1, n2, kr, kd}, n1 * n2, kr * kd);
}

Dictionary Dictionary::kronecker(MatrixXd code, MatrixXcd doppler) {
    if (code.size() == 0 || doppler.size() == 0) {
        throw DimensionError("Kronecker factors must be non-empty");
    }
    const Index n = code.rows() * doppler.rows();
    const Index m = code.cols() * doppler.cols();
    return Dictionary(KroneckerFactors{std::move(code), std::move(doppler)}, n, m);
}

Dictionary::Kind Dictionary::kind() const {
    switch (rep_.index()) {
        case 0:
            return Kind::Dense;
        case 1:
            return Kind::Fourier2D;
        default:
            return Kind::Kronecker;
    }
}

void Dictionary::check_column(Index k) const {
    if (k < 0 || k >= cols_) {
        throw DimensionError("column index " + std::to_string(k) + " out of range [0, " +
                             std::to_string(cols_) + ")");
    }
}

VectorXcd Dictionary::matvec(const VectorXcd& x) const {
    require_size(x.size(), cols_, "Dictionary::matvec");
    if (const auto* b = dense_matrix()) {
        return *b * x;
    }
    if (const auto* f = fourier_shape()) {
        // Doppler axis first, keeping only the N2 slow-time outputs, then range axis.
        MatrixXcd grid = Eigen::Map<const MatrixXcd>(x.data(), f->kr, f->kd);
        dft_rows(grid, true);
        MatrixXcd slow(f->kr, f->n2);
        for (Index n2 = 0; n2 < f->n2; ++n2) slow.col(n2) = grid.col(wrap(n2, f->kd));
        dft_columns(slow, true);
        VectorXcd y(rows_);
        for (Index n2 = 0; n2 < f->n2; ++n2) {
            for (Index n1 = 0; n1 < f->n1; ++n1) {
                y(n2 * f->n1 + n1) = slow(wrap(n1, f->kr), n2);
            }
        }
        return y;
    }
    const auto& k = *kronecker_factors();
    Eigen::Map<const MatrixXcd> gamma(x.data(), k.code.cols(), k.doppler.cols());
    MatrixXcd y = (k.code.cast<Complex>() * gamma) * k.doppler.transpose();
    return Eigen::Map<const VectorXcd>(y.data(), y.size());
}

VectorXcd Dictionary::adjoint_matvec(const VectorXcd& y) const {
    require_size(y.size(), rows_, "Dictionary::adjoint_matvec");
    if (const auto* b = dense_matrix()) {
        return b->adjoint() * y;
    }
    if (const auto* f = fourier_shape()) {
        MatrixXcd slow = MatrixXcd::Zero(f->kr, f->n2);
        for (Index n2 = 0; n2 < f->n2; ++n2) {
            for (Index n1 = 0; n1 < f->n1; ++n1) {
                slow(wrap(n1, f->kr), n2) += y(n2 * f->n1 + n1);
            }
        }
        dft_columns(slow, false);
        MatrixXcd grid = MatrixXcd::Zero(f->kr, f->kd);
        for (Index n2 = 0; n2 < f->n2; ++n2) grid.col(wrap(n2, f->kd)) += slow.col(n2);
        dft_rows(grid, false);
        return Eigen::Map<const VectorXcd>(grid.data(), grid.size());
    }
    const auto& k = *kronecker_factors();
    Eigen::Map<const MatrixXcd> data(y.data(), k.code.rows(), k.doppler.rows());
    MatrixXcd x = (k.code.transpose().cast<Complex>() * data) * k.doppler.conjugate();
    return Eigen::Map<const VectorXcd>(x.data(), x.size());
}

VectorXcd Dictionary::column(Index k) const {
    check_column(k);
    if (const auto* b = dense_matrix()) {
        return b->col(k);
    }
    if (const auto* f = fourier_shape()) {
        const double wr = grid_frequency(k % f->kr, f->kr);
        const double wd = grid_frequency(k / f->kr, f->kd);
        VectorXcd c(rows_);
        for (Index n2 = 0; n2 < f->n2; ++n2) {
            for (Index n1 = 0; n1 < f->n1; ++n1) {
                c(n2 * f->n1 + n1) = std::polar(1.0, wr * n1 + wd * n2);
            }
        }
        return c;
    }
    const auto& f = *kronecker_factors();
    const Index kr = k % f.code.cols();
    const Index kd = k / f.code.cols();
    VectorXcd c(rows_);
    for (Index n2 = 0; n2 < f.doppler.rows(); ++n2) {
        c.segment(n2 * f.code.rows(), f.code.rows()) = f.doppler(n2, kd) * f.code.col(kr).cast<Complex>();
    }
    return c;
}

VectorXcd Dictionary::row(Index n) const {
    if (n < 0 || n >= rows_) {
        throw DimensionError("row index " + std::to_string(n) + " out of range");
    }
    if (const auto* b = dense_matrix()) {
        return b->row(n).transpose();
    }
    VectorXcd r(cols_);
    if (const auto* f = fourier_shape()) {
        const Index n1 = n % f->n1;
        const Index n2 = n / f->n1;
        for (Index kd = 0; kd < f->kd; ++kd) {
            for (Index kr = 0; kr < f->kr; ++kr) {
                r(kd * f->kr + kr) =
                    std::polar(1.0, grid_frequency(kr, f->kr) * n1 + grid_frequency(kd, f->kd) * n2);
            }
        }
        return r;
    }
    const auto& f = *kronecker_factors();
    const Index n1 = n % f.code.rows();
    const Index n2 = n / f.code.rows();
    for (Index kd = 0; kd < f.doppler.cols(); ++kd) {
        for (Index kr = 0; kr < f.code.cols(); ++kr) {
            r(kd * f.code.cols() + kr) = f.code(n1, kr) * f.doppler(n2, kd);
        }
    }
    return r;
}

double Dictionary::column_norm_sq(Index k) const {
    check_column(k);
    if (const auto* b = dense_matrix()) {
        return b->col(k).squaredNorm();
    }
    if (fourier_shape() != nullptr) {
        return static_cast<double>(rows_);
    }
    const auto& f = *kronecker_factors();
    return f.code.col(k % f.code.cols()).squaredNorm() * f.doppler.col(k / f.code.cols()).squaredNorm();
}

VectorXd Dictionary::column_norms_sq() const {
    if (const auto* b = dense_matrix()) {
        return b->colwise().squaredNorm().transpose();
    }
    if (fourier_shape() != nullptr) {
        return VectorXd::Constant(cols_, static_cast<double>(rows_));
    }
    const auto& f = *kronecker_factors();
    const VectorXd code = f.code.colwise().squaredNorm().transpose();
    const VectorXd dop = f.doppler.colwise().squaredNorm().transpose();
    VectorXd out(cols_);
    for (Index kd = 0; kd < dop.size(); ++kd) out.segment(kd * code.size(), code.size()) = code * dop(kd);
    return out;
}

MatrixXcd Dictionary::to_dense() const {
    if (const auto* b = dense_matrix()) {
        return *b;
    }
    MatrixXcd out(rows_, cols_);
    for (Index k = 0; k < cols_; ++k) out.col(k) = column(k);
    return out;
}

}  // namespace wspice
