#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "wspice/types.hpp"

namespace wspice {

struct CglsOptions {
    double tol = 1e-8;
    /// Zero means 5 * rhs.size().
    Index max_iter = 0;
    /// Precondition with identity plus the strongest dictionary columns where
    /// B B^H is a multiple of I (full uniform Fourier grids).
    bool precondition = true;
};

template <typename Scalar>
struct CglsResult {
    CVector<Scalar> x;
    Index iterations = 0;
    double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for a Hermitian positive definite system R x = rhs.
///
/// `apply` maps v to R v and `precondition` maps v to M^{-1} v for a Hermitian
/// positive definite M close to R; R itself is never formed. The stopping test
/// is on the unpreconditioned residual, ||rhs - R x|| <= tol ||rhs||. An
/// optional starting point warm-starts the iteration. Throws ConvergenceError
/// when max_iter is reached.
template <typename Scalar, typename Apply, typename Precondition>
CglsResult<Scalar> preconditioned_cgls_solve(const Apply& apply, const Precondition& precondition, const CVector<Scalar>& rhs,
                              const CglsOptions& opts = {}, const CVector<Scalar>* start = nullptr) {
    if (!(opts.tol > 0.0)) {
        throw ConfigError("cgls_solve: tolerance must be positive");
    }
    const Index n = rhs.size();
    const Index max_iter = opts.max_iter > 0 ? opts.max_iter : 5 * n;
    CglsResult<Scalar> out;
    const Scalar rhs_norm = rhs.norm();
    if (rhs_norm == Scalar(0)) {
        out.x = CVector<Scalar>::Zero(n);
        return out;
    }
    if (!std::isfinite(static_cast<double>(rhs_norm))) {
        throw NumericalError("cgls_solve: non-finite right-hand side");
    }

    CVector<Scalar> r;
    if (start != nullptr && start->size() == n) {
        out.x = *start;
        r = rhs - apply(out.x);
    } else {
        out.x = CVector<Scalar>::Zero(n);
        r = rhs;
    }
    CVector<Scalar> s = precondition(r);
    CVector<Scalar> d = s;
    Scalar rho = std::real(r.dot(s));
    Scalar res = r.norm();
    const Scalar target = static_cast<Scalar>(opts.tol) * rhs_norm;
    while (res > target) {
        if (out.iterations >= max_iter) {
            const double rel = static_cast<double>(res / rhs_norm);
            throw ConvergenceError("cgls_solve: no convergence after " + std::to_string(max_iter) +
                                       " iterations (relative residual " + std::to_string(rel) + ")",
                                   rel, max_iter);
        }
        const CVector<Scalar> rd = apply(d);
        const Scalar curvature = std::real(d.dot(rd));
        if (!(curvature > Scalar(0)) || !(rho > Scalar(0))) {
            throw NumericalError("cgls_solve: operator is not positive definite");
        }
        const Scalar alpha = rho / curvature;
        out.x += alpha * d;
        r -= alpha * rd;
        s = precondition(r);
        const Scalar rho_next = std::real(r.dot(s));
        d = s + (rho_next / rho) * d;
        rho = rho_next;
        res = r.norm();
        ++out.iterations;
    }
    out.relative_residual = static_cast<double>(res / rhs_norm);
    return out;
}

/// Unpreconditioned conjugate gradients.
template <typename Scalar, typename Apply>
CglsResult<Scalar> cgls_solve(const Apply& apply, const CVector<Scalar>& rhs, const CglsOptions& opts = {},
                              const CVector<Scalar>* start = nullptr) {
    return preconditioned_cgls_solve<Scalar>(apply, [](const CVector<Scalar>& v) { return v; }, rhs, opts, start);
}

}  // namespace wspice
