#include "wspice/onebit.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace wspice {

OneBitVariant parse_onebit_variant(std::string_view name) {
    if (name == "1bspice" || name == "spice") return OneBitVariant::Spice;
    if (name == "1blikes" || name == "likes") return OneBitVariant::Likes;
    if (name == "1bslim" || name == "slim") return OneBitVariant::Slim;
    if (name == "1biaa" || name == "iaa") return OneBitVariant::Iaa;
    throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected 1bspice, 1blikes, 1bslim or 1biaa)");
}

std::string_view to_string(OneBitVariant variant) {
    switch (variant) {
        case OneBitVariant::Spice:
            return "1bspice";
        case OneBitVariant::Likes:
            return "1blikes";
        case OneBitVariant::Slim:
            return "1bslim";
        case OneBitVariant::Iaa:
            return "1biaa";
    }
    return "1bslim";
}

void OneBitConfig::validate() const {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(rel_tol >= 0.0)) throw ConfigError("rel_tol must be non-negative");
    if (max_iter < 0) throw ConfigError("max_iter must be non-negative");
    if (!(initial_eta >= 0.0)) throw ConfigError("initial eta must be non-negative");
    if (solver == SolverKind::Cgls && (variant == OneBitVariant::Likes || variant == OneBitVariant::Iaa)) {
        throw ConfigError(std::string(to_string(variant)) +
                          " needs b_k^H R^{-1} b_k for every column; use the dense or toeplitz solver");
    }
}

VectorXcd OneBitState::amplitudes() const {
    if (!scale_resolved()) return beta;
    return beta / eta;
}

OneBitState initial_state(const Dictionary& dict, const OneBitConfig& cfg) {
    OneBitState s;
    s.beta = VectorXcd::Constant(dict.cols(), cfg.initial_amplitude);
    // For 1bSLIM, p^t = |beta^t|^2 + epsilon keeps the log penalty majorizer tight from the first step.
    const double extra = cfg.variant == OneBitVariant::Slim ? cfg.epsilon : 0.0;
    s.p = VectorXd::Constant(dict.cols(), std::max(std::norm(cfg.initial_amplitude) + extra, kPowerFloor));
    s.eta = cfg.initial_eta;
    return s;
}

VectorXcd compute_g(const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& beta, double eta,
                    const VectorXcd& h) {
    require_size(z.size(), dict.rows(), "compute_g signs");
    require_size(h.size(), dict.rows(), "compute_g threshold");
    const VectorXcd bb = dict.matvec(beta);
    VectorXcd g(bb.size());
    for (Index n = 0; n < bb.size(); ++n) {
        const double zr = z.z(n).real();
        const double zi = z.z(n).imag();
        const double xr = zr * (bb(n).real() - eta * h(n).real());
        const double xi = zi * (bb(n).imag() - eta * h(n).imag());
        g(n) = Complex(zr * mills_u(xr), zi * mills_u(xi));
    }
    return g;
}

MatrixXcd build_onebit_R(const Dictionary& dict, const VectorXd& p) {
    return dense_covariance_matrix(dict, p, VectorXd::Constant(dict.rows(), 2.0));
}

std::unique_ptr<Covariance> make_onebit_covariance(const Dictionary& dict, const VectorXd& p, SolverKind solver,
                                                   const CglsOptions& cg) {
    return make_covariance(dict, p, VectorXd::Constant(dict.rows(), 2.0), solver, cg);
}

namespace {

double eta_from(const VectorXcd& h, const VectorXcd& rinv_h, const VectorXcd& rinv_g) {
    const double denom = std::real(h.dot(rinv_h));
    if (!(denom > 0.0)) return 0.0;
    return std::max(0.0, -std::real(h.dot(rinv_g)) / denom);
}

}  // namespace

double eta_update(const Covariance& r, const VectorXcd& h, const VectorXcd& g) {
    if (h.isZero(0.0)) return 0.0;
    return eta_from(h, r.solve(h), r.solve(g));
}

VectorXcd beta_update(const Covariance& r, const VectorXd& p, const VectorXcd& h, const VectorXcd& g, double eta) {
    require_size(p.size(), r.dictionary().cols(), "beta_update powers");
    const VectorXcd rhs = eta * h + g;
    return p.cast<Complex>().cwiseProduct(r.dictionary().adjoint_matvec(r.solve(rhs)));
}

VectorXd weight(OneBitVariant variant, const Covariance& r, const VectorXd& p, double epsilon) {
    switch (variant) {
        case OneBitVariant::Spice:
            return r.dictionary().column_norms_sq();
        case OneBitVariant::Likes:
            return r.dictionary_forms();
        case OneBitVariant::Iaa:
            return p.cwiseProduct(r.dictionary_forms().cwiseAbs2());
        case OneBitVariant::Slim:
            return (p.array() + epsilon).inverse().matrix();
    }
    return {};
}

VectorXd power_update(OneBitVariant variant, const VectorXcd& beta, const VectorXd& w, double epsilon) {
    VectorXd p;
    if (variant == OneBitVariant::Slim) {
        p = (beta.cwiseAbs2().array() + epsilon).matrix();
    } else {
        require_size(w.size(), beta.size(), "power_update weights");
        if ((w.array() <= 0.0).any()) {
            throw NumericalError("power_update: non-positive weight");
        }
        p = beta.cwiseAbs().cwiseQuotient(w.cwiseSqrt());
    }
    return p.cwiseMax(kPowerFloor);
}

double negative_log_likelihood(const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& beta,
                               double eta, const VectorXcd& h) {
    require_size(z.size(), dict.rows(), "negative_log_likelihood signs");
    require_size(h.size(), dict.rows(), "negative_log_likelihood threshold");
    const VectorXcd bb = dict.matvec(beta);
    double total = 0.0;
    for (Index n = 0; n < bb.size(); ++n) {
        const double xr = z.z(n).real() * (bb(n).real() - eta * h(n).real());
        const double xi = z.z(n).imag() * (bb(n).imag() - eta * h(n).imag());
        total -= log_std_normal_cdf(xr) + log_std_normal_cdf(xi);
    }
    return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
}

double onebit_objective(OneBitVariant variant, const VectorXcd& beta, const VectorXd& p, double eta,
                        const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& h, double epsilon,
                        const Covariance* r) {
    if (variant == OneBitVariant::Iaa) {
        throw ConfigError("1bIAA has no objective function");
    }
    const double fit = negative_log_likelihood(z, dict, beta, eta, h);
    if (variant == OneBitVariant::Slim) {
        return fit + (beta.cwiseAbs2().array() + epsilon).log().sum();
    }
    require_size(p.size(), dict.cols(), "onebit_objective powers");
    const double ratio = beta.cwiseAbs2().cwiseQuotient(p).sum();
    std::unique_ptr<Covariance> own;
    if (r == nullptr) {
        own = make_onebit_covariance(dict, p, SolverKind::Auto);
        r = own.get();
    }
    const double penalty = variant == OneBitVariant::Spice ? r->trace() : r->log_det();
    const double total = fit + ratio + penalty;
    return std::isfinite(total) ? total : std::numeric_limits<double>::infinity();
}

double onebit_iterate(OneBitState& s, const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& h,
                      const OneBitConfig& cfg) {
    const VectorXcd g = compute_g(z, dict, s.beta, s.eta, h);
    const auto r = make_onebit_covariance(dict, s.p, cfg.solver, cfg.cg);
    if (cfg.record_objective && cfg.variant != OneBitVariant::Iaa) {
        s.objective_trace.push_back(onebit_objective(cfg.variant, s.beta, s.p, s.eta, z, dict, h, cfg.epsilon, r.get()));
    }
    s.rinv_h = r->solve(h, s.rinv_h.size() == h.size() ? &s.rinv_h : nullptr);
    s.rinv_g = r->solve(g, s.rinv_g.size() == g.size() ? &s.rinv_g : nullptr);
    const double eta = h.isZero(0.0) ? 0.0 : eta_from(h, s.rinv_h, s.rinv_g);
    VectorXcd beta = s.p.cast<Complex>().cwiseProduct(dict.adjoint_matvec(eta * s.rinv_h + s.rinv_g));
    const VectorXd w = weight(cfg.variant, *r, s.p, cfg.epsilon);
    VectorXd p = power_update(cfg.variant, beta, w, cfg.epsilon);
    if (!beta.allFinite() || !p.allFinite() || !std::isfinite(eta)) {
        throw NumericalError("one-bit iteration produced non-finite values at iteration " +
                             std::to_string(s.iterations + 1));
    }
    const double change = (p - s.p).norm() / s.p.norm();
    s.beta = std::move(beta);
    s.p = std::move(p);
    s.eta = eta;
    ++s.iterations;
    s.change_trace.push_back(change);
    s.eta_trace.push_back(eta);
    return change;
}

OneBitState run(const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& h, const OneBitConfig& cfg) {
    cfg.validate();
    require_size(z.size(), dict.rows(), "run signs");
    require_size(h.size(), dict.rows(), "run threshold");
    OneBitState s = initial_state(dict, cfg);
    while (s.iterations < cfg.max_iter) {
        if (onebit_iterate(s, z, dict, h, cfg) < cfg.rel_tol) {
            s.converged = true;
            break;
        }
    }
    if (cfg.record_objective && cfg.variant != OneBitVariant::Iaa) {
        std::unique_ptr<Covariance> r;
        if (cfg.variant != OneBitVariant::Slim) r = make_onebit_covariance(dict, s.p, cfg.solver, cfg.cg);
        const double last = onebit_objective(cfg.variant, s.beta, s.p, s.eta, z, dict, h, cfg.epsilon, r.get());
        if (!std::isfinite(last)) {
            throw NumericalError("one-bit objective is not finite after the last iteration");
        }
        s.objective_trace.push_back(last);
    }
    return s;
}

}  // namespace wspice
