#include "wspice/hp_spice.hpp"

#include <cmath>
#include <string>

namespace wspice {

namespace {

struct Correlations {
    VectorXcd rinv_y;  // R^{-1} y, which is also a_k^H R^{-1} y for the noise columns
    VectorXcd signal;  // B^H R^{-1} y
};

Correlations correlate(const Covariance& cov, const VectorXcd& y) {
    Correlations c;
    c.rinv_y = cov.solve(y);
    c.signal = cov.dictionary().adjoint_matvec(c.rinv_y);
    return c;
}

VectorXd floored(VectorXd v) { return v.cwiseMax(kPowerFloor); }

// Minimizer of sum |gbar_k|^2 / p_k + w_k p_k with gbar_k = p_k c_k.
AugmentedPowers reweight(const AugmentedPowers& p, const Correlations& c, const VectorXd& w_signal,
                         const VectorXd& w_noise, bool tied) {
    AugmentedPowers out;
    out.signal = floored(p.signal.cwiseProduct(c.signal.cwiseAbs()).cwiseQuotient(w_signal.cwiseSqrt()));
    if (tied) {
        const double level = p.noise(0) * c.rinv_y.norm() / std::sqrt(w_noise.sum());
        out.noise = VectorXd::Constant(p.noise.size(), std::max(level, kPowerFloor));
    } else {
        out.noise = floored(p.noise.cwiseProduct(c.rinv_y.cwiseAbs()).cwiseQuotient(w_noise.cwiseSqrt()));
    }
    return out;
}

AugmentedPowers spice_from(const AugmentedPowers& p, const Covariance& cov, const Correlations& c, bool tied) {
    return reweight(p, c, cov.dictionary().column_norms_sq(), VectorXd::Ones(p.noise.size()), tied);
}

AugmentedPowers slim_from(const AugmentedPowers& p, const Correlations& c, bool tied) {
    return reweight(p, c, p.signal.cwiseInverse(), p.noise.cwiseInverse(), tied);
}

AugmentedPowers iaa_from(const AugmentedPowers& p, const Covariance& cov, const Correlations& c, bool tied) {
    const VectorXd qs = cov.dictionary_forms();
    const VectorXd qn = cov.noise_forms();
    return reweight(p, c, p.signal.cwiseProduct(qs.cwiseAbs2()), p.noise.cwiseProduct(qn.cwiseAbs2()), tied);
}

AugmentedPowers likes_from(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                           const Covariance& cov, const Correlations& c, int inner, const HpOptions& opts) {
    if (inner < 1) {
        throw ConfigError("LIKES needs at least one inner iteration");
    }
    const VectorXd ws = cov.dictionary_forms();
    const VectorXd wn = cov.noise_forms();
    AugmentedPowers cur = reweight(p, c, ws, wn, opts.tied_noise);
    for (int l = 1; l < inner; ++l) {
        const auto inner_cov = build_covariance(dict, cur, opts);
        cur = reweight(cur, correlate(*inner_cov, y), ws, wn, opts.tied_noise);
    }
    return cur;
}

double objective_from(WeightScheme scheme, const AugmentedPowers& p, const Covariance& cov, const VectorXcd& y,
                      const Correlations& c) {
    const double fit = std::real(y.dot(c.rinv_y));
    switch (scheme) {
        case WeightScheme::Spice:
            return fit + cov.trace();
        case WeightScheme::Likes:
            return fit + cov.log_det();
        case WeightScheme::Slim:
            return fit + p.signal.array().log().sum() + p.noise.array().log().sum();
        case WeightScheme::Iaa:
            break;
    }
    throw ConfigError("IAA has no objective function");
}

double relative_change(const AugmentedPowers& next, const AugmentedPowers& prev) {
    const double denom = std::sqrt(prev.signal.squaredNorm() + prev.noise.squaredNorm());
    const double num = std::sqrt((next.signal - prev.signal).squaredNorm() + (next.noise - prev.noise).squaredNorm());
    return denom > 0.0 ? num / denom : num;
}

}  // namespace

VectorXd AugmentedPowers::stacked() const {
    VectorXd out(size());
    out << signal, noise;
    return out;
}

void AugmentedPowers::validate(const Dictionary& dict) const {
    require_size(signal.size(), dict.cols(), "AugmentedPowers signal");
    require_size(noise.size(), dict.rows(), "AugmentedPowers noise");
    if ((signal.array() < 0.0).any() || (noise.array() < 0.0).any()) {
        throw DimensionError("AugmentedPowers: negative power");
    }
}

WeightScheme parse_weight_scheme(std::string_view name) {
    if (name == "spice") return WeightScheme::Spice;
    if (name == "likes") return WeightScheme::Likes;
    if (name == "slim") return WeightScheme::Slim;
    if (name == "iaa") return WeightScheme::Iaa;
    throw ConfigError("unknown weight scheme '" + std::string(name) + "'");
}

std::string_view to_string(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::Spice:
            return "spice";
        case WeightScheme::Likes:
            return "likes";
        case WeightScheme::Slim:
            return "slim";
        case WeightScheme::Iaa:
            return "iaa";
    }
    return "slim";
}

std::unique_ptr<Covariance> build_covariance(const Dictionary& dict, const AugmentedPowers& p,
                                             const HpOptions& opts) {
    p.validate(dict);
    return make_covariance(dict, p.signal, p.noise, opts.solver, opts.cg);
}

AugmentedPowers spice_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                           const HpOptions& opts) {
    require_size(y.size(), dict.rows(), "spice_step data");
    const auto cov = build_covariance(dict, p, opts);
    return spice_from(p, *cov, correlate(*cov, y), opts.tied_noise);
}

AugmentedPowers likes_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y, int inner,
                           const HpOptions& opts) {
    require_size(y.size(), dict.rows(), "likes_step data");
    const auto cov = build_covariance(dict, p, opts);
    return likes_from(p, dict, y, *cov, correlate(*cov, y), inner, opts);
}

AugmentedPowers slim_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                          const HpOptions& opts) {
    require_size(y.size(), dict.rows(), "slim_step data");
    const auto cov = build_covariance(dict, p, opts);
    return slim_from(p, correlate(*cov, y), opts.tied_noise);
}

AugmentedPowers iaa_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                         const HpOptions& opts) {
    require_size(y.size(), dict.rows(), "iaa_step data");
    const auto cov = build_covariance(dict, p, opts);
    return iaa_from(p, *cov, correlate(*cov, y), opts.tied_noise);
}

VectorXcd lmmse_amplitudes(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                           const HpOptions& opts) {
    require_size(y.size(), dict.rows(), "lmmse_amplitudes data");
    const auto cov = build_covariance(dict, p, opts);
    return p.signal.cast<Complex>().cwiseProduct(dict.adjoint_matvec(cov->solve(y)));
}

VectorXd periodogram(const Dictionary& dict, const VectorXcd& y) {
    require_size(y.size(), dict.rows(), "periodogram data");
    const VectorXd norms = dict.column_norms_sq();
    return dict.adjoint_matvec(y).cwiseAbs2().cwiseQuotient(norms.cwiseAbs2());
}

double hp_objective(WeightScheme scheme, const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                    const HpOptions& opts) {
    if (scheme == WeightScheme::Iaa) {
        throw ConfigError("IAA has no objective function");
    }
    const auto cov = build_covariance(dict, p, opts);
    return objective_from(scheme, p, *cov, y, correlate(*cov, y));
}

AugmentedPowers initial_powers(const Dictionary& dict, const VectorXcd& y) {
    AugmentedPowers p;
    p.signal = floored(periodogram(dict, y));
    const double level = y.squaredNorm() / static_cast<double>(y.size());
    p.noise = VectorXd::Constant(y.size(), std::max(level, kPowerFloor));
    return p;
}

HpResult estimate_high_precision(const Dictionary& dict, const VectorXcd& y, const HpConfig& cfg) {
    require_size(y.size(), dict.rows(), "estimate_high_precision data");
    if (cfg.max_iter < 0 || !(cfg.rel_tol >= 0.0)) {
        throw ConfigError("estimate_high_precision: invalid iteration settings");
    }
    const bool trace = cfg.record_objective && cfg.scheme != WeightScheme::Iaa;
    const bool tied = cfg.options.tied_noise;
    HpResult out;
    AugmentedPowers p = initial_powers(dict, y);
    for (int it = 0; it < cfg.max_iter; ++it) {
        const auto cov = build_covariance(dict, p, cfg.options);
        const Correlations c = correlate(*cov, y);
        if (trace) out.objective_trace.push_back(objective_from(cfg.scheme, p, *cov, y, c));
        AugmentedPowers next;
        switch (cfg.scheme) {
            case WeightScheme::Spice:
                next = spice_from(p, *cov, c, tied);
                break;
            case WeightScheme::Likes:
                next = likes_from(p, dict, y, *cov, c, cfg.likes_inner, cfg.options);
                break;
            case WeightScheme::Slim:
                next = slim_from(p, c, tied);
                break;
            case WeightScheme::Iaa:
                next = iaa_from(p, *cov, c, tied);
                break;
        }
        const double change = relative_change(next, p);
        p = std::move(next);
        ++out.iterations;
        if (!std::isfinite(change)) {
            throw NumericalError("estimate_high_precision: non-finite power update");
        }
        if (change < cfg.rel_tol) {
            out.converged = true;
            break;
        }
    }
    const auto cov = build_covariance(dict, p, cfg.options);
    const Correlations c = correlate(*cov, y);
    if (trace) out.objective_trace.push_back(objective_from(cfg.scheme, p, *cov, y, c));
    out.amplitudes = p.signal.cast<Complex>().cwiseProduct(c.signal);
    out.powers = std::move(p);
    return out;
}

}  // namespace wspice
