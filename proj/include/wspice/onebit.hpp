#pragma once

#include <string_view>
#include <vector>

#include "wspice/covariance.hpp"
#include "wspice/gaussian.hpp"
#include "wspice/quantizer.hpp"

namespace wspice {

enum class OneBitVariant { Spice, Likes, Slim, Iaa };

OneBitVariant parse_onebit_variant(std::string_view name);
std::string_view to_string(OneBitVariant variant);

struct OneBitConfig {
    OneBitVariant variant = OneBitVariant::Slim;
    double epsilon = 1e-4;
    double rel_tol = 1e-3;
    int max_iter = 150;
    SolverKind solver = SolverKind::Auto;
    CglsOptions cg;
    bool record_objective = true;
    Complex initial_amplitude{1e-3, 1e-3};
    double initial_eta = 0.0;

    /// Throws ConfigError on a bad combination (e.g. 1bLIKES with the CG solver).
    void validate() const;
};

/// Iterate of the one-bit algorithms; beta = eta * gamma and eta = sqrt(2) / sigma.
struct OneBitState {
    VectorXcd beta;
    VectorXd p;
    double eta = 0.0;
    int iterations = 0;
    bool converged = false;
    /// Objective at the start of each iteration and after the last; empty for 1bIAA.
    std::vector<double> objective_trace;
    /// Relative change of p and the new eta after each iteration.
    std::vector<double> change_trace;
    std::vector<double> eta_trace;
    /// Last R^{-1} h and R^{-1} g, used to warm-start the CG solver.
    VectorXcd rinv_h;
    VectorXcd rinv_g;

    /// eta > 0; otherwise the amplitude scale is not identifiable.
    bool scale_resolved() const { return eta > 0.0; }
    /// beta / eta when the scale is resolved, beta itself otherwise.
    VectorXcd amplitudes() const;
};

/// Starting iterate: beta_k = a for all k, p = |a|^2 (+ epsilon for 1bSLIM), eta = eta0.
OneBitState initial_state(const Dictionary& dict, const OneBitConfig& cfg);

/// g(n) = z_R(n) u(x_R(n)) + j z_I(n) u(x_I(n)) with
/// x_R(n) = z_R(n) (Re[(B beta)_n] - eta h_R(n)) and x_I likewise.
VectorXcd compute_g(const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& beta, double eta,
                    const VectorXcd& h);

/// Dense B diag(p) B^H + 2 I.
MatrixXcd build_onebit_R(const Dictionary& dict, const VectorXd& p);
std::unique_ptr<Covariance> make_onebit_covariance(const Dictionary& dict, const VectorXd& p, SolverKind solver,
                                                   const CglsOptions& cg = {});

/// max(0, -Re[h^H R^{-1} g] / (h^H R^{-1} h)); 0 for h = 0.
double eta_update(const Covariance& r, const VectorXcd& h, const VectorXcd& g);

/// P B^H R^{-1} (eta h + g).
VectorXcd beta_update(const Covariance& r, const VectorXd& p, const VectorXcd& h, const VectorXcd& g, double eta);

/// Per-column weights: ||b_k||^2 (1bSPICE), b_k^H R^{-1} b_k (1bLIKES),
/// p_k (b_k^H R^{-1} b_k)^2 (1bIAA), 1 / (p_k + epsilon) (1bSLIM).
VectorXd weight(OneBitVariant variant, const Covariance& r, const VectorXd& p, double epsilon);

/// |beta_k|^2 + epsilon for 1bSLIM, |beta_k| / sqrt(w_k) otherwise; floored at kPowerFloor.
VectorXd power_update(OneBitVariant variant, const VectorXcd& beta, const VectorXd& w, double epsilon);

/// Negative log-likelihood of the signs, sum of -ln Phi(x_R) - ln Phi(x_I).
double negative_log_likelihood(const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& beta,
                               double eta, const VectorXcd& h);

/// Likelihood plus the variant penalty:
///   1bSLIM  sum ln(|beta_k|^2 + epsilon)
///   1bSPICE sum |beta_k|^2 / p_k + tr R
///   1bLIKES sum |beta_k|^2 / p_k + ln|R|
/// Returns +infinity when a probability underflows to zero. `r` may be passed
/// to reuse an existing factorization of R(p). 1bIAA throws ConfigError.
double onebit_objective(OneBitVariant variant, const VectorXcd& beta, const VectorXd& p, double eta,
                        const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& h, double epsilon,
                        const Covariance* r = nullptr);

/// One pass of steps 2-7 of the one-bit weighted SPICE loop. Returns the
/// relative change of p.
double onebit_iterate(OneBitState& state, const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& h,
                      const OneBitConfig& cfg);

/// Iterates until the relative change of p is below rel_tol or max_iter is reached.
OneBitState run(const SignedMeasurements& z, const Dictionary& dict, const VectorXcd& h, const OneBitConfig& cfg);

}  // namespace wspice
