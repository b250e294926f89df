#pragma once

#include <string_view>
#include <vector>

#include "wspice/covariance.hpp"

namespace wspice {

/// Powers of the augmented model A = [B I]: M signal powers followed by N noise powers.
struct AugmentedPowers {
    VectorXd signal;
    VectorXd noise;

    Index size() const { return signal.size() + noise.size(); }
    VectorXd stacked() const;
    /// Throws unless sizes match the dictionary and every entry is >= 0.
    void validate(const Dictionary& dict) const;
};

enum class WeightScheme { Spice, Likes, Slim, Iaa };

WeightScheme parse_weight_scheme(std::string_view name);
std::string_view to_string(WeightScheme scheme);

struct HpOptions {
    SolverKind solver = SolverKind::Auto;
    CglsOptions cg;
    /// Estimate one noise power shared by all samples instead of N separate ones.
    bool tied_noise = false;
};

std::unique_ptr<Covariance> build_covariance(const Dictionary& dict, const AugmentedPowers& p,
                                             const HpOptions& opts = {});

/// p_k' = p_k |a_k^H R^{-1} y| / ||a_k||.
AugmentedPowers spice_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                           const HpOptions& opts = {});
/// Freezes w_k = a_k^H R^{-1} a_k at the current R and runs `inner` SPICE-type updates with them.
AugmentedPowers likes_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y, int inner = 1,
                           const HpOptions& opts = {});
/// p_k' = p_k^{3/2} |a_k^H R^{-1} y|.
AugmentedPowers slim_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                          const HpOptions& opts = {});
/// p_k' = p_k^{1/2} |a_k^H R^{-1} y| / (a_k^H R^{-1} a_k).
AugmentedPowers iaa_step(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                         const HpOptions& opts = {});

/// gamma = P_1 B^H R^{-1} y.
VectorXcd lmmse_amplitudes(const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                           const HpOptions& opts = {});

/// |b_k^H y|^2 / ||b_k||^4, the matched-filter power spectrum.
VectorXd periodogram(const Dictionary& dict, const VectorXcd& y);

/// Criterion minimized by the scheme at p:
///   SPICE y^H R^{-1} y + sum ||a_k||^2 p_k
///   LIKES y^H R^{-1} y + ln|R|
///   SLIM  y^H R^{-1} y + sum ln p_k   (signal and noise entries)
/// IAA has none; asking for it throws ConfigError.
double hp_objective(WeightScheme scheme, const AugmentedPowers& p, const Dictionary& dict, const VectorXcd& y,
                    const HpOptions& opts = {});

struct HpConfig {
    WeightScheme scheme = WeightScheme::Slim;
    int likes_inner = 1;
    double rel_tol = 1e-3;
    int max_iter = 150;
    HpOptions options;
    bool record_objective = true;
};

struct HpResult {
    VectorXcd amplitudes;
    AugmentedPowers powers;
    int iterations = 0;
    bool converged = false;
    /// Objective at the start of every iteration plus the final one; empty for IAA.
    std::vector<double> objective_trace;
};

/// Periodogram start (noise at ||y||^2 / N), weighted-SPICE updates until the
/// relative change of p drops below rel_tol, then LMMSE amplitudes.
HpResult estimate_high_precision(const Dictionary& dict, const VectorXcd& y, const HpConfig& cfg);

/// Starting point used by estimate_high_precision.
AugmentedPowers initial_powers(const Dictionary& dict, const VectorXcd& y);

}  // namespace wspice
