#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "wspice/types.hpp"

namespace wspice {

/// Physical parameters linking normalized frequencies to range and velocity.
struct RadarParams {
    double chirp_rate_half = 0.0;  // mu, Hz/s
    double light_speed = 299792458.0;
    double sample_rate = 0.0;
    double carrier = 0.0;
    double chirp_duration = 0.0;
    double chip_duration = 1.0;
    double pri = 0.0;

    /// Throws ConfigError unless every field is strictly positive.
    void validate() const;
};

/// One ground-truth scatterer.
///
/// `range` is the normalized range frequency (LFMCW) or the delay in seconds
/// (PMCW); `doppler` is the normalized Doppler frequency in both models.
struct Target {
    double range = 0.0;
    double doppler = 0.0;
    Complex amplitude{0.0, 0.0};
    bool on_grid = true;
};

struct Scene {
    std::vector<Target> targets;

    /// Sum of |amplitude|^2, the per-sample signal power of both models.
    double signal_power() const;
};

/// +/-1 maximum-length sequence from a Fibonacci LFSR.
///
/// Bit i of `taps` is the coefficient of x^i in the feedback polynomial, so
/// x^5 + x^2 + 1 is 0x25. Throws ConfigError if the polynomial is not
/// primitive (the register state does not cycle with period 2^r - 1).
VectorXd mls_generate(int register_length, std::uint32_t taps);

/// Raised-cosine pulse with the given roll-off, truncated to (-5 chip, 5 chip].
double raised_cosine(double t, double chip, double rolloff = 0.25);

/// N1 x K matrix whose k-th column samples the pulse-shaped periodic code
/// delayed by delays[k] seconds.
MatrixXd pmcw_steering_matrix(const VectorXd& code, std::span<const double> delays, double chip);

/// Noiseless LFMCW data y(n1, n2) = sum gamma exp(j(w n1 + wd n2)) with n1, n2
/// counted from one, stacked with n1 fastest.
VectorXcd synthesize_lfmcw(const Scene& scene, Index n1, Index n2);

/// Noiseless PMCW data vec(S Gamma Phi^T) for continuous delays and Doppler
/// frequencies (n2 counted from zero).
VectorXcd synthesize_pmcw(const Scene& scene, const VectorXd& code, Index n2, double chip);

struct NoisyData {
    VectorXcd y;
    double noise_variance = 0.0;
};

/// Adds circular complex white Gaussian noise with variance
/// signal_power * 10^(-snr_db / 10). An infinite SNR adds nothing.
NoisyData add_noise(const VectorXcd& y, double snr_db, double signal_power, std::mt19937_64& rng);

/// Normalized (range, Doppler) frequencies to (range in m, velocity in m/s).
std::pair<double, double> freq_to_range_doppler(double range_freq, double doppler_freq, const RadarParams& params);
std::pair<double, double> range_doppler_to_freq(double range, double velocity, const RadarParams& params);

}  // namespace wspice
