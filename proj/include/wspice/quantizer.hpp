#pragma once

#include <array>
#include <random>
#include <string_view>

#include "wspice/types.hpp"

namespace wspice {

enum class ThresholdScheme { Zero, PerSample, PerPri };

ThresholdScheme parse_threshold_scheme(std::string_view name);
std::string_view to_string(ThresholdScheme scheme);

/// Known comparator reference h. For PerPri, `block` is the PRI length N1 and
/// h is constant on each block.
struct Threshold {
    VectorXcd values;
    ThresholdScheme scheme = ThresholdScheme::PerSample;
    Index block = 1;
};

/// Signs of the real and imaginary parts of y - h, each +/-1.
struct SignedMeasurements {
    VectorXcd z;

    Index size() const { return z.size(); }
    /// True when every entry is one of +/-1 +/- j.
    bool valid() const;
};

/// sign(Re[y - h]) + j sign(Im[y - h]) with sign(0) = +1.
SignedMeasurements signc(const VectorXcd& y, const VectorXcd& h);
SignedMeasurements signc(const VectorXcd& y, const Threshold& h);

/// h_max = sqrt(signal_power + noise_variance) / 2.
double default_h_max(double signal_power, double noise_variance);

/// {-h_max + i * 2 h_max / 7, i = 0..7}.
std::array<double, 8> eight_levels(double h_max);

/// Independent uniform draws from the eight levels for every real and imaginary part.
Threshold eight_level_threshold(Index n, double h_max, std::mt19937_64& rng);

/// One eight-level draw per PRI, held for the n1 samples of that PRI.
Threshold pri_varying_threshold(Index n1, Index n2, double h_max, std::mt19937_64& rng);

}  // namespace wspice
