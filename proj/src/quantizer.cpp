#include "wspice/quantizer.hpp"

#include <cmath>
#include <string>

namespace wspice {

namespace {

double sign(double x) { return x >= 0.0 ? 1.0 : -1.0; }

Complex draw(const std::array<double, 8>& levels, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> pick(0, 7);
    const double re = levels[static_cast<std::size_t>(pick(rng))];
    const double im = levels[static_cast<std::size_t>(pick(rng))];
    return {re, im};
}

}  // namespace

ThresholdScheme parse_threshold_scheme(std::string_view name) {
    if (name == "zero") return ThresholdScheme::Zero;
    if (name == "per-sample" || name == "eight-level") return ThresholdScheme::PerSample;
    if (name == "per-pri") return ThresholdScheme::PerPri;
    throw ConfigError("unknown threshold scheme '" + std::string(name) + "' (expected zero, per-sample or per-pri)");
}

std::string_view to_string(ThresholdScheme scheme) {
    switch (scheme) {
        case ThresholdScheme::Zero:
            return "zero";
        case ThresholdScheme::PerSample:
            return "per-sample";
        case ThresholdScheme::PerPri:
            return "per-pri";
    }
    return "per-sample";
}

bool SignedMeasurements::valid() const {
    for (Index i = 0; i < z.size(); ++i) {
        if (std::abs(z(i).real()) != 1.0 || std::abs(z(i).imag()) != 1.0) return false;
    }
    return true;
}

SignedMeasurements signc(const VectorXcd& y, const VectorXcd& h) {
    require_size(h.size(), y.size(), "signc threshold");
    SignedMeasurements out{VectorXcd(y.size())};
    for (Index i = 0; i < y.size(); ++i) {
        const Complex d = y(i) - h(i);
        out.z(i) = Complex(sign(d.real()), sign(d.imag()));
    }
    return out;
}

SignedMeasurements signc(const VectorXcd& y, const Threshold& h) { return signc(y, h.values); }

double default_h_max(double signal_power, double noise_variance) {
    const double total = signal_power + noise_variance;
    if (!(total > 0.0)) {
        throw ConfigError("threshold range needs a positive received power");
    }
    return std::sqrt(total) / 2.0;
}

std::array<double, 8> eight_levels(double h_max) {
    if (!(h_max > 0.0)) {
        throw ConfigError("h_max must be positive");
    }
    const double step = 2.0 * h_max / 7.0;
    std::array<double, 8> levels{};
    for (int i = 0; i < 8; ++i) levels[static_cast<std::size_t>(i)] = -h_max + i * step;
    levels[7] = h_max;
    return levels;
}

Threshold eight_level_threshold(Index n, double h_max, std::mt19937_64& rng) {
    const auto levels = eight_levels(h_max);
    Threshold out{VectorXcd(n), ThresholdScheme::PerSample, 1};
    for (Index i = 0; i < n; ++i) out.values(i) = draw(levels, rng);
    return out;
}

Threshold pri_varying_threshold(Index n1, Index n2, double h_max, std::mt19937_64& rng) {
    if (n1 < 1 || n2 < 1) {
        throw DimensionError("pri_varying_threshold: n1 and n2 must be positive");
    }
    const auto levels = eight_levels(h_max);
    Threshold out{VectorXcd(n1 * n2), ThresholdScheme::PerPri, n1};
    for (Index j = 0; j < n2; ++j) out.values.segment(j * n1, n1).setConstant(draw(levels, rng));
    return out;
}

}  // namespace wspice
