#include "wspice/waveforms.hpp"

#include <cmath>
#include <bit>
#include <numbers>
#include <string>

namespace wspice {

void RadarParams::validate() const {
    const std::pair<const char*, double> fields[] = {
        {"chirp_rate_half", chirp_rate_half}, {"light_speed", light_speed},
        {"sample_rate", sample_rate},         {"carrier", carrier},
        {"chirp_duration", chirp_duration},   {"chip_duration", chip_duration},
        {"pri", pri},
    };
    for (const auto& [name, value] : fields) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw ConfigError(std::string("radar parameter ") + name + " must be positive");
        }
    }
}

double Scene::signal_power() const {
    double s = 0.0;
    for (const auto& t : targets) s += std::norm(t.amplitude);
    return s;
}

VectorXd mls_generate(int register_length, std::uint32_t taps) {
    if (register_length < 2 || register_length > 31) {
        throw ConfigError("m-sequence register length must be in [2, 31]");
    }
    const std::uint32_t top = 1u << register_length;
    if ((taps & top) == 0 || (taps & 1u) == 0 || taps >= (top << 1)) {
        throw ConfigError("m-sequence taps must include x^r and x^0 terms only up to degree r");
    }
    const Index period = (Index{1} << register_length) - 1;
    // state bit i holds a_{n+i}; a_{n+r} = sum_{i<r} c_i a_{n+i} mod 2.
    const std::uint32_t feedback = taps & (top - 1);
    const std::uint32_t start = 1;
    std::uint32_t state = start;
    VectorXd seq(period);
    for (Index n = 0; n < period; ++n) {
        seq(n) = (state & 1u) ? -1.0 : 1.0;
        const std::uint32_t next = static_cast<std::uint32_t>(std::popcount(state & feedback) & 1);
        state = (state >> 1) | (next << (register_length - 1));
        if (state == start && n + 1 < period) {
            throw ConfigError("m-sequence taps " + std::to_string(taps) + " are not primitive (period " +
                              std::to_string(n + 1) + ")");
        }
    }
    if (state != start) {
        throw ConfigError("m-sequence taps " + std::to_string(taps) + " are not primitive");
    }
    return seq;
}

double raised_cosine(double t, double chip, double rolloff) {
    const double x = t / chip;
    if (x <= -5.0 || x > 5.0) return 0.0;
    const double d = 2.0 * rolloff * x;
    const double den = 1.0 - d * d;
    if (std::abs(den) < 1e-10) {
        // Removable singularity at |t| = chip / (2 rolloff).
        return 0.5 * rolloff * std::sin(std::numbers::pi / (2.0 * rolloff));
    }
    const double sinc = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    return sinc * std::cos(std::numbers::pi * rolloff * x) / den;
}

MatrixXd pmcw_steering_matrix(const VectorXd& code, std::span<const double> delays, double chip) {
    if (delays.empty()) {
        throw DimensionError("pmcw_steering_matrix: empty delay list");
    }
    if (!(chip > 0.0)) {
        throw ConfigError("pmcw_steering_matrix: chip duration must be positive");
    }
    const Index n1 = code.size();
    MatrixXd s(n1, static_cast<Index>(delays.size()));
    for (Index k = 0; k < s.cols(); ++k) {
        const double tau = delays[static_cast<std::size_t>(k)];
        if (!(tau >= 0.0)) {
            throw ConfigError("pmcw_steering_matrix: delays must be non-negative");
        }
        const double whole = std::floor(tau / chip);
        const double frac = tau - whole * chip;
        const Index shift = static_cast<Index>(whole);
        double taps[10];
        for (int i = -5; i <= 4; ++i) taps[i + 5] = raised_cosine(i * chip + frac, chip);
        for (Index n = 0; n < n1; ++n) {
            double acc = 0.0;
            for (int i = -5; i <= 4; ++i) {
                const Index idx = ((n + i - shift) % n1 + n1) % n1;
                acc += code(idx) * taps[i + 5];
            }
            s(n, k) = acc;
        }
    }
    return s;
}

VectorXcd synthesize_lfmcw(const Scene& scene, Index n1, Index n2) {
    VectorXcd y = VectorXcd::Zero(n1 * n2);
    for (const auto& t : scene.targets) {
        for (Index j = 0; j < n2; ++j) {
            for (Index i = 0; i < n1; ++i) {
                y(j * n1 + i) += t.amplitude * std::polar(1.0, t.range * (i + 1) + t.doppler * (j + 1));
            }
        }
    }
    return y;
}

VectorXcd synthesize_pmcw(const Scene& scene, const VectorXd& code, Index n2, double chip) {
    const Index n1 = code.size();
    VectorXcd y = VectorXcd::Zero(n1 * n2);
    for (const auto& t : scene.targets) {
        if (t.range >= static_cast<double>(n1) * chip) {
            throw ConfigError("synthesize_pmcw: target delay exceeds the PRI");
        }
        const double delay[] = {t.range};
        const VectorXd col = pmcw_steering_matrix(code, delay, chip).col(0);
        for (Index j = 0; j < n2; ++j) {
            y.segment(j * n1, n1) += (t.amplitude * std::polar(1.0, t.doppler * j)) * col.cast<Complex>();
        }
    }
    return y;
}

NoisyData add_noise(const VectorXcd& y, double snr_db, double signal_power, std::mt19937_64& rng) {
    NoisyData out{y, 0.0};
    if (std::isinf(snr_db) && snr_db > 0.0) return out;
    if (!std::isfinite(snr_db)) {
        throw ConfigError("add_noise: SNR must be finite or +inf");
    }
    if (!(signal_power > 0.0)) {
        throw ConfigError("add_noise: signal power must be positive");
    }
    out.noise_variance = signal_power * std::pow(10.0, -snr_db / 10.0);
    std::normal_distribution<double> normal(0.0, std::sqrt(out.noise_variance / 2.0));
    for (Index i = 0; i < out.y.size(); ++i) {
        const double re = normal(rng);
        const double im = normal(rng);
        out.y(i) += Complex(re, im);
    }
    return out;
}

std::pair<double, double> freq_to_range_doppler(double range_freq, double doppler_freq, const RadarParams& p) {
    if (p.chirp_rate_half == 0.0) {
        throw ConfigError("freq_to_range_doppler: zero chirp rate");
    }
    p.validate();
    const double velocity = doppler_freq * p.light_speed / (4.0 * std::numbers::pi * p.carrier * p.chirp_duration);
    const double beat = range_freq * p.sample_rate / (2.0 * std::numbers::pi);
    const double range = (beat * p.light_speed - 2.0 * p.carrier * velocity) / (4.0 * p.chirp_rate_half);
    return {range, velocity};
}

std::pair<double, double> range_doppler_to_freq(double range, double velocity, const RadarParams& p) {
    p.validate();
    const double doppler = 4.0 * std::numbers::pi * p.carrier * p.chirp_duration * velocity / p.light_speed;
    const double beat = (4.0 * p.chirp_rate_half * range + 2.0 * p.carrier * velocity) / p.light_speed;
    return {2.0 * std::numbers::pi * beat / p.sample_rate, doppler};
}

}  // namespace wspice
