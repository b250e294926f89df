#include "wspice/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wspice {

namespace {

constexpr double kTailSwitch = -8.0;
constexpr int kFractionDepth = 160;

// Backward evaluation of t + a/(t + (a+1)/(t + (a+2)/(...))).
// For t >= 8 the truncation error at this depth is far below double precision.
double tail_fraction(double t, int first) {
    double f = t;
    for (int k = first + kFractionDepth; k >= first; --k) {
        f = t + k / f;
    }
    return f;
}

}  // namespace

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * std::numbers::inv_sqrtpi / std::numbers::sqrt2;
}

double log_std_normal_cdf(double x) {
    if (x < kTailSwitch) {
        // Phi(x) = phi(x) * R(t), R(t) = 1 / (t + 1/(t + 2/(t + ...))).
        const double t = -x;
        return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi) - std::log(tail_fraction(t, 1));
    }
    if (x < 0.0) {
        return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
    }
    return std::log1p(-0.5 * std::erfc(x / std::numbers::sqrt2));
}

double inverse_mills_ratio(double x) {
    if (x < kTailSwitch) {
        return tail_fraction(-x, 1);
    }
    return std_normal_pdf(x) / (0.5 * std::erfc(-x / std::numbers::sqrt2));
}

double mills_u(double x) {
    if (std::isnan(x)) {
        throw std::domain_error("mills_u: NaN argument");
    }
    if (x < kTailSwitch) {
        return 1.0 / tail_fraction(-x, 2);
    }
    return x + inverse_mills_ratio(x);
}

}  // namespace wspice
