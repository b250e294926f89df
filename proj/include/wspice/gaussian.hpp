#pragma once

namespace wspice {

/// Standard normal density.
double std_normal_pdf(double x);

/// ln Phi(x), accurate to about 1e-13 relative on [-40, 40].
///
/// Uses the continued-fraction Mills ratio below x = -8 and log1p of the
/// upper tail for x >= 0, so neither end underflows to log(0) or rounds to 0.
double log_std_normal_cdf(double x);

/// phi(x) / Phi(x), the Gaussian hazard of -x.
double inverse_mills_ratio(double x);

/// x + phi(x) / Phi(x). Strictly positive and increasing.
///
/// Below x = -8 the two terms cancel almost completely; there the value is
/// taken from the continued fraction 1/(t + 2/(t + 3/(t + ...))), t = -x.
/// Throws std::domain_error on NaN.
double mills_u(double x);

}  // namespace wspice
