#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace wspice {

template <typename Scalar>
using ComplexT = std::complex<Scalar>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Lower bound applied to every power estimate before it is used as a divisor.
inline constexpr double kPowerFloor = 1e-16;

/// Operand sizes do not agree.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A factorization, solve or objective evaluation produced an unusable result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver stopped before reaching its tolerance.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double residual, Index iterations)
        : NumericalError(what), residual_(residual), iterations_(iterations) {}

    double residual() const { return residual_; }
    Index iterations() const { return iterations_; }

private:
    double residual_;
    Index iterations_;
};

/// Malformed user configuration or input file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require_size(Index actual, Index expected, const char* what) {
    if (actual != expected) {
        throw DimensionError(std::string(what) + ": expected length " + std::to_string(expected) +
                             ", got " + std::to_string(actual));
    }
}

}  // namespace wspice
