#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ldnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension mismatches and invalid architectures.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Query outside the admissible domain (time out of range, point out of bounds).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values (empty ranges, non-positive scales, bad schedules).
class SpecError : public Error {
public:
    using Error::Error;
};

/// Dataset-level problems: misaligned index sets, schema violations, unsupported layouts.
class DataError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown that is not a divergence: ill-conditioned kernels,
/// rank-deficient bases, undefined correlations.
class NumericsError : public Error {
public:
    using Error::Error;
};

/// Nonfinite state or loss. Carries the step (or epoch) at which it was detected.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, long step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

}  // namespace ldnet
