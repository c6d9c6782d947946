#pragma once

#include "ldnet/signal.hpp"

#include <cstdint>

namespace ldnet::fom {

/// Gaussian process with squared-exponential covariance
/// K(t1, t2) = std^2 exp(-(t1 - t2)^2 / (2 timescale^2)).
struct GPConfig {
    double mean = 0.0;
    double std = 1.0;
    double timescale = 1.0;
    Vector times;
    std::uint64_t seed = 0;
};

Matrix gp_kernel_matrix(const GPConfig& config);

/// One path drawn on config.times via Cholesky of the jittered kernel matrix.
/// Deterministic per seed.
InputSignal sample_gp(const GPConfig& config);

/// Squeeze an unbounded path value into (fmin, fmax):
/// (fmin + fmax + (fmax - fmin) tanh(3 gamma / 5)) / 2.
double bounded_frequency_transform(double fmin, double fmax, double gamma);

/// Path strictly inside (fmin, fmax): the transform above applied pointwise
/// to a unit-variance zero-mean GP draw.
InputSignal sample_bounded_frequency(double fmin, double fmax, double timescale,
                                     const Vector& times, std::uint64_t seed);

}  // namespace ldnet::fom
