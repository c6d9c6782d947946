#pragma once

#include "ldnet/types.hpp"

namespace ldnet {

/// Time series of an input signal: values.row(i) is the signal at times[i].
/// Constant parameters are represented as a signal constant over time.
struct InputSignal {
    Vector times;   // strictly increasing, nonnegative
    Matrix values;  // (n_times x d_u)

    Index dim() const { return values.cols(); }

    static InputSignal constant(const Vector& value, double final_time);
};

void validate(const InputSignal& signal);

/// Piecewise-linear interpolation, clamped to the end values outside
/// [times.first, times.last]. Negative times are out of domain.
Vector sample_input_at(const InputSignal& signal, double t);

/// Batched sampling: one column per query time.
Matrix sample_input_grid(const InputSignal& signal, const Vector& query_times);

}  // namespace ldnet
