#include "ldnet/signal.hpp"

#include <algorithm>

namespace ldnet {

InputSignal InputSignal::constant(const Vector& value, double final_time) {
    InputSignal s;
    if (final_time > 0.0) {
        s.times = Vector::Zero(2);
        s.times[1] = final_time;
        s.values = Matrix(2, value.size());
        s.values.row(0) = value.transpose();
        s.values.row(1) = value.transpose();
    } else {
        s.times = Vector::Zero(1);
        s.values = value.transpose();
    }
    return s;
}

void validate(const InputSignal& signal) {
    if (signal.times.size() == 0) throw ShapeError("input signal has no samples");
    if (signal.times.size() != signal.values.rows())
        throw ShapeError("input signal times and values disagree in length");
    if (signal.times[0] < 0.0) throw DomainError("input signal has a negative sample time");
    for (Index i = 1; i < signal.times.size(); ++i)
        if (signal.times[i] <= signal.times[i - 1])
            throw SpecError("input signal times must be strictly increasing");
}

Vector sample_input_at(const InputSignal& signal, double t) {
    if (t < 0.0) throw DomainError("query time is negative");
    const Vector& ts = signal.times;
    const Index n = ts.size();
    if (t <= ts[0]) return signal.values.row(0).transpose();
    if (t >= ts[n - 1]) return signal.values.row(n - 1).transpose();
    const double* begin = ts.data();
    Index hi = static_cast<Index>(std::upper_bound(begin, begin + n, t) - begin);
    Index lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    // lo + w*(hi - lo): bit-exact at the knots (w = 0 there) and for
    // constant segments.
    return (signal.values.row(lo) + w * (signal.values.row(hi) - signal.values.row(lo)))
        .transpose();
}

Matrix sample_input_grid(const InputSignal& signal, const Vector& query_times) {
    Matrix out(signal.dim(), query_times.size());
    for (Index i = 0; i < query_times.size(); ++i) out.col(i) = sample_input_at(signal, query_times[i]);
    return out;
}

}  // namespace ldnet
