#include "ldnet/normalization.hpp"

namespace ldnet {

void validate(const NormalizationSpec& spec) {
    if (spec.center.size() != spec.half_width.size())
        throw ShapeError("normalization center and half-width differ in length");
    if (spec.center.size() == 0) throw ShapeError("normalization spec is empty");
    if ((spec.half_width.array() <= 0.0).any())
        throw SpecError("normalization half-widths must be strictly positive");
}

NormalizationSpec bounded_normalization(const Vector& lo, const Vector& hi) {
    if (lo.size() != hi.size()) throw ShapeError("bounds differ in length");
    if ((hi.array() <= lo.array()).any())
        throw SpecError("bounded normalization requires max > min per variable");
    NormalizationSpec spec{0.5 * (lo + hi), 0.5 * (hi - lo)};
    validate(spec);
    return spec;
}

NormalizationSpec bounded_normalization(double lo, double hi) {
    return bounded_normalization(Vector::Constant(1, lo), Vector::Constant(1, hi));
}

NormalizationSpec sampled_normalization(const Vector& mean, const Vector& stddev) {
    if (mean.size() != stddev.size()) throw ShapeError("moments differ in length");
    if ((stddev.array() <= 0.0).any())
        throw SpecError("sampled normalization requires a positive standard deviation");
    NormalizationSpec spec{mean, 3.0 * stddev};
    validate(spec);
    return spec;
}

NormalizationSpec sampled_normalization(double mean, double stddev) {
    return sampled_normalization(Vector::Constant(1, mean), Vector::Constant(1, stddev));
}

NormalizationSpec identity_normalization(Index dim) {
    return NormalizationSpec{Vector::Zero(dim), Vector::Ones(dim)};
}

}  // namespace ldnet
