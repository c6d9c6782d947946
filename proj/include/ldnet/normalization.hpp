#pragma once

#include "ldnet/types.hpp"

namespace ldnet {

/// Per-variable affine normalization x -> (x - center) / half_width.
struct NormalizationSpec {
    Vector center;
    Vector half_width;

    Index dim() const { return center.size(); }

    Vector normalize(const Vector& v) const {
        return (v - center).cwiseQuotient(half_width);
    }
    Matrix normalize_cols(const Matrix& m) const {
        return (m.colwise() - center).array().colwise() / half_width.array();
    }
    Vector denormalize(const Vector& v) const {
        return center + v.cwiseProduct(half_width);
    }
};

void validate(const NormalizationSpec& spec);

/// Variable known to live in [lo, hi]: center at the midpoint, half-width half the range.
NormalizationSpec bounded_normalization(const Vector& lo, const Vector& hi);
NormalizationSpec bounded_normalization(double lo, double hi);

/// Variable with unbounded support: center at the mean, half-width three standard deviations.
NormalizationSpec sampled_normalization(const Vector& mean, const Vector& stddev);
NormalizationSpec sampled_normalization(double mean, double stddev);

/// No-op normalization (center 0, half-width 1).
NormalizationSpec identity_normalization(Index dim);

}  // namespace ldnet
