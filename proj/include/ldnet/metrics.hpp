#pragma once

#include "ldnet/types.hpp"

#include <vector>

namespace ldnet {

/// Field observations of one sample: one (d_y x n_points) matrix per time.
using FieldSeries = std::vector<Matrix>;
/// One FieldSeries per sample.
using FieldSet = std::vector<FieldSeries>;

struct EvaluationReport {
    double nrmse = 0.0;
    double pearson_dissimilarity = 0.0;
    std::vector<double> per_sample_nrmse;
    Index n_samples = 0;
    Index n_times = 0;   // summed over samples
    Index n_points = 0;  // summed over samples and times
};

/// Square root of the average over samples of the average over times of the
/// average over points of ||pred - ref||^2 / y_norm^2.
double nrmse(const FieldSet& predictions, const FieldSet& references, double y_norm);

/// 1 - rho, with rho the Pearson correlation pooled over every
/// (sample, time, point) observation; the field means are the same nested
/// averages used by the NRMSE. Zero variance in either field is an error.
double pearson_dissimilarity(const FieldSet& predictions, const FieldSet& references);

EvaluationReport evaluate(const FieldSet& predictions, const FieldSet& references, double y_norm);

}  // namespace ldnet
