#pragma once

#include "ldnet/normalization.hpp"
#include "ldnet/signal.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace ldnet {

/// One realization of the input-to-field map: the driving signal, the
/// observation times, and per time a set of query points with the observed
/// field values (one column per point).
struct Sample {
    InputSignal input;
    Vector obs_times;
    std::vector<Matrix> points;   // per time: (d_x x n_points)
    std::vector<Matrix> outputs;  // per time: (d_y x n_points)
};

struct Dataset {
    std::vector<Sample> samples;
    Index d_u = 0;
    Index d_x = 0;
    Index d_y = 0;
    double y_norm = 0.0;  // max - min of the outputs over the generating set
    NormalizationSpec u_normalization;
    NormalizationSpec x_normalization;
    NormalizationSpec y_normalization;
    std::string case_id;
    std::uint64_t seed = 0;
    std::string generator_json;  // generator parameter snapshot (JSON text)

    Index n_samples() const { return static_cast<Index>(samples.size()); }
};

void validate(const Dataset& dataset);

/// True when every sample shares one spatial grid at all times (required by
/// the grid-based baselines).
bool has_shared_grid(const Dataset& dataset);

/// Stack the shared-grid outputs into one (n_points*d_y x n_samples*n_times)
/// matrix, columns ordered sample-major then time-major.
Matrix stack_shared_grid_outputs(const Dataset& dataset);

/// Per-time independent uniform subsampling of query points, n_keep per time.
Dataset thin_points(const Dataset& dataset, Index n_keep, std::uint64_t seed);

/// Keep every stride-th observation time of each sample.
Dataset thin_times(const Dataset& dataset, Index stride);

/// Directory layout: manifest.json plus per-sample little-endian float64
/// binaries u_<i>.bin (n_input_times x d_u), y_<i>.bin
/// (n_obs_times x n_points x d_y) and x_<i>.bin (n_obs_times x n_points x d_x),
/// all row-major with shapes declared in the manifest.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

}  // namespace ldnet
