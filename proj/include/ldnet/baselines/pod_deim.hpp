#pragma once

#include "ldnet/fom/aliev_panfilov.hpp"
#include "ldnet/types.hpp"

#include <vector>

namespace ldnet::baselines {

/// Orthonormal linear basis extracted from a snapshot matrix.
struct PODBasis {
    Matrix V;                 // (N_h x d_s), columns ordered by singular value
    Vector singular_values;   // nonincreasing, of the full snapshot matrix
};

/// First d_s left singular vectors of the snapshot matrix. Uses the Gram
/// matrix route when there are more snapshots than rows.
PODBasis compute_pod(const Matrix& snapshots, Index d_s);

/// Greedy interpolation-index selection: start at the largest entry of the
/// first basis vector, then repeatedly pick the largest residual of the next
/// vector against interpolation on the indices chosen so far.
std::vector<Index> deim_indices(const Matrix& basis);

struct DEIMOperator {
    Matrix basis;                // U (N_h x m)
    std::vector<Index> indices;  // m distinct rows (the sparse selector)
};

DEIMOperator make_deim(const Matrix& basis);

/// U (P^T U)^{-1} P^T v: interpolates v exactly at the selected indices and
/// reproduces any vector already in span(U).
Vector deim_approximate(const DEIMOperator& deim, const Vector& v);

struct PodDeimOptions {
    /// When true (the default) the stimulus current is part of the
    /// interpolated nonlinear term, so the nonlinearity basis must be built
    /// from snapshots that include it. When false the stimulus is applied
    /// exactly through the projected input matrix.
    bool stimulus_in_deim = true;
};

struct PodDeimResult {
    Matrix reduced_states;  // (d_s x n_obs_times)
    Matrix z;               // reconstructed output on the retained grid
};

/// Galerkin-projected simulation of the excitable-tissue model on the span of
/// V, with the nonlinear reaction terms interpolated through the DEIM
/// operator. Steps the same forward-Euler discretization as the full solver,
/// over all config.nt steps, from the zero initial state.
PodDeimResult pod_deim_simulate(const fom::APConfig& config, const Matrix& V,
                                const DEIMOperator& deim, const PodDeimOptions& options = {});

}  // namespace ldnet::baselines
