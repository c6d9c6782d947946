#pragma once

#include "ldnet/signal.hpp"

#include <optional>

namespace ldnet::fom {

/// Time-dependent sine-wave source f(x,t) = A(t) cos(2 pi F(t) x - P(t)).
struct AdrForcing {
    InputSignal amplitude;
    InputSignal frequency;
    InputSignal phase;
};

/// dz/dt - mu1 z_xx - mu2 z_x + mu3 z = f on the periodic interval (-1, 1).
///
/// The solve is spectral: the state is advanced mode by mode with the exact
/// integrating factor exp(lambda h) per substep, with the forcing handled by
/// an exponential-trapezoidal rule. With f = 0 the scheme is exact up to
/// transform roundoff.
struct ADRConfig {
    double mu1 = 0.0;  // diffusion >= 0
    double mu2 = 0.0;  // advection
    double mu3 = 0.0;  // reaction >= 0
    std::optional<AdrForcing> forcing;
    Vector z0;  // initial field on the grid; empty means zero
    int nx = 101;
    double T = 0.0;
    int n_obs_times = 100;
    int substeps_per_interval = 16;
};

/// Periodic grid x_j = -1 + 2 j / nx, j = 0..nx-1.
Vector adr_grid(int nx);

/// Right endpoints of the observation intervals: k T / n, k = 1..n.
Vector adr_obs_times(double T, int n_obs_times);

struct AdrSolution {
    Vector x;
    Vector times;
    Matrix snapshots;  // (nx x n_obs_times)
};

AdrSolution solve_adr(const ADRConfig& config);

}  // namespace ldnet::fom
