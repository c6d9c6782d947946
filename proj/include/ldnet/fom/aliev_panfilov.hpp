#pragma once

#include "ldnet/signal.hpp"

#include <cstdint>
#include <vector>

namespace ldnet::fom {

/// Rectangular current pulse injected at one of the two stimulation sites.
struct StimulusPulse {
    int site = 0;  // 0: x = L/4, 1: x = 3L/4
    double onset = 0.0;
    double duration = 0.0;
    double amplitude = 0.0;  // rate added to dz/dt while the pulse is active
};

struct StimulusProtocol {
    std::vector<StimulusPulse> pulses;
};

struct StimulusParams {
    int min_events = 1;
    int max_events = 3;
    double amplitude = 1.0;
    double duration = 2.0;
    double min_separation = 30.0;
    double final_time = 500.0;
};

/// Random stimulation protocol: each event fires site 1, site 2 or both, at
/// uniformly random onsets separated by at least min_separation.
StimulusProtocol make_stimulus(std::uint64_t seed, const StimulusParams& params);

/// Exact pulse-train value at one site and time (closed on both pulse edges).
double stimulus_value(const StimulusProtocol& protocol, int site, double t);

/// Two-channel signal (site 1, site 2) sampled on the given grid.
InputSignal rasterize_stimulus(const StimulusProtocol& protocol, const Vector& times);

/// Excitable-tissue model on (0, L) with zero-flux boundaries and zero
/// initial conditions:
///   dz/dt = D z_xx + (1/tau) [K z (1-z)(z-alpha) - z w] + I_stim
///   dw/dt = (1/tau) (gamma + mu1 w / (mu2 + z)) (-w - K z (z - b - 1))
/// Time is in milliseconds; the reaction terms are rescaled by the time
/// constant tau. Discretized by central differences in space and forward
/// Euler in time.
struct APConfig {
    double D = 0.1;
    double K = 8.0;
    double alpha = 0.1;
    double gamma = 0.02;
    double mu1 = 0.2;
    double mu2 = 0.3;
    double b = 0.15;
    double L = 100.0;
    double T = 500.0;
    double tau = 12.9;
    int nx = 800;
    long nt = 100000;
    int n_obs_space = 100;
    int n_obs_times = 500;
    StimulusProtocol stimulus;
};

Vector ap_grid(const APConfig& config);

/// Grid node indices receiving each site's current (the two nearest nodes).
std::vector<Index> ap_stimulus_nodes(const APConfig& config, int site);

struct APSolution {
    Vector x;          // retained space points
    Vector times;      // retained time instants
    Matrix z;          // (n_obs_space x n_obs_times)
    Matrix w;          // (n_obs_space x n_obs_times)
};

/// Full-grid snapshots at the retained time instants, for projection-based
/// reduction. state stacks [z; w]; nonlinear holds everything except the
/// diffusion term (reaction plus stimulus); stim_values holds the two
/// channel rates so the stimulus part can be reconstructed exactly.
struct APFullSnapshots {
    Matrix state;        // (2 nx x n_obs_times)
    Matrix nonlinear;    // (2 nx x n_obs_times)
    Matrix stim_values;  // (2 x n_obs_times)
};

APSolution solve_aliev_panfilov(const APConfig& config, APFullSnapshots* full = nullptr);

}  // namespace ldnet::fom
