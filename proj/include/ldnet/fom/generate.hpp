#pragma once

#include "ldnet/dataset.hpp"
#include "ldnet/fom/adr.hpp"
#include "ldnet/fom/aliev_panfilov.hpp"

#include <cstdint>
#include <string>

namespace ldnet::fom {

/// Shared settings of the three transport-equation cases.
struct Tc1Options {
    double T = 5.0;
    int jobs = 1;
    int nx = 101;
    int n_obs_times = 100;
    int substeps_per_interval = 16;
    double gp_timescale = 1.0;
    double f_min = 0.25;  // tc1c only
    double f_max = 2.0;   // tc1c only
};

/// Constant parameters (diffusion, advection, reaction) drawn uniformly from
/// [0, 0.05] x [-0.1, 0.1] x [0, 0.01]; free decay of a single cosine mode.
Dataset build_tc1a(Index n_samples, std::uint64_t seed, const Tc1Options& options = {});

/// Fixed parameters (0.05, 0, 0.002); time-dependent forcing amplitude and
/// phase drawn from Gaussian processes, frequency fixed at 0.5.
Dataset build_tc1b(Index n_samples, std::uint64_t seed, const Tc1Options& options = {});

/// Like tc1b but with the forcing frequency varying in (f_min, f_max).
Dataset build_tc1c(Index n_samples, std::uint64_t seed, const Tc1Options& options = {});

struct Tc3Options {
    APConfig base;  // stimulus field is filled per sample
    StimulusParams stimulus;
    int jobs = 1;
};

/// Excitable-tissue case: random two-site stimulation protocols.
Dataset build_tc3(Index n_samples, std::uint64_t seed, const Tc3Options& options = {});

/// Case dispatcher used by the command line; params_json carries optional
/// case-specific overrides (e.g. {"T": 5.0} or {"f_max": 1.0}). The
/// "external" case ingests an existing dataset directory given as
/// params_json["path"].
Dataset build_dataset(const std::string& case_id, Index n_samples, std::uint64_t seed,
                      const std::string& params_json);

}  // namespace ldnet::fom
