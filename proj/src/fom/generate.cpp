#include "ldnet/fom/generate.hpp"

#include "ldnet/fom/gp.hpp"
#include "ldnet/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

namespace ldnet::fom {

namespace {

using ordered_json = nlohmann::ordered_json;

Vector linspace_closed(double lo, double hi, Index n) {
    Vector v(n);
    for (Index i = 0; i < n; ++i)
        v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

// Empirical per-channel mean and sample standard deviation over every time
// sample of every input signal.
NormalizationSpec empirical_sampled_normalization(const Dataset& dataset,
                                                  const std::vector<Index>& channels,
                                                  NormalizationSpec base) {
    for (Index c : channels) {
        double sum = 0.0, sum_sq = 0.0;
        long count = 0;
        for (const Sample& s : dataset.samples) {
            sum += s.input.values.col(c).sum();
            sum_sq += s.input.values.col(c).squaredNorm();
            count += s.input.values.rows();
        }
        const double mean = sum / static_cast<double>(count);
        const double var =
            (sum_sq - static_cast<double>(count) * mean * mean) / static_cast<double>(count - 1);
        if (var <= 0.0) throw DataError("input channel has zero variance");
        base.center[c] = mean;
        base.half_width[c] = 3.0 * std::sqrt(var);
    }
    return base;
}

void finalize_y_normalization(Dataset& dataset) {
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -y_min;
    for (const Sample& s : dataset.samples)
        for (const Matrix& out : s.outputs) {
            y_min = std::min(y_min, out.minCoeff());
            y_max = std::max(y_max, out.maxCoeff());
        }
    if (!(y_max > y_min)) throw DataError("outputs are constant; cannot normalize");
    dataset.y_norm = y_max - y_min;
    dataset.y_normalization =
        bounded_normalization(Vector::Constant(dataset.d_y, y_min),
                              Vector::Constant(dataset.d_y, y_max));
}

// Observations shared by the tc1 cases: the full grid at every solver
// observation time.
void attach_adr_observations(Sample& sample, const AdrSolution& solution) {
    sample.obs_times = solution.times;
    const Matrix grid = solution.x.transpose();
    for (Index k = 0; k < solution.times.size(); ++k) {
        sample.points.push_back(grid);
        sample.outputs.push_back(solution.snapshots.col(k).transpose());
    }
}

ordered_json tc1_generator_record(const char* case_id, const Tc1Options& o) {
    ordered_json j;
    j["case"] = case_id;
    j["T"] = o.T;
    j["nx"] = o.nx;
    j["n_obs_times"] = o.n_obs_times;
    j["substeps_per_interval"] = o.substeps_per_interval;
    j["gp_timescale"] = o.gp_timescale;
    return j;
}

}  // namespace

Dataset build_tc1a(Index n_samples, std::uint64_t seed, const Tc1Options& options) {
    if (n_samples < 1) throw SpecError("need at least one sample");
    const Vector lo = (Vector(3) << 0.0, -0.1, 0.0).finished();
    const Vector hi = (Vector(3) << 0.05, 0.1, 0.01).finished();

    Dataset dataset;
    dataset.case_id = "tc1a";
    dataset.seed = seed;
    dataset.d_u = 3;
    dataset.d_x = 1;
    dataset.d_y = 1;
    dataset.u_normalization = bounded_normalization(lo, hi);
    dataset.x_normalization = bounded_normalization(-1.0, 1.0);

    const Vector x = adr_grid(options.nx);
    for (Index i = 0; i < n_samples; ++i) {
        Rng rng = Rng::derive(seed, "tc1a-params", static_cast<std::uint64_t>(i));
        Vector mu(3);
        for (Index c = 0; c < 3; ++c) mu[c] = rng.uniform(lo[c], hi[c]);

        ADRConfig config;
        config.mu1 = mu[0];
        config.mu2 = mu[1];
        config.mu3 = mu[2];
        config.z0 = (std::numbers::pi * x.array()).cos();
        config.nx = options.nx;
        config.T = options.T;
        config.n_obs_times = options.n_obs_times;
        config.substeps_per_interval = options.substeps_per_interval;

        Sample sample;
        sample.input = InputSignal::constant(mu, options.T);
        attach_adr_observations(sample, solve_adr(config));
        dataset.samples.push_back(std::move(sample));
    }

    finalize_y_normalization(dataset);
    ordered_json gen = tc1_generator_record("tc1a", options);
    gen["mu_lo"] = {lo[0], lo[1], lo[2]};
    gen["mu_hi"] = {hi[0], hi[1], hi[2]};
    gen["z0"] = "cos(pi x)";
    dataset.generator_json = gen.dump();
    validate(dataset);
    return dataset;
}

namespace {

// Forced-case sample builder shared by tc1b and tc1c.
Sample forced_adr_sample(const Tc1Options& options, const InputSignal& amplitude,
                         const InputSignal& frequency, const InputSignal& phase,
                         const Matrix& u_values, const Vector& u_times) {
    ADRConfig config;
    config.mu1 = 0.05;
    config.mu2 = 0.0;
    config.mu3 = 0.002;
    config.forcing = AdrForcing{amplitude, frequency, phase};
    config.nx = options.nx;
    config.T = options.T;
    config.n_obs_times = options.n_obs_times;
    config.substeps_per_interval = options.substeps_per_interval;

    Sample sample;
    sample.input.times = u_times;
    sample.input.values = u_values;
    attach_adr_observations(sample, solve_adr(config));
    return sample;
}

}  // namespace

Dataset build_tc1b(Index n_samples, std::uint64_t seed, const Tc1Options& options) {
    if (n_samples < 1) throw SpecError("need at least one sample");
    Dataset dataset;
    dataset.case_id = "tc1b";
    dataset.seed = seed;
    dataset.d_u = 2;
    dataset.d_x = 1;
    dataset.d_y = 1;
    dataset.x_normalization = bounded_normalization(-1.0, 1.0);

    const Vector u_times = linspace_closed(0.0, options.T, options.n_obs_times + 1);
    for (Index i = 0; i < n_samples; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        GPConfig amp_gp{2.0 / 5.0, 2.0 / 15.0, options.gp_timescale, u_times,
                        Rng::derive(seed, "tc1b-amplitude", idx).next_u64()};
        GPConfig phase_gp{0.0, 4.0 / 3.0, options.gp_timescale, u_times,
                          Rng::derive(seed, "tc1b-phase", idx).next_u64()};
        InputSignal amplitude = sample_gp(amp_gp);
        InputSignal phase = sample_gp(phase_gp);
        InputSignal frequency = InputSignal::constant(Vector::Constant(1, 0.5), options.T);

        Matrix u(u_times.size(), 2);
        u.col(0) = amplitude.values.col(0);
        u.col(1) = phase.values.col(0);
        dataset.samples.push_back(forced_adr_sample(options, amplitude, frequency, phase, u, u_times));
    }

    dataset.u_normalization = empirical_sampled_normalization(
        dataset, {0, 1}, identity_normalization(2));
    finalize_y_normalization(dataset);
    ordered_json gen = tc1_generator_record("tc1b", options);
    gen["mu"] = {0.05, 0.0, 0.002};
    gen["amplitude_gp"] = {{"mean", 2.0 / 5.0}, {"std", 2.0 / 15.0}};
    gen["phase_gp"] = {{"mean", 0.0}, {"std", 4.0 / 3.0}};
    gen["frequency"] = 0.5;
    gen["z0"] = "zero";
    dataset.generator_json = gen.dump();
    validate(dataset);
    return dataset;
}

Dataset build_tc1c(Index n_samples, std::uint64_t seed, const Tc1Options& options) {
    if (n_samples < 1) throw SpecError("need at least one sample");
    Dataset dataset;
    dataset.case_id = "tc1c";
    dataset.seed = seed;
    dataset.d_u = 3;
    dataset.d_x = 1;
    dataset.d_y = 1;
    dataset.x_normalization = bounded_normalization(-1.0, 1.0);

    const Vector u_times = linspace_closed(0.0, options.T, options.n_obs_times + 1);
    for (Index i = 0; i < n_samples; ++i) {
        const auto idx = static_cast<std::uint64_t>(i);
        GPConfig amp_gp{1.0, 1.0 / 3.0, options.gp_timescale, u_times,
                        Rng::derive(seed, "tc1c-amplitude", idx).next_u64()};
        GPConfig phase_gp{0.0, 4.0 / 3.0, options.gp_timescale, u_times,
                          Rng::derive(seed, "tc1c-phase", idx).next_u64()};
        InputSignal amplitude = sample_gp(amp_gp);
        InputSignal phase = sample_gp(phase_gp);
        InputSignal frequency =
            sample_bounded_frequency(options.f_min, options.f_max, options.gp_timescale, u_times,
                                     Rng::derive(seed, "tc1c-frequency", idx).next_u64());

        Matrix u(u_times.size(), 3);
        u.col(0) = amplitude.values.col(0);
        u.col(1) = frequency.values.col(0);
        u.col(2) = phase.values.col(0);
        dataset.samples.push_back(forced_adr_sample(options, amplitude, frequency, phase, u, u_times));
    }

    // Amplitude and phase are unbounded draws; the frequency lives in a
    // known interval.
    NormalizationSpec u_norm = identity_normalization(3);
    u_norm.center[1] = 0.5 * (options.f_min + options.f_max);
    u_norm.half_width[1] = 0.5 * (options.f_max - options.f_min);
    dataset.u_normalization = empirical_sampled_normalization(dataset, {0, 2}, u_norm);
    finalize_y_normalization(dataset);
    ordered_json gen = tc1_generator_record("tc1c", options);
    gen["mu"] = {0.05, 0.0, 0.002};
    gen["amplitude_gp"] = {{"mean", 1.0}, {"std", 1.0 / 3.0}};
    gen["phase_gp"] = {{"mean", 0.0}, {"std", 4.0 / 3.0}};
    gen["f_min"] = options.f_min;
    gen["f_max"] = options.f_max;
    gen["z0"] = "zero";
    dataset.generator_json = gen.dump();
    validate(dataset);
    return dataset;
}

Dataset build_tc3(Index n_samples, std::uint64_t seed, const Tc3Options& options) {
    if (n_samples < 1) throw SpecError("need at least one sample");
    Dataset dataset;
    dataset.case_id = "tc3";
    dataset.seed = seed;
    dataset.d_u = 2;
    dataset.d_x = 1;
    dataset.d_y = 1;
    dataset.x_normalization = bounded_normalization(0.0, options.base.L);
    dataset.u_normalization =
        bounded_normalization(Vector::Zero(2), Vector::Constant(2, options.stimulus.amplitude));

    const double T = options.base.T;
    const Vector u_times = linspace_closed(0.0, T, options.base.n_obs_times + 1);
    for (Index i = 0; i < n_samples; ++i) {
        APConfig config = options.base;
        StimulusParams stim_params = options.stimulus;
        stim_params.final_time = T;
        config.stimulus = make_stimulus(
            Rng::derive(seed, "tc3-stimulus", static_cast<std::uint64_t>(i)).next_u64(),
            stim_params);

        APSolution solution = solve_aliev_panfilov(config);

        Sample sample;
        sample.input = rasterize_stimulus(config.stimulus, u_times);
        sample.obs_times = solution.times;
        const Matrix grid = solution.x.transpose();
        for (Index k = 0; k < solution.times.size(); ++k) {
            sample.points.push_back(grid);
            sample.outputs.push_back(solution.z.col(k).transpose());
        }
        dataset.samples.push_back(std::move(sample));
    }

    finalize_y_normalization(dataset);
    ordered_json gen;
    gen["case"] = "tc3";
    gen["D"] = options.base.D;
    gen["K"] = options.base.K;
    gen["alpha"] = options.base.alpha;
    gen["gamma"] = options.base.gamma;
    gen["mu1"] = options.base.mu1;
    gen["mu2"] = options.base.mu2;
    gen["b"] = options.base.b;
    gen["L"] = options.base.L;
    gen["T"] = options.base.T;
    gen["tau"] = options.base.tau;
    gen["nx"] = options.base.nx;
    gen["nt"] = options.base.nt;
    gen["n_obs_space"] = options.base.n_obs_space;
    gen["n_obs_times"] = options.base.n_obs_times;
    gen["stimulus_amplitude"] = options.stimulus.amplitude;
    gen["stimulus_duration"] = options.stimulus.duration;
    gen["stimulus_min_separation"] = options.stimulus.min_separation;
    gen["stimulus_min_events"] = options.stimulus.min_events;
    gen["stimulus_max_events"] = options.stimulus.max_events;
    dataset.generator_json = gen.dump();
    validate(dataset);
    return dataset;
}

Dataset build_dataset(const std::string& case_id, Index n_samples, std::uint64_t seed,
                      const std::string& params_json) {
    ordered_json params =
        params_json.empty() ? ordered_json::object() : ordered_json::parse(params_json);

    if (case_id == "external") {
        if (!params.contains("path"))
            throw SpecError("external ingestion needs params[\"path\"]");
        return read_dataset(params.at("path").get<std::string>());
    }

    if (case_id == "tc1a" || case_id == "tc1b" || case_id == "tc1c") {
        Tc1Options options;
        options.T = params.value("T", options.T);
        options.nx = params.value("nx", options.nx);
        options.n_obs_times = params.value("n_obs_times", options.n_obs_times);
        options.substeps_per_interval =
            params.value("substeps_per_interval", options.substeps_per_interval);
        options.gp_timescale = params.value("gp_timescale", options.gp_timescale);
        options.f_min = params.value("f_min", options.f_min);
        options.f_max = params.value("f_max", options.f_max);
        if (case_id == "tc1a") return build_tc1a(n_samples, seed, options);
        if (case_id == "tc1b") return build_tc1b(n_samples, seed, options);
        return build_tc1c(n_samples, seed, options);
    }

    if (case_id == "tc3") {
        Tc3Options options;
        options.base.T = params.value("T", options.base.T);
        options.base.nx = params.value("nx", options.base.nx);
        options.base.nt = params.value("nt", options.base.nt);
        options.base.n_obs_space = params.value("n_obs_space", options.base.n_obs_space);
        options.base.n_obs_times = params.value("n_obs_times", options.base.n_obs_times);
        options.stimulus.amplitude = params.value("stimulus_amplitude", options.stimulus.amplitude);
        options.stimulus.duration = params.value("stimulus_duration", options.stimulus.duration);
        options.stimulus.min_separation =
            params.value("stimulus_min_separation", options.stimulus.min_separation);
        options.stimulus.min_events = params.value("stimulus_min_events", options.stimulus.min_events);
        options.stimulus.max_events = params.value("stimulus_max_events", options.stimulus.max_events);
        return build_tc3(n_samples, seed, options);
    }

    throw SpecError("unknown case id: " + case_id);
}

}  // namespace ldnet::fom
