#include "ldnet/fom/aliev_panfilov.hpp"

#include "ldnet/rng.hpp"

#include <algorithm>
#include <cmath>

namespace ldnet::fom {

StimulusProtocol make_stimulus(std::uint64_t seed, const StimulusParams& params) {
    if (params.min_events < 0 || params.max_events < params.min_events)
        throw SpecError("invalid stimulation event count range");
    if (params.duration <= 0.0 || params.amplitude <= 0.0)
        throw SpecError("pulse amplitude and duration must be positive");
    if (params.final_time <= params.duration)
        throw SpecError("final time too short for one pulse");

    Rng rng = Rng::derive(seed, "stimulus", 0);
    const int n_events =
        params.min_events +
        static_cast<int>(rng.next_u64() %
                         static_cast<std::uint64_t>(params.max_events - params.min_events + 1));

    StimulusProtocol protocol;
    std::vector<double> onsets;
    const double t_max = params.final_time - params.duration;
    for (int e = 0; e < n_events; ++e) {
        double onset = 0.0;
        bool placed = false;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            onset = rng.uniform(0.0, t_max);
            placed = std::all_of(onsets.begin(), onsets.end(), [&](double o) {
                return std::abs(o - onset) >= params.min_separation;
            });
            if (placed) break;
        }
        if (!placed)
            throw SpecError("could not place stimulation events with the requested separation");
        onsets.push_back(onset);

        const std::uint64_t which = rng.next_u64() % 3;  // 0: site 1, 1: site 2, 2: both
        if (which == 0 || which == 2)
            protocol.pulses.push_back({0, onset, params.duration, params.amplitude});
        if (which == 1 || which == 2)
            protocol.pulses.push_back({1, onset, params.duration, params.amplitude});
    }
    return protocol;
}

double stimulus_value(const StimulusProtocol& protocol, int site, double t) {
    double v = 0.0;
    for (const StimulusPulse& p : protocol.pulses)
        if (p.site == site && t >= p.onset && t <= p.onset + p.duration) v += p.amplitude;
    return v;
}

InputSignal rasterize_stimulus(const StimulusProtocol& protocol, const Vector& times) {
    InputSignal signal;
    signal.times = times;
    signal.values.resize(times.size(), 2);
    for (Index i = 0; i < times.size(); ++i) {
        signal.values(i, 0) = stimulus_value(protocol, 0, times[i]);
        signal.values(i, 1) = stimulus_value(protocol, 1, times[i]);
    }
    return signal;
}

Vector ap_grid(const APConfig& config) {
    Vector x(config.nx);
    const double dx = config.L / static_cast<double>(config.nx - 1);
    for (int j = 0; j < config.nx; ++j) x[j] = dx * static_cast<double>(j);
    return x;
}

std::vector<Index> ap_stimulus_nodes(const APConfig& config, int site) {
    const double dx = config.L / static_cast<double>(config.nx - 1);
    const double site_x = (site == 0 ? 0.25 : 0.75) * config.L;
    Index lo = static_cast<Index>(std::floor(site_x / dx));
    lo = std::clamp<Index>(lo, 0, config.nx - 2);
    return {lo, lo + 1};
}

namespace {

void check_config(const APConfig& config) {
    if (config.nx < 3) throw SpecError("AP grid needs at least 3 points");
    if (config.nt < 1) throw SpecError("AP solver needs at least one time step");
    if (config.alpha <= 0.0 || config.alpha >= 1.0) throw SpecError("alpha must lie in (0, 1)");
    if (config.mu2 <= 0.0) throw SpecError("mu2 must be positive");
    if (config.tau <= 0.0) throw SpecError("time constant must be positive");
    if (config.T <= 0.0 || config.L <= 0.0) throw SpecError("domain sizes must be positive");
    if (config.n_obs_space < 1 || config.nx % config.n_obs_space != 0)
        throw SpecError("retained space points must evenly divide the grid");
    if (config.n_obs_times < 1 || config.nt % static_cast<long>(config.n_obs_times) != 0)
        throw SpecError("retained time instants must evenly divide the step count");
}

}  // namespace

APSolution solve_aliev_panfilov(const APConfig& config, APFullSnapshots* full) {
    check_config(config);
    const int nx = config.nx;
    const double dx = config.L / static_cast<double>(nx - 1);
    const double dt = config.T / static_cast<double>(config.nt);
    const double d_over_dx2 = config.D / (dx * dx);
    const double inv_tau = 1.0 / config.tau;

    const std::vector<Index> site_nodes[2] = {ap_stimulus_nodes(config, 0),
                                              ap_stimulus_nodes(config, 1)};

    // Retained output indices: space stride nx/n_obs_space from node 0,
    // right-endpoint time instants (k+1) nt/n_obs_times.
    const int space_stride = nx / config.n_obs_space;
    std::vector<Index> space_keep(static_cast<std::size_t>(config.n_obs_space));
    for (int j = 0; j < config.n_obs_space; ++j)
        space_keep[static_cast<std::size_t>(j)] = static_cast<Index>(j) * space_stride;

    const Vector x_full = ap_grid(config);
    APSolution solution;
    solution.x.resize(config.n_obs_space);
    for (int j = 0; j < config.n_obs_space; ++j)
        solution.x[j] = x_full[space_keep[static_cast<std::size_t>(j)]];
    solution.times.resize(config.n_obs_times);
    solution.z.resize(config.n_obs_space, config.n_obs_times);
    solution.w.resize(config.n_obs_space, config.n_obs_times);

    if (full) {
        full->state.resize(2 * nx, config.n_obs_times);
        full->nonlinear.resize(2 * nx, config.n_obs_times);
        full->stim_values.resize(2, config.n_obs_times);
    }

    Vector z = Vector::Zero(nx), w = Vector::Zero(nx);
    Vector rz(nx), rw(nx);  // reaction + stimulus rates

    auto eval_rates = [&](double t) {
        // Reaction terms, both equations, rescaled by tau.
        rz = inv_tau * (config.K * z.array() * (1.0 - z.array()) * (z.array() - config.alpha) -
                        z.array() * w.array());
        rw = inv_tau *
             ((config.gamma + config.mu1 * w.array() / (config.mu2 + z.array())) *
              (-w.array() - config.K * z.array() * (z.array() - config.b - 1.0)));
        for (int site = 0; site < 2; ++site) {
            const double rate = stimulus_value(config.stimulus, site, t);
            if (rate != 0.0)
                for (Index node : site_nodes[site]) rz[node] += rate;
        }
    };

    long next_capture = config.nt / static_cast<long>(config.n_obs_times);
    int capture_idx = 0;
    const long capture_stride = config.nt / static_cast<long>(config.n_obs_times);

    for (long step = 0; step < config.nt; ++step) {
        const double t = static_cast<double>(step) * dt;
        eval_rates(t);

        Vector z_new(nx);
        // Interior diffusion plus mirrored ghost points at both ends.
        z_new.segment(1, nx - 2) =
            z.segment(1, nx - 2) +
            dt * (d_over_dx2 * (z.segment(2, nx - 2) - 2.0 * z.segment(1, nx - 2) +
                                z.segment(0, nx - 2)) +
                  rz.segment(1, nx - 2));
        z_new[0] = z[0] + dt * (d_over_dx2 * 2.0 * (z[1] - z[0]) + rz[0]);
        z_new[nx - 1] = z[nx - 1] + dt * (d_over_dx2 * 2.0 * (z[nx - 2] - z[nx - 1]) + rz[nx - 1]);

        w += dt * rw;
        z = std::move(z_new);

        if (step + 1 == next_capture) {
            if (!z.allFinite() || !w.allFinite())
                throw DivergenceError(
                    "Aliev-Panfilov state became nonfinite; reduce the time step", step + 1);
            const double t_snap = static_cast<double>(step + 1) * dt;
            solution.times[capture_idx] = t_snap;
            for (int j = 0; j < config.n_obs_space; ++j) {
                solution.z(j, capture_idx) = z[space_keep[static_cast<std::size_t>(j)]];
                solution.w(j, capture_idx) = w[space_keep[static_cast<std::size_t>(j)]];
            }
            if (full) {
                // Rates of the captured state, at the capture instant.
                eval_rates(t_snap);
                full->state.col(capture_idx).head(nx) = z;
                full->state.col(capture_idx).tail(nx) = w;
                full->nonlinear.col(capture_idx).head(nx) = rz;
                full->nonlinear.col(capture_idx).tail(nx) = rw;
                full->stim_values(0, capture_idx) = stimulus_value(config.stimulus, 0, t_snap);
                full->stim_values(1, capture_idx) = stimulus_value(config.stimulus, 1, t_snap);
            }
            ++capture_idx;
            next_capture += capture_stride;
        }
    }
    return solution;
}

}  // namespace ldnet::fom
