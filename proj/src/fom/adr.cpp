#include "ldnet/fom/adr.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace ldnet::fom {

namespace {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

constexpr double kPi = std::numbers::pi;

// Signed mode number of DFT bin m on an nx-point grid.
int signed_mode(int m, int nx) { return m <= nx / 2 ? m : m - nx; }

Vector forcing_field(const AdrForcing& forcing, const Vector& x, double t) {
    const double a = sample_input_at(forcing.amplitude, t)[0];
    const double f = sample_input_at(forcing.frequency, t)[0];
    const double p = sample_input_at(forcing.phase, t)[0];
    return (a * ((2.0 * kPi * f) * x.array() - p).cos()).matrix();
}

}  // namespace

Vector adr_grid(int nx) {
    Vector x(nx);
    for (int j = 0; j < nx; ++j) x[j] = -1.0 + 2.0 * j / static_cast<double>(nx);
    return x;
}

Vector adr_obs_times(double T, int n_obs_times) {
    Vector t(n_obs_times);
    for (int k = 1; k <= n_obs_times; ++k)
        t[k - 1] = static_cast<double>(k) * T / static_cast<double>(n_obs_times);
    return t;
}

AdrSolution solve_adr(const ADRConfig& config) {
    if (config.nx < 3) throw SpecError("ADR grid needs at least 3 points");
    if (config.mu1 < 0.0 || config.mu3 < 0.0)
        throw SpecError("diffusion and reaction coefficients must be nonnegative");
    if (config.T <= 0.0) throw SpecError("final time must be positive");
    if (config.n_obs_times < 1) throw SpecError("need at least one observation time");
    if (config.substeps_per_interval < 1) throw SpecError("need at least one substep");

    const int nx = config.nx;
    const Vector x = adr_grid(nx);

    Vector z0 = config.z0;
    if (z0.size() == 0) z0 = Vector::Zero(nx);
    if (z0.size() != nx) throw ShapeError("initial field does not match the grid");

    // Transform pair: synthesis(j, m) = exp(i kappa_m x_j), analysis = synthesis^H / nx.
    ComplexMatrix synthesis(nx, nx);
    Vector kappa(nx);
    for (int m = 0; m < nx; ++m) {
        kappa[m] = kPi * signed_mode(m, nx);
        for (int j = 0; j < nx; ++j)
            synthesis(j, m) = std::exp(Complex(0.0, kappa[m] * x[j]));
    }
    ComplexMatrix analysis = synthesis.adjoint() / static_cast<double>(nx);

    // Diagonal symbol of the spatial operator and its per-substep factor.
    const double h =
        config.T / static_cast<double>(config.n_obs_times * config.substeps_per_interval);
    ComplexVector lambda(nx), step_factor(nx);
    for (int m = 0; m < nx; ++m) {
        lambda[m] = Complex(-(config.mu1 * kappa[m] * kappa[m] + config.mu3),
                            config.mu2 * kappa[m]);
        step_factor[m] = std::exp(lambda[m] * h);
    }

    ComplexVector z_hat = analysis * z0;
    ComplexVector f_hat_old(nx), f_hat_new(nx);
    if (config.forcing) f_hat_old = analysis * forcing_field(*config.forcing, x, 0.0);

    AdrSolution solution;
    solution.x = x;
    solution.times = adr_obs_times(config.T, config.n_obs_times);
    solution.snapshots.resize(nx, config.n_obs_times);

    long step = 0;
    for (int k = 0; k < config.n_obs_times; ++k) {
        for (int s = 0; s < config.substeps_per_interval; ++s) {
            ++step;
            if (config.forcing) {
                const double t_new = static_cast<double>(step) * h;
                f_hat_new = analysis * forcing_field(*config.forcing, x, t_new);
                z_hat = step_factor.cwiseProduct(z_hat) +
                        (0.5 * h) * (step_factor.cwiseProduct(f_hat_old) + f_hat_new);
                f_hat_old.swap(f_hat_new);
            } else {
                z_hat = step_factor.cwiseProduct(z_hat);
            }
        }
        solution.snapshots.col(k) = (synthesis * z_hat).real();
        if (!solution.snapshots.col(k).allFinite())
            throw DivergenceError("ADR solution became nonfinite", step);
    }
    return solution;
}

}  // namespace ldnet::fom
