#pragma once

#include "ldnet/dense_network.hpp"
#include "ldnet/normalization.hpp"
#include "ldnet/signal.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace ldnet {

/// Constrains the reconstructed field to a prescribed value on the set where
/// the mask vanishes: output = lift(x) + mask(x) * (scaled network output).
struct DirichletCondition {
    std::function<Vector(const Vector&)> lift;  // y_lift(x), output dim d_y
    std::function<double(const Vector&)> mask;  // psi(x), zero exactly on the constrained set
};

/// Latent dynamics model: a dynamics network driving d_s latent states and a
/// reconstruction network queried pointwise in space.
///
/// dyn maps (s, normalized u) -> latent velocity scaled by 1/dt_ref.
/// rec maps (s, [normalized u,] normalized x) -> normalized output, then the
/// output normalization y = y_center + y_half_width .* (net output) applies.
/// Latent states are never normalized.
struct LDNet {
    DenseNetwork dyn;
    DenseNetwork rec;
    Index n_latent = 0;
    double dt = 0.0;
    double dt_ref = 1.0;
    bool rec_uses_input = false;
    NormalizationSpec u_norm;
    NormalizationSpec x_norm;
    NormalizationSpec y_norm;
    std::optional<Vector> equilibrium_input;  // u_eq: makes s = 0 a fixed point at u = u_eq
    std::optional<DirichletCondition> dirichlet;

    Index input_dim() const { return u_norm.dim(); }
    Index space_dim() const { return x_norm.dim(); }
    Index output_dim() const { return y_norm.dim(); }
    Index parameter_count() const { return dyn.parameter_count() + rec.parameter_count(); }
};

/// Architecture + integration settings; networks are Glorot-initialized from the seed.
struct LDNetSpec {
    Index n_latent = 1;
    std::vector<Index> dyn_hidden;
    std::vector<Index> rec_hidden;
    double dt = 0.0;
    double dt_ref = 1.0;
    bool rec_uses_input = false;
    std::uint64_t seed = 0;
};

LDNet make_ldnet(const LDNetSpec& spec, const NormalizationSpec& u_norm,
                 const NormalizationSpec& x_norm, const NormalizationSpec& y_norm);

void validate(const LDNet& model);

/// Discrete latent path s(k dt), k = 0..n_steps; states.col(k) is s(k dt).
/// states.col(0) is always zero.
struct LatentTrajectory {
    double dt = 0.0;
    Matrix states;  // (d_s x n_steps+1)

    double final_time() const { return dt * static_cast<double>(states.cols() - 1); }
};

/// Right-hand side of the latent ODE at one (state, input) pair.
Vector latent_rhs(const LDNet& model, const Vector& s, const Vector& u);

/// Forward Euler from s(0) = 0 with uniform step model.dt, covering
/// ceil(T / dt) steps so that interpolation at T is always bracketed.
LatentTrajectory integrate_latent(const LDNet& model, const InputSignal& signal, double T);

/// Linear interpolation between bracketing grid states.
Vector interpolate_latent(const LatentTrajectory& traj, double t);

/// Field value at one query point.
Vector reconstruct(const LDNet& model, const Vector& s, const Vector& u, const Vector& x);

/// Batched reconstruction at fixed (s, u): one query point per column of
/// points, one output per column of the result.
Matrix reconstruct_batch(const LDNet& model, const Vector& s, const Vector& u,
                         const Matrix& points);

/// Predicted fields for one input signal: result[j] has one column per query
/// point of points[j], evaluated at obs_times[j]. Each point is reconstructed
/// independently; outputs never couple across query points.
std::vector<Matrix> predict(const LDNet& model, const InputSignal& signal,
                            const Vector& obs_times, const std::vector<Matrix>& points);

}  // namespace ldnet
