#include "ldnet/model.hpp"

#include <cmath>

namespace ldnet {

namespace {

// Stacked (s, normalized u) input column for the dynamics network.
Vector dyn_input(const LDNet& model, const Vector& s, const Vector& u) {
    Vector z(model.n_latent + model.input_dim());
    z.head(model.n_latent) = s;
    z.tail(model.input_dim()) = model.u_norm.normalize(u);
    return z;
}

Index euler_step_count(double T, double dt) {
    if (T <= 0.0) throw SpecError("final time must be positive");
    return static_cast<Index>(std::ceil(T / dt - 1e-9));
}

}  // namespace

LDNet make_ldnet(const LDNetSpec& spec, const NormalizationSpec& u_norm,
                 const NormalizationSpec& x_norm, const NormalizationSpec& y_norm) {
    if (spec.n_latent < 1) throw SpecError("latent dimension must be at least 1");
    if (spec.dt <= 0.0) throw SpecError("time step must be positive");
    if (spec.dt_ref <= 0.0) throw SpecError("reference time scale must be positive");

    LDNet model;
    model.n_latent = spec.n_latent;
    model.dt = spec.dt;
    model.dt_ref = spec.dt_ref;
    model.rec_uses_input = spec.rec_uses_input;
    model.u_norm = u_norm;
    model.x_norm = x_norm;
    model.y_norm = y_norm;

    std::vector<Index> dyn_sizes{spec.n_latent + u_norm.dim()};
    dyn_sizes.insert(dyn_sizes.end(), spec.dyn_hidden.begin(), spec.dyn_hidden.end());
    dyn_sizes.push_back(spec.n_latent);
    model.dyn = init_glorot(dyn_sizes, spec.seed ^ 0x64796eULL);

    Index rec_in = spec.n_latent + x_norm.dim() + (spec.rec_uses_input ? u_norm.dim() : 0);
    std::vector<Index> rec_sizes{rec_in};
    rec_sizes.insert(rec_sizes.end(), spec.rec_hidden.begin(), spec.rec_hidden.end());
    rec_sizes.push_back(y_norm.dim());
    model.rec = init_glorot(rec_sizes, spec.seed ^ 0x726563ULL);

    validate(model);
    return model;
}

void validate(const LDNet& model) {
    if (model.n_latent < 1) throw SpecError("latent dimension must be at least 1");
    if (model.dt <= 0.0 || model.dt_ref <= 0.0)
        throw SpecError("time step and reference time scale must be positive");
    validate(model.u_norm);
    validate(model.x_norm);
    validate(model.y_norm);
    if (model.dyn.input_dim() != model.n_latent + model.input_dim())
        throw ShapeError("dynamics network input must be n_latent + d_u");
    if (model.dyn.output_dim() != model.n_latent)
        throw ShapeError("dynamics network output must be n_latent");
    Index rec_in =
        model.n_latent + model.space_dim() + (model.rec_uses_input ? model.input_dim() : 0);
    if (model.rec.input_dim() != rec_in)
        throw ShapeError("reconstruction network input dimension mismatch");
    if (model.rec.output_dim() != model.output_dim())
        throw ShapeError("reconstruction network output must be d_y");
    if (model.equilibrium_input && model.equilibrium_input->size() != model.input_dim())
        throw ShapeError("equilibrium input dimension mismatch");
}

Vector latent_rhs(const LDNet& model, const Vector& s, const Vector& u) {
    if (s.size() != model.n_latent) throw ShapeError("latent state dimension mismatch");
    if (u.size() != model.input_dim()) throw ShapeError("input dimension mismatch");
    Vector rhs = forward(model.dyn, dyn_input(model, s, u)) / model.dt_ref;
    if (model.equilibrium_input) {
        Vector eq = forward(model.dyn, dyn_input(model, Vector::Zero(model.n_latent),
                                                 *model.equilibrium_input)) /
                    model.dt_ref;
        rhs -= eq;
    }
    return rhs;
}

LatentTrajectory integrate_latent(const LDNet& model, const InputSignal& signal, double T) {
    const Index n_steps = euler_step_count(T, model.dt);
    LatentTrajectory traj;
    traj.dt = model.dt;
    traj.states = Matrix::Zero(model.n_latent, n_steps + 1);

    Vector eq_correction;
    if (model.equilibrium_input)
        eq_correction = forward(model.dyn, dyn_input(model, Vector::Zero(model.n_latent),
                                                     *model.equilibrium_input)) /
                        model.dt_ref;

    for (Index k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * model.dt;
        Vector z = dyn_input(model, traj.states.col(k), sample_input_at(signal, t));
        Vector rhs = forward(model.dyn, z) / model.dt_ref;
        if (model.equilibrium_input) rhs -= eq_correction;
        traj.states.col(k + 1) = traj.states.col(k) + model.dt * rhs;
        if (!traj.states.col(k + 1).allFinite())
            throw DivergenceError("latent state became nonfinite", k + 1);
    }
    return traj;
}

Vector interpolate_latent(const LatentTrajectory& traj, double t) {
    const double T = traj.final_time();
    const double tol = 1e-9 * std::max(1.0, T);
    if (t < -tol || t > T + tol) throw DomainError("interpolation time outside the latent grid");
    if (t <= 0.0) return traj.states.col(0);
    Index k = static_cast<Index>(std::floor(t / traj.dt));
    if (k >= traj.states.cols() - 1) return traj.states.col(traj.states.cols() - 1);
    const double w = t / traj.dt - static_cast<double>(k);
    return traj.states.col(k) + w * (traj.states.col(k + 1) - traj.states.col(k));
}

Matrix reconstruct_batch(const LDNet& model, const Vector& s, const Vector& u,
                         const Matrix& points) {
    if (s.size() != model.n_latent) throw ShapeError("latent state dimension mismatch");
    if (points.rows() != model.space_dim()) throw ShapeError("query point dimension mismatch");
    const Index n = points.cols();

    Matrix inputs(model.rec.input_dim(), n);
    inputs.topRows(model.n_latent).colwise() = s;
    Index row = model.n_latent;
    if (model.rec_uses_input) {
        if (u.size() != model.input_dim()) throw ShapeError("input dimension mismatch");
        inputs.middleRows(row, model.input_dim()).colwise() = model.u_norm.normalize(u);
        row += model.input_dim();
    }
    inputs.bottomRows(model.space_dim()) = model.x_norm.normalize_cols(points);

    Matrix raw = forward(model.rec, inputs);
    Matrix scaled = (raw.array().colwise() * model.y_norm.half_width.array()).matrix();
    if (model.dirichlet) {
        Matrix out(model.output_dim(), n);
        for (Index j = 0; j < n; ++j) {
            const Vector x = points.col(j);
            out.col(j) = model.dirichlet->lift(x) + model.dirichlet->mask(x) * scaled.col(j);
        }
        return out;
    }
    return scaled.colwise() + model.y_norm.center;
}

Vector reconstruct(const LDNet& model, const Vector& s, const Vector& u, const Vector& x) {
    return reconstruct_batch(model, s, u, Matrix(x)).col(0);
}

std::vector<Matrix> predict(const LDNet& model, const InputSignal& signal,
                            const Vector& obs_times, const std::vector<Matrix>& points) {
    if (static_cast<Index>(points.size()) != obs_times.size())
        throw ShapeError("one point set per observation time is required");
    if (obs_times.size() == 0) return {};
    const double T = obs_times.maxCoeff();
    LatentTrajectory traj = integrate_latent(model, signal, T > 0.0 ? T : model.dt);

    std::vector<Matrix> fields;
    fields.reserve(points.size());
    for (Index j = 0; j < obs_times.size(); ++j) {
        const double tau = obs_times[j];
        fields.push_back(reconstruct_batch(model, interpolate_latent(traj, tau),
                                           sample_input_at(signal, tau),
                                           points[static_cast<std::size_t>(j)]));
    }
    return fields;
}

}  // namespace ldnet
