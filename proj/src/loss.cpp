#include "ldnet/loss.hpp"

#include <cmath>

namespace ldnet {

namespace {

// Latent interpolation bracket for one observation time.
struct TimeBracket {
    Index k = 0;
    double w = 0.0;
};

TimeBracket bracket_time(double tau, double dt, Index n_steps) {
    TimeBracket b;
    if (tau <= 0.0) return b;
    b.k = static_cast<Index>(std::floor(tau / dt));
    if (b.k >= n_steps) {
        b.k = n_steps - 1;
        b.w = 1.0;
        return b;
    }
    b.w = tau / dt - static_cast<double>(b.k);
    return b;
}

struct GoalOrientedGradTerms {
    double norm = 0.0;     // ||v||
    Vector direction;      // v / (eps + ||v||)
};

GoalOrientedGradTerms directionize(const Vector& v, double eps) {
    GoalOrientedGradTerms t;
    t.norm = v.norm();
    t.direction = v / (eps + t.norm);
    return t;
}

}  // namespace

void validate(const LossSpec& spec) {
    if (spec.alpha_dyn < 0.0 || spec.alpha_rec < 0.0)
        throw SpecError("regularization weights must be nonnegative");
    if (const auto* q = std::get_if<QuadraticMetric>(&spec.metric)) {
        if (q->y_norm <= 0.0) throw SpecError("quadratic metric needs y_norm > 0");
    } else {
        const auto& g = std::get<GoalOrientedMetric>(spec.metric);
        if (g.v_norm <= 0.0) throw SpecError("goal-oriented metric needs v_norm > 0");
        if (g.gamma < 0.0) throw SpecError("goal-oriented metric needs gamma >= 0");
        if (g.eps <= 0.0 || g.eps >= 1.0) throw SpecError("goal-oriented metric needs 0 < eps < 1");
    }
}

double discrepancy_quadratic(const Vector& pred, const Vector& ref, double y_norm) {
    if (pred.size() != ref.size()) throw ShapeError("prediction and reference lengths differ");
    if (y_norm <= 0.0) throw SpecError("y_norm must be positive");
    return (pred - ref).squaredNorm() / (y_norm * y_norm);
}

double discrepancy_goal_oriented(const Vector& pred, const Vector& ref, double v_norm,
                                 double gamma, double eps) {
    if (pred.size() != ref.size()) throw ShapeError("prediction and reference lengths differ");
    if (v_norm <= 0.0) throw SpecError("v_norm must be positive");
    if (eps <= 0.0) throw SpecError("eps must be positive");
    const double quad = (ref - pred).squaredNorm() / (v_norm * v_norm);
    const Vector d = ref / (eps + ref.norm()) - pred / (eps + pred.norm());
    return quad + gamma * d.squaredNorm();
}

double discrepancy_batch(const LossSpec& spec, const Matrix& pred, const Matrix& ref,
                         Matrix* grad) {
    if (pred.rows() != ref.rows() || pred.cols() != ref.cols())
        throw ShapeError("prediction and reference batches differ in shape");
    if (const auto* q = std::get_if<QuadraticMetric>(&spec.metric)) {
        const double inv2 = 1.0 / (q->y_norm * q->y_norm);
        Matrix diff = pred - ref;
        if (grad) *grad = 2.0 * inv2 * diff;
        return diff.squaredNorm() * inv2;
    }
    const auto& g = std::get<GoalOrientedMetric>(spec.metric);
    const double inv2 = 1.0 / (g.v_norm * g.v_norm);
    double sum = 0.0;
    if (grad) grad->resize(pred.rows(), pred.cols());
    for (Index j = 0; j < pred.cols(); ++j) {
        const Vector p = pred.col(j);
        const Vector r = ref.col(j);
        auto tp = directionize(p, g.eps);
        auto tr = directionize(r, g.eps);
        const Vector d = tr.direction - tp.direction;
        sum += (r - p).squaredNorm() * inv2 + g.gamma * d.squaredNorm();
        if (grad) {
            Vector gj = 2.0 * inv2 * (p - r);
            const double denom = g.eps + tp.norm;
            gj -= 2.0 * g.gamma / denom * d;
            if (tp.norm > 0.0)
                gj += 2.0 * g.gamma * (p.dot(d) / (denom * denom * tp.norm)) * p;
            grad->col(j) = gj;
        }
    }
    return sum;
}

namespace {

// One sample's contribution to the data loss and, when requested, to both
// parameter gradients. sample_weight folds the 1/n_samples factor so that
// cross-sample accumulation is a plain ordered sum.
double sample_loss(const LDNet& model, const Sample& sample, const LossSpec& spec,
                   double sample_weight, bool need_grad, Vector* grad_dyn, Vector* grad_rec) {
    const Index d_s = model.n_latent;
    const Index d_u = model.input_dim();
    const Index n_times = sample.obs_times.size();
    if (n_times == 0) throw DataError("sample has no observation times");
    if (sample.points.size() != static_cast<std::size_t>(n_times) ||
        sample.outputs.size() != static_cast<std::size_t>(n_times))
        throw DataError("sample observation sets are misaligned");

    const double t_max = sample.obs_times.maxCoeff();
    const Index n_steps =
        std::max<Index>(1, static_cast<Index>(std::ceil(t_max / model.dt - 1e-9)));

    // --- forward Euler with per-step traces ---
    Vector grid_times(n_steps);
    for (Index k = 0; k < n_steps; ++k) grid_times[k] = static_cast<double>(k) * model.dt;
    Matrix u_grid_normalized = model.u_norm.normalize_cols(sample_input_grid(sample.input, grid_times));

    Vector eq_rhs;
    ForwardTrace eq_trace;
    if (model.equilibrium_input) {
        Vector z_eq(d_s + d_u);
        z_eq.head(d_s).setZero();
        z_eq.tail(d_u) = model.u_norm.normalize(*model.equilibrium_input);
        eq_rhs = forward(model.dyn, Matrix(z_eq), eq_trace).col(0) / model.dt_ref;
    }

    Matrix states = Matrix::Zero(d_s, n_steps + 1);
    std::vector<ForwardTrace> dyn_traces(need_grad ? static_cast<std::size_t>(n_steps) : 0);
    const double scale = model.dt / model.dt_ref;
    for (Index k = 0; k < n_steps; ++k) {
        Matrix z(d_s + d_u, 1);
        z.col(0).head(d_s) = states.col(k);
        z.col(0).tail(d_u) = u_grid_normalized.col(k);
        Matrix raw;
        if (need_grad)
            raw = forward(model.dyn, z, dyn_traces[static_cast<std::size_t>(k)]);
        else
            raw = forward(model.dyn, z);
        states.col(k + 1) = states.col(k) + scale * raw.col(0);
        if (model.equilibrium_input) states.col(k + 1) -= model.dt * eq_rhs;
        if (!states.col(k + 1).allFinite())
            throw DivergenceError("latent state became nonfinite", k + 1);
    }

    // --- assemble the reconstruction batch over all (time, point) pairs ---
    Index n_obs = 0;
    std::vector<TimeBracket> brackets(static_cast<std::size_t>(n_times));
    for (Index j = 0; j < n_times; ++j) {
        const auto& pts = sample.points[static_cast<std::size_t>(j)];
        const auto& out = sample.outputs[static_cast<std::size_t>(j)];
        if (pts.cols() == 0) throw DataError("empty observation point set");
        if (pts.rows() != model.space_dim()) throw ShapeError("query point dimension mismatch");
        if (out.rows() != model.output_dim() || out.cols() != pts.cols())
            throw DataError("observation outputs misaligned with points");
        brackets[static_cast<std::size_t>(j)] = bracket_time(sample.obs_times[j], model.dt, n_steps);
        n_obs += pts.cols();
    }

    Matrix rec_inputs(model.rec.input_dim(), n_obs);
    Matrix ref(model.output_dim(), n_obs);
    Index col = 0;
    for (Index j = 0; j < n_times; ++j) {
        const auto& pts = sample.points[static_cast<std::size_t>(j)];
        const Index nj = pts.cols();
        const TimeBracket& b = brackets[static_cast<std::size_t>(j)];
        Vector s_tau = states.col(b.k) + b.w * (states.col(b.k + 1) - states.col(b.k));
        auto block = rec_inputs.middleCols(col, nj);
        block.topRows(d_s).colwise() = s_tau;
        Index row = d_s;
        if (model.rec_uses_input) {
            Vector u_tau = model.u_norm.normalize(sample_input_at(sample.input, sample.obs_times[j]));
            block.middleRows(row, d_u).colwise() = u_tau;
            row += d_u;
        }
        block.bottomRows(model.space_dim()) = model.x_norm.normalize_cols(pts);
        ref.middleCols(col, nj) = sample.outputs[static_cast<std::size_t>(j)];
        col += nj;
    }

    ForwardTrace rec_trace;
    Matrix raw = need_grad ? forward(model.rec, rec_inputs, rec_trace)
                           : forward(model.rec, rec_inputs);
    Matrix scaled = (raw.array().colwise() * model.y_norm.half_width.array()).matrix();

    Vector mask_values;  // per obs column, only with a Dirichlet condition
    Matrix pred;
    if (model.dirichlet) {
        mask_values.resize(n_obs);
        pred.resize(model.output_dim(), n_obs);
        col = 0;
        for (Index j = 0; j < n_times; ++j) {
            const auto& pts = sample.points[static_cast<std::size_t>(j)];
            for (Index p = 0; p < pts.cols(); ++p, ++col) {
                const Vector x = pts.col(p);
                mask_values[col] = model.dirichlet->mask(x);
                pred.col(col) = model.dirichlet->lift(x) + mask_values[col] * scaled.col(col);
            }
        }
    } else {
        pred = scaled.colwise() + model.y_norm.center;
    }

    // --- data term: nested averages over times and points ---
    Matrix grad_cols;
    if (need_grad) grad_cols.resize(model.output_dim(), n_obs);
    double loss = 0.0;
    col = 0;
    for (Index j = 0; j < n_times; ++j) {
        const Index nj = sample.points[static_cast<std::size_t>(j)].cols();
        Matrix block_grad;
        double block_sum = discrepancy_batch(spec, pred.middleCols(col, nj),
                                             ref.middleCols(col, nj),
                                             need_grad ? &block_grad : nullptr);
        const double weight = 1.0 / static_cast<double>(n_times * nj);
        loss += weight * block_sum;
        if (need_grad) grad_cols.middleCols(col, nj) = (sample_weight * weight) * block_grad;
        col += nj;
    }
    if (!std::isfinite(loss)) throw DivergenceError("loss became nonfinite", 0);
    if (!need_grad) return sample_weight * loss;

    // --- reverse pass ---
    // Pull the data cotangent back through the output scaling.
    Matrix cot_raw = grad_cols;
    if (model.dirichlet)
        cot_raw = (cot_raw.array().rowwise() * mask_values.transpose().array()).matrix();
    cot_raw = (cot_raw.array().colwise() * model.y_norm.half_width.array()).matrix();

    Matrix rec_input_grads = vjp_backward(model.rec, rec_trace, cot_raw, *grad_rec);

    // Scatter the latent cotangents onto the Euler grid.
    Matrix grid_adjoint = Matrix::Zero(d_s, n_steps + 1);
    col = 0;
    for (Index j = 0; j < n_times; ++j) {
        const Index nj = sample.points[static_cast<std::size_t>(j)].cols();
        Vector ds = rec_input_grads.middleCols(col, nj).topRows(d_s).rowwise().sum();
        const TimeBracket& b = brackets[static_cast<std::size_t>(j)];
        grid_adjoint.col(b.k) += (1.0 - b.w) * ds;
        grid_adjoint.col(b.k + 1) += b.w * ds;
        col += nj;
    }

    // Backward sweep of the Euler recursion.
    Vector adj = grid_adjoint.col(n_steps);
    Vector eq_cotangent = Vector::Zero(d_s);
    for (Index k = n_steps - 1; k >= 0; --k) {
        Matrix cot_dyn = scale * adj;
        Matrix input_grad =
            vjp_backward(model.dyn, dyn_traces[static_cast<std::size_t>(k)], cot_dyn, *grad_dyn);
        if (model.equilibrium_input) eq_cotangent += adj;
        adj += grid_adjoint.col(k) + input_grad.col(0).head(d_s);
    }
    if (model.equilibrium_input) {
        Matrix cot_eq = (-scale) * eq_cotangent;
        vjp_backward(model.dyn, eq_trace, cot_eq, *grad_dyn);
    }

    return sample_weight * loss;
}

double dataset_loss(const LDNet& model, const Dataset& dataset, const LossSpec& spec,
                    bool need_grad, Vector* grad_dyn, Vector* grad_rec) {
    validate(spec);
    if (dataset.samples.empty()) throw DataError("dataset has no samples");
    const double sample_weight = 1.0 / static_cast<double>(dataset.samples.size());
    double loss = 0.0;
    for (const Sample& sample : dataset.samples)
        loss += sample_loss(model, sample, spec, sample_weight, need_grad, grad_dyn, grad_rec);

    loss += spec.alpha_dyn * weight_mean_square(model.dyn);
    loss += spec.alpha_rec * weight_mean_square(model.rec);
    if (need_grad) {
        if (spec.alpha_dyn > 0.0)
            add_weight_mean_square_gradient(model.dyn, spec.alpha_dyn, *grad_dyn);
        if (spec.alpha_rec > 0.0)
            add_weight_mean_square_gradient(model.rec, spec.alpha_rec, *grad_rec);
    }
    if (!std::isfinite(loss)) throw DivergenceError("loss became nonfinite", 0);
    return loss;
}

}  // namespace

double total_loss(const LDNet& model, const Dataset& dataset, const LossSpec& spec) {
    return dataset_loss(model, dataset, spec, false, nullptr, nullptr);
}

BpttResult bptt_gradient(const LDNet& model, const Dataset& dataset, const LossSpec& spec) {
    BpttResult result;
    result.grad_dyn = Vector::Zero(model.dyn.parameter_count());
    result.grad_rec = Vector::Zero(model.rec.parameter_count());
    result.loss = dataset_loss(model, dataset, spec, true, &result.grad_dyn, &result.grad_rec);
    return result;
}

}  // namespace ldnet
