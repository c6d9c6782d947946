#include "ldnet/baselines/autoencoder.hpp"

#include <cmath>

namespace ldnet::baselines {

namespace {

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

Index round_width(double w) { return std::max<Index>(1, static_cast<Index>(std::lround(w))); }

// Nodewise normalization built by replicating the dataset's per-component
// output normalization over the grid.
NormalizationSpec field_normalization(const Dataset& dataset, Index n_pts) {
    NormalizationSpec spec;
    spec.center.resize(n_pts * dataset.d_y);
    spec.half_width.resize(n_pts * dataset.d_y);
    for (Index p = 0; p < n_pts; ++p) {
        spec.center.segment(p * dataset.d_y, dataset.d_y) = dataset.y_normalization.center;
        spec.half_width.segment(p * dataset.d_y, dataset.d_y) = dataset.y_normalization.half_width;
    }
    return spec;
}

// Shared forward Euler over the latent codes, with per-step traces for the
// reverse pass.
struct CodePath {
    Matrix states;  // (d_s x n_steps+1)
    std::vector<ForwardTrace> traces;
    ForwardTrace eq_trace;
    Vector eq_rhs;
    Index n_steps = 0;
};

CodePath forward_codes(const DenseNetwork& dyn, const NormalizationSpec& u_norm, double dt,
                       double dt_ref, const std::optional<Vector>& u_eq,
                       const InputSignal& input, double t_max, bool need_grad) {
    const Index d_s = dyn.output_dim();
    const Index d_u = u_norm.dim();
    CodePath path;
    path.n_steps = std::max<Index>(1, static_cast<Index>(std::ceil(t_max / dt - 1e-9)));
    path.states = Matrix::Zero(d_s, path.n_steps + 1);
    if (need_grad) path.traces.resize(static_cast<std::size_t>(path.n_steps));

    if (u_eq) {
        Matrix z_eq(d_s + d_u, 1);
        z_eq.col(0).head(d_s).setZero();
        z_eq.col(0).tail(d_u) = u_norm.normalize(*u_eq);
        path.eq_rhs = forward(dyn, z_eq, path.eq_trace).col(0) / dt_ref;
    }

    const double scale = dt / dt_ref;
    for (Index k = 0; k < path.n_steps; ++k) {
        Matrix z(d_s + d_u, 1);
        z.col(0).head(d_s) = path.states.col(k);
        z.col(0).tail(d_u) =
            u_norm.normalize(sample_input_at(input, static_cast<double>(k) * dt));
        Matrix raw = need_grad ? forward(dyn, z, path.traces[static_cast<std::size_t>(k)])
                               : forward(dyn, z);
        path.states.col(k + 1) = path.states.col(k) + scale * raw.col(0);
        if (u_eq) path.states.col(k + 1) -= dt * path.eq_rhs;
        if (!path.states.col(k + 1).allFinite())
            throw DivergenceError("latent code became nonfinite", k + 1);
    }
    return path;
}

void backward_codes(const DenseNetwork& dyn, const CodePath& path, bool has_eq, double dt,
                    double dt_ref, const Matrix& grid_adjoint, Eigen::Ref<Vector> grad) {
    const Index d_s = dyn.output_dim();
    const double scale = dt / dt_ref;
    Vector adj = grid_adjoint.col(path.n_steps);
    Vector eq_cotangent = Vector::Zero(d_s);
    for (Index k = path.n_steps - 1; k >= 0; --k) {
        Matrix cot = scale * adj;
        Matrix input_grad = vjp_backward(dyn, path.traces[static_cast<std::size_t>(k)], cot, grad);
        if (has_eq) eq_cotangent += adj;
        adj += grid_adjoint.col(k) + input_grad.col(0).head(d_s);
    }
    if (has_eq) {
        Matrix cot_eq = (-scale) * eq_cotangent;
        vjp_backward(dyn, path.eq_trace, cot_eq, grad);
    }
}

}  // namespace

std::vector<Index> encoder_layer_sizes(Index n_h, Index d_s, int n_hidden, Index outer_width) {
    if (n_hidden < 0) throw SpecError("hidden layer count must be nonnegative");
    std::vector<Index> sizes{n_h};
    for (int j = 0; j < n_hidden; ++j)
        sizes.push_back(round_width(static_cast<double>(outer_width) +
                                    static_cast<double>(d_s - outer_width) *
                                        static_cast<double>(j) / static_cast<double>(n_hidden)));
    sizes.push_back(d_s);
    return sizes;
}

std::vector<Index> decoder_layer_sizes(Index n_h, Index d_s, int n_hidden, Index outer_width) {
    std::vector<Index> sizes = encoder_layer_sizes(n_h, d_s, n_hidden, outer_width);
    std::reverse(sizes.begin(), sizes.end());
    return sizes;
}

Matrix encode(const AEModel& model, const Matrix& fields) {
    return forward(model.encoder, model.field_norm.normalize_cols(fields));
}

Matrix decode(const AEModel& model, const Matrix& codes) {
    Matrix raw = forward(model.decoder, codes);
    return (raw.array().colwise() * model.field_norm.half_width.array()).matrix().colwise() +
           model.field_norm.center;
}

AEModel train_autoencoder(const Dataset& dataset, const AutoencoderOptions& options,
                          const TrainingSchedule& schedule,
                          std::vector<LossHistoryEntry>* history) {
    if (!has_shared_grid(dataset))
        throw DataError("autoencoder training requires one shared spatial grid");
    const Matrix fields = stack_shared_grid_outputs(dataset);
    const Index n_h = fields.rows();
    const Index n_cols = fields.cols();
    if (options.d_s < 1 || options.d_s > n_h) throw SpecError("invalid latent code dimension");

    AEModel model;
    model.field_norm = field_normalization(dataset, n_h / dataset.d_y);
    model.y_norm = dataset.y_norm;
    model.encoder = init_glorot(encoder_layer_sizes(n_h, options.d_s, options.n_hidden,
                                                    options.outer_width),
                                options.seed ^ 0x656e63ULL);
    model.decoder = init_glorot(decoder_layer_sizes(n_h, options.d_s, options.n_hidden,
                                                    options.outer_width),
                                options.seed ^ 0x646563ULL);

    const Matrix normalized = model.field_norm.normalize_cols(fields);
    const Index n_enc = model.encoder.parameter_count();
    const Index n_dec = model.decoder.parameter_count();
    // Difference of scale-free network outputs, weighted back to field units.
    const double data_scale =
        1.0 / (static_cast<double>(n_h) * model.y_norm * model.y_norm * static_cast<double>(n_cols));
    const Vector half_width_sq = model.field_norm.half_width.cwiseAbs2();

    Objective objective = [&, n_enc, n_dec](const Vector& theta, Vector& grad) {
        set_parameters(model.encoder, theta.head(n_enc));
        set_parameters(model.decoder, theta.tail(n_dec));
        ForwardTrace enc_trace, dec_trace;
        Matrix codes = forward(model.encoder, normalized, enc_trace);
        Matrix raw = forward(model.decoder, codes, dec_trace);
        Matrix diff = raw - normalized;

        double loss = data_scale * (diff.array().square().colwise() *
                                    half_width_sq.array()).sum();
        loss += options.alpha_enc * weight_mean_square(model.encoder);
        loss += options.alpha_dec * weight_mean_square(model.decoder);

        grad = Vector::Zero(n_enc + n_dec);
        Matrix cot = (2.0 * data_scale) * (diff.array().colwise() * half_width_sq.array()).matrix();
        Matrix code_cot = vjp_backward(model.decoder, dec_trace, cot, grad.tail(n_dec));
        vjp_backward(model.encoder, enc_trace, code_cot, grad.head(n_enc));
        if (options.alpha_enc > 0.0)
            add_weight_mean_square_gradient(model.encoder, options.alpha_enc, grad.head(n_enc));
        if (options.alpha_dec > 0.0)
            add_weight_mean_square_gradient(model.decoder, options.alpha_dec, grad.tail(n_dec));
        if (!std::isfinite(loss)) throw DivergenceError("autoencoder loss became nonfinite", 0);
        return loss;
    };

    Vector theta0(n_enc + n_dec);
    theta0.head(n_enc) = flatten(model.encoder);
    theta0.tail(n_dec) = flatten(model.decoder);
    Vector theta = optimize_two_stage(objective, std::move(theta0), schedule, history);
    set_parameters(model.encoder, theta.head(n_enc));
    set_parameters(model.decoder, theta.tail(n_dec));
    return model;
}

LatentOdeModel train_latent_ode(const AEModel& ae, const Dataset& dataset,
                                const LatentOdeOptions& options, const TrainingSchedule& schedule,
                                std::vector<LossHistoryEntry>* history) {
    if (!has_shared_grid(dataset))
        throw DataError("latent-code extraction requires one shared spatial grid");
    if (options.dt <= 0.0 || options.dt_ref <= 0.0)
        throw SpecError("time step and reference time scale must be positive");
    const Index d_s = ae.d_s();

    LatentOdeModel model;
    model.u_norm = dataset.u_normalization;
    model.dt = options.dt;
    model.dt_ref = options.dt_ref;
    model.equilibrium_input = options.equilibrium_input;
    Vector initial_field =
        options.initial_field.size() > 0 ? options.initial_field : Vector::Zero(ae.n_h());
    model.code_offset = encode(ae, Matrix(initial_field)).col(0);

    std::vector<Index> sizes{d_s + dataset.d_u};
    sizes.insert(sizes.end(), options.dyn_hidden.begin(), options.dyn_hidden.end());
    sizes.push_back(d_s);
    model.dyn = init_glorot(sizes, options.seed ^ 0x6f6465ULL);

    // Centered code targets per sample.
    std::vector<Matrix> targets;
    targets.reserve(dataset.samples.size());
    for (const Sample& s : dataset.samples) {
        Matrix fields(ae.n_h(), s.obs_times.size());
        for (Index j = 0; j < s.obs_times.size(); ++j)
            fields.col(j) = s.outputs[static_cast<std::size_t>(j)].reshaped();
        targets.push_back(encode(ae, fields).colwise() - model.code_offset);
    }

    const double sample_weight = 1.0 / static_cast<double>(dataset.samples.size());
    const Index n_params = model.dyn.parameter_count();

    Objective objective = [&](const Vector& theta, Vector& grad) {
        set_parameters(model.dyn, theta);
        grad = Vector::Zero(n_params);
        double loss = 0.0;
        for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
            const Sample& s = dataset.samples[i];
            const double t_max = s.obs_times.maxCoeff();
            CodePath path = forward_codes(model.dyn, model.u_norm, model.dt, model.dt_ref,
                                          model.equilibrium_input, s.input, t_max, true);
            Matrix grid_adjoint = Matrix::Zero(d_s, path.n_steps + 1);
            const double weight = sample_weight / static_cast<double>(s.obs_times.size());
            for (Index j = 0; j < s.obs_times.size(); ++j) {
                TimeBracket b = bracket_time(s.obs_times[j], model.dt, path.n_steps);
                Vector pred = (1.0 - b.w) * path.states.col(b.k) + b.w * path.states.col(b.k + 1);
                Vector residual = pred - targets[i].col(j);
                loss += weight * residual.squaredNorm();
                Vector cot = (2.0 * weight) * residual;
                grid_adjoint.col(b.k) += (1.0 - b.w) * cot;
                grid_adjoint.col(b.k + 1) += b.w * cot;
            }
            backward_codes(model.dyn, path, model.equilibrium_input.has_value(), model.dt,
                           model.dt_ref, grid_adjoint, grad);
        }
        loss += options.alpha_dyn * weight_mean_square(model.dyn);
        if (options.alpha_dyn > 0.0)
            add_weight_mean_square_gradient(model.dyn, options.alpha_dyn, grad);
        if (!std::isfinite(loss)) throw DivergenceError("latent-ode loss became nonfinite", 0);
        return loss;
    };

    Vector theta = optimize_two_stage(objective, flatten(model.dyn), schedule, history);
    set_parameters(model.dyn, theta);
    return model;
}

FieldSet predict_ae_ode(const AEModel& ae, const LatentOdeModel& ode, const Dataset& dataset) {
    FieldSet predictions;
    predictions.reserve(dataset.samples.size());
    for (const Sample& s : dataset.samples) {
        const double t_max = s.obs_times.maxCoeff();
        CodePath path = forward_codes(ode.dyn, ode.u_norm, ode.dt, ode.dt_ref,
                                      ode.equilibrium_input, s.input, t_max, false);
        Matrix codes(ae.d_s(), s.obs_times.size());
        for (Index j = 0; j < s.obs_times.size(); ++j) {
            TimeBracket b = bracket_time(s.obs_times[j], ode.dt, path.n_steps);
            codes.col(j) = (1.0 - b.w) * path.states.col(b.k) + b.w * path.states.col(b.k + 1) +
                           ode.code_offset;
        }
        Matrix fields = decode(ae, codes);
        FieldSeries series;
        const Index d_y = dataset.d_y;
        const Index n_pts = fields.rows() / d_y;
        for (Index j = 0; j < s.obs_times.size(); ++j)
            series.push_back(fields.col(j).reshaped(d_y, n_pts));
        predictions.push_back(std::move(series));
    }
    return predictions;
}

void finetune_e2e(AEModel& ae, LatentOdeModel& ode, const Dataset& dataset,
                  const E2eOptions& options, const TrainingSchedule& schedule,
                  std::vector<LossHistoryEntry>* history) {
    if (!has_shared_grid(dataset)) throw DataError("fine-tuning requires one shared spatial grid");
    const Index d_s = ae.d_s();
    const Index n_h = ae.n_h();
    const Index n_dyn = ode.dyn.parameter_count();
    const Index n_dec = ae.decoder.parameter_count();
    const double sample_weight = 1.0 / static_cast<double>(dataset.samples.size());
    const double norm_scale = 1.0 / (static_cast<double>(n_h) * ae.y_norm * ae.y_norm);
    const Vector half_width_sq = ae.field_norm.half_width.cwiseAbs2();

    // Normalized observed fields per sample.
    std::vector<Matrix> observed;
    observed.reserve(dataset.samples.size());
    for (const Sample& s : dataset.samples) {
        Matrix fields(n_h, s.obs_times.size());
        for (Index j = 0; j < s.obs_times.size(); ++j)
            fields.col(j) = s.outputs[static_cast<std::size_t>(j)].reshaped();
        observed.push_back(ae.field_norm.normalize_cols(fields));
    }

    Objective objective = [&](const Vector& theta, Vector& grad) {
        set_parameters(ode.dyn, theta.head(n_dyn));
        set_parameters(ae.decoder, theta.tail(n_dec));
        grad = Vector::Zero(n_dyn + n_dec);
        double loss = 0.0;
        for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
            const Sample& s = dataset.samples[i];
            const Index n_times = s.obs_times.size();
            const double t_max = s.obs_times.maxCoeff();
            CodePath path = forward_codes(ode.dyn, ode.u_norm, ode.dt, ode.dt_ref,
                                          ode.equilibrium_input, s.input, t_max, true);
            std::vector<TimeBracket> brackets(static_cast<std::size_t>(n_times));
            Matrix codes(d_s, n_times);
            for (Index j = 0; j < n_times; ++j) {
                brackets[static_cast<std::size_t>(j)] =
                    bracket_time(s.obs_times[j], ode.dt, path.n_steps);
                const TimeBracket& b = brackets[static_cast<std::size_t>(j)];
                codes.col(j) = (1.0 - b.w) * path.states.col(b.k) +
                               b.w * path.states.col(b.k + 1) + ode.code_offset;
            }
            ForwardTrace dec_trace;
            Matrix raw = forward(ae.decoder, codes, dec_trace);
            Matrix diff = raw - observed[i];
            const double weight = sample_weight * norm_scale / static_cast<double>(n_times);
            loss += weight * (diff.array().square().colwise() * half_width_sq.array()).sum();

            Matrix cot = (2.0 * weight) * (diff.array().colwise() * half_width_sq.array()).matrix();
            Matrix code_cot = vjp_backward(ae.decoder, dec_trace, cot, grad.tail(n_dec));
            Matrix grid_adjoint = Matrix::Zero(d_s, path.n_steps + 1);
            for (Index j = 0; j < n_times; ++j) {
                const TimeBracket& b = brackets[static_cast<std::size_t>(j)];
                grid_adjoint.col(b.k) += (1.0 - b.w) * code_cot.col(j);
                grid_adjoint.col(b.k + 1) += b.w * code_cot.col(j);
            }
            backward_codes(ode.dyn, path, ode.equilibrium_input.has_value(), ode.dt, ode.dt_ref,
                           grid_adjoint, grad.head(n_dyn));
        }
        loss += options.alpha_dyn * weight_mean_square(ode.dyn);
        loss += options.alpha_dec * weight_mean_square(ae.decoder);
        if (options.alpha_dyn > 0.0)
            add_weight_mean_square_gradient(ode.dyn, options.alpha_dyn, grad.head(n_dyn));
        if (options.alpha_dec > 0.0)
            add_weight_mean_square_gradient(ae.decoder, options.alpha_dec, grad.tail(n_dec));
        if (!std::isfinite(loss)) throw DivergenceError("fine-tuning loss became nonfinite", 0);
        return loss;
    };

    Vector theta0(n_dyn + n_dec);
    theta0.head(n_dyn) = flatten(ode.dyn);
    theta0.tail(n_dec) = flatten(ae.decoder);
    Vector theta = optimize_two_stage(objective, std::move(theta0), schedule, history);
    set_parameters(ode.dyn, theta.head(n_dyn));
    set_parameters(ae.decoder, theta.tail(n_dec));
}

}  // namespace ldnet::baselines
