#include "ldnet/training.hpp"

#include <cmath>

namespace ldnet {

void validate(const TrainingSchedule& schedule) {
    if (schedule.adam_epochs < 0 || schedule.bfgs_epochs < 0)
        throw SpecError("epoch counts must be nonnegative");
    if (schedule.adam_lr0 <= 0.0) throw SpecError("initial Adam learning rate must be positive");
}

Vector optimize_two_stage(const Objective& objective, Vector x0, const TrainingSchedule& schedule,
                          std::vector<LossHistoryEntry>* history) {
    validate(schedule);
    Vector x = std::move(x0);
    int epoch = 0;

    if (schedule.adam_epochs > 0) {
        AdamState state = make_adam_state(x.size());
        Vector g(x.size());
        for (int i = 0; i < schedule.adam_epochs; ++i) {
            double f;
            try {
                f = objective(x, g);
            } catch (const DivergenceError& e) {
                throw DivergenceError("divergence in Adam stage, epoch " + std::to_string(epoch) +
                                          ": " + e.what(),
                                      epoch);
            }
            if (history) history->push_back({epoch, "adam", f});
            adam_step(state, x, g, schedule.adam_lr0);
            ++epoch;
        }
    }

    if (schedule.bfgs_epochs > 0) {
        std::vector<double> bfgs_history;
        BfgsResult result;
        try {
            result = bfgs_run(objective, std::move(x), schedule.bfgs_epochs, {}, &bfgs_history);
        } catch (const DivergenceError& e) {
            throw DivergenceError("divergence in BFGS stage, epoch " + std::to_string(epoch) +
                                      ": " + e.what(),
                                  epoch);
        }
        x = std::move(result.x);
        if (history)
            for (double f : bfgs_history) history->push_back({epoch++, "bfgs", f});
    }
    return x;
}

TrainResult train_two_stage(LDNet model, const Dataset& dataset, const LossSpec& loss_spec,
                            const TrainingSchedule& schedule) {
    validate(model);
    validate(loss_spec);
    if (dataset.samples.empty()) throw DataError("dataset has no samples");
    if (model.input_dim() != dataset.d_u || model.space_dim() != dataset.d_x ||
        model.output_dim() != dataset.d_y)
        throw ShapeError("model dimensions do not match the dataset");

    const Index n_dyn = model.dyn.parameter_count();
    const Index n_rec = model.rec.parameter_count();

    Objective objective = [&model, &dataset, &loss_spec, n_dyn, n_rec](const Vector& theta,
                                                                       Vector& grad) {
        set_parameters(model.dyn, theta.head(n_dyn));
        set_parameters(model.rec, theta.tail(n_rec));
        BpttResult r = bptt_gradient(model, dataset, loss_spec);
        grad.resize(n_dyn + n_rec);
        grad.head(n_dyn) = r.grad_dyn;
        grad.tail(n_rec) = r.grad_rec;
        return r.loss;
    };

    Vector theta0(n_dyn + n_rec);
    theta0.head(n_dyn) = flatten(model.dyn);
    theta0.tail(n_rec) = flatten(model.rec);

    TrainResult result;
    Vector theta = optimize_two_stage(objective, std::move(theta0), schedule, &result.history);
    set_parameters(model.dyn, theta.head(n_dyn));
    set_parameters(model.rec, theta.tail(n_rec));
    result.model = std::move(model);
    return result;
}

}  // namespace ldnet
