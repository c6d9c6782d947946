#pragma once

#include "ldnet/loss.hpp"
#include "ldnet/optimizers.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ldnet {

struct TrainingSchedule {
    int adam_epochs = 0;
    double adam_lr0 = 1e-2;
    int bfgs_epochs = 0;
    std::uint64_t seed = 0;
};

void validate(const TrainingSchedule& schedule);

struct LossHistoryEntry {
    int epoch = 0;
    std::string stage;  // "adam" or "bfgs"
    double loss = 0.0;
};

/// Full-batch Adam followed by full-batch BFGS on one flat parameter vector.
/// Adam history entries record the objective at the start of each epoch; BFGS
/// entries record each accepted iterate.
Vector optimize_two_stage(const Objective& objective, Vector x0, const TrainingSchedule& schedule,
                          std::vector<LossHistoryEntry>* history);

struct TrainResult {
    LDNet model;
    std::vector<LossHistoryEntry> history;
};

/// Trains both networks jointly on the concatenated parameter vector
/// [dyn params; rec params] against the full-batch loss. Deterministic for a
/// fixed model and schedule.
TrainResult train_two_stage(LDNet model, const Dataset& dataset, const LossSpec& loss_spec,
                            const TrainingSchedule& schedule);

}  // namespace ldnet
