#pragma once

#include "ldnet/model.hpp"

#include <filesystem>
#include <string>

namespace ldnet {

/// Checkpoint = <stem>.json (architecture, normalization vectors, integration
/// settings, provenance) + <stem>.bin (flat parameters of the dynamics
/// network followed by the reconstruction network, little-endian float64 in
/// the documented per-network order).
struct CheckpointMeta {
    double loss_y_norm = 0.0;    // metric normalization the model was trained with
    std::string config_hash;     // resolved-config provenance
};

void save_checkpoint(const LDNet& model, const std::filesystem::path& stem,
                     const CheckpointMeta& meta = {});

struct LoadedCheckpoint {
    LDNet model;
    CheckpointMeta meta;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& stem);

}  // namespace ldnet
