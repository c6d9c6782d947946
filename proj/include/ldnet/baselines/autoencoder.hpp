#pragma once

#include "ldnet/dataset.hpp"
#include "ldnet/dense_network.hpp"
#include "ldnet/metrics.hpp"
#include "ldnet/training.hpp"

#include <optional>

namespace ldnet::baselines {

/// Encoder/decoder pair over a fixed spatial grid. Fields are normalized
/// nodewise on the way in and denormalized on the way out.
struct AEModel {
    DenseNetwork encoder;  // N_h -> d_s
    DenseNetwork decoder;  // d_s -> N_h
    NormalizationSpec field_norm;
    double y_norm = 1.0;

    Index n_h() const { return encoder.input_dim(); }
    Index d_s() const { return encoder.output_dim(); }
};

/// Hidden widths linearly varied between the given outer width and the latent
/// dimension; the decoder mirrors the encoder.
std::vector<Index> encoder_layer_sizes(Index n_h, Index d_s, int n_hidden, Index outer_width);
std::vector<Index> decoder_layer_sizes(Index n_h, Index d_s, int n_hidden, Index outer_width);

Matrix encode(const AEModel& model, const Matrix& fields);
Matrix decode(const AEModel& model, const Matrix& codes);

struct AutoencoderOptions {
    Index d_s = 4;
    int n_hidden = 1;
    Index outer_width = 16;
    double alpha_enc = 0.0;
    double alpha_dec = 0.0;
    std::uint64_t seed = 0;
};

/// Minimizes the mean over (sample, time) of
/// ||dec(enc(Y)) - Y||^2 / (N_h y_norm^2) plus the weight regularizers,
/// with the two-stage optimizer. Requires one shared spatial grid.
AEModel train_autoencoder(const Dataset& dataset, const AutoencoderOptions& options,
                          const TrainingSchedule& schedule,
                          std::vector<LossHistoryEntry>* history = nullptr);

/// Latent code dynamics fitted to encoder outputs with the same recurrent
/// Euler machinery as the main model. Codes are shifted so the path starts at
/// zero: the offset is the code of the initial field.
struct LatentOdeModel {
    DenseNetwork dyn;  // (d_s + d_u) -> d_s
    NormalizationSpec u_norm;
    double dt = 0.0;
    double dt_ref = 1.0;
    Vector code_offset;
    std::optional<Vector> equilibrium_input;
};

struct LatentOdeOptions {
    std::vector<Index> dyn_hidden;
    double dt = 0.0;
    double dt_ref = 1.0;
    double alpha_dyn = 0.0;
    std::uint64_t seed = 0;
    Vector initial_field;  // empty means the zero field
    std::optional<Vector> equilibrium_input;
};

LatentOdeModel train_latent_ode(const AEModel& ae, const Dataset& dataset,
                                const LatentOdeOptions& options, const TrainingSchedule& schedule,
                                std::vector<LossHistoryEntry>* history = nullptr);

/// Staged prediction: integrate the latent ODE, add the code offset, decode.
FieldSet predict_ae_ode(const AEModel& ae, const LatentOdeModel& ode, const Dataset& dataset);

struct E2eOptions {
    double alpha_dyn = 0.0;
    double alpha_dec = 0.0;
};

/// Joint fine-tuning of the dynamics network and the decoder against the
/// observed fields, starting from the staged parameters. The encoder is not
/// updated and is no longer needed afterwards.
void finetune_e2e(AEModel& ae, LatentOdeModel& ode, const Dataset& dataset,
                  const E2eOptions& options, const TrainingSchedule& schedule,
                  std::vector<LossHistoryEntry>* history = nullptr);

}  // namespace ldnet::baselines
