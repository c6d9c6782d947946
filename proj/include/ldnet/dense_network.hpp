#pragma once

#include "ldnet/types.hpp"

#include <cstdint>
#include <vector>

namespace ldnet {

/// Fully connected network with tanh hidden activations and a linear output
/// layer. Values are immutable in practice: forward/vjp never mutate, and
/// parameter updates go through set_parameters with a full flat vector.
///
/// Flat parameter order (used by flatten/set_parameters, checkpoints and all
/// gradients): layer by layer, weight matrix in row-major order first, then
/// the bias vector.
struct DenseNetwork {
    std::vector<Index> layer_sizes;
    std::vector<Matrix> weights;  // weights[k]: (layer_sizes[k+1] x layer_sizes[k])
    std::vector<Vector> biases;   // biases[k]: layer_sizes[k+1]

    Index input_dim() const { return layer_sizes.front(); }
    Index output_dim() const { return layer_sizes.back(); }
    Index num_layers() const { return static_cast<Index>(weights.size()); }
    Index parameter_count() const;
    Index weight_count() const;
};

/// All-zero network of the given architecture.
DenseNetwork make_zero_network(const std::vector<Index>& layer_sizes);

/// Glorot-uniform weights in +-sqrt(6/(fan_in+fan_out)), zero biases.
/// Deterministic for a fixed seed.
DenseNetwork init_glorot(const std::vector<Index>& layer_sizes, std::uint64_t seed);

Vector flatten(const DenseNetwork& net);
void set_parameters(DenseNetwork& net, const Vector& flat);

/// Mean of the squared weights (biases excluded) and its gradient
/// contribution; this is the L2 regularizer applied during training.
double weight_mean_square(const DenseNetwork& net);
void add_weight_mean_square_gradient(const DenseNetwork& net, double scale,
                                     Eigen::Ref<Vector> flat_grad);

Vector forward(const DenseNetwork& net, const Vector& input);

/// Batched forward: one input per column.
Matrix forward(const DenseNetwork& net, const Matrix& inputs);

/// Activations recorded during a batched forward pass, for reverse mode.
/// layer_values[0] is the input batch; layer_values[k] for k >= 1 holds the
/// post-tanh activations of hidden layer k. The linear output is not stored.
struct ForwardTrace {
    std::vector<Matrix> layer_values;
};

Matrix forward(const DenseNetwork& net, const Matrix& inputs, ForwardTrace& trace);

/// Reverse pass over a recorded trace. Returns the cotangent pulled back to
/// the inputs (one column per batch column) and accumulates (+=) the
/// parameter cotangent into flat_grad, which must have parameter_count()
/// entries in the documented flat order.
Matrix vjp_backward(const DenseNetwork& net, const ForwardTrace& trace,
                    const Matrix& output_cotangents, Eigen::Ref<Vector> flat_grad);

/// Single-input vector-Jacobian product:
/// returns (cotangent^T d(output)/d(input), cotangent^T d(output)/d(parameters)).
std::pair<Vector, Vector> vjp(const DenseNetwork& net, const Vector& input,
                              const Vector& cotangent);

}  // namespace ldnet
