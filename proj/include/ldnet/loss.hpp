#pragma once

#include "ldnet/dataset.hpp"
#include "ldnet/model.hpp"

#include <variant>

namespace ldnet {

/// ||pred - ref||^2 / y_norm^2.
struct QuadraticMetric {
    double y_norm = 1.0;
};

/// ||ref - pred||^2 / v_norm^2
///   + gamma * ||ref/(eps + ||ref||) - pred/(eps + ||pred||)||^2.
/// The second term matches the field direction even where the magnitude is
/// small; eps guards the zero-magnitude singularity.
struct GoalOrientedMetric {
    double v_norm = 1.0;
    double gamma = 1e-1;
    double eps = 1e-4;
};

struct LossSpec {
    std::variant<QuadraticMetric, GoalOrientedMetric> metric = QuadraticMetric{};
    double alpha_dyn = 0.0;  // L2 weight for the dynamics network
    double alpha_rec = 0.0;  // L2 weight for the reconstruction network
};

void validate(const LossSpec& spec);

double discrepancy_quadratic(const Vector& pred, const Vector& ref, double y_norm);
double discrepancy_goal_oriented(const Vector& pred, const Vector& ref, double v_norm,
                                 double gamma, double eps);

/// Pointwise discrepancy and its gradient with respect to the prediction,
/// batched over columns. Returns the summed discrepancy over columns and, if
/// grad is nonnull, fills one gradient column per prediction column.
double discrepancy_batch(const LossSpec& spec, const Matrix& pred, const Matrix& ref,
                         Matrix* grad);

/// Average over samples of the average over times of the average over points
/// of the discrepancy, plus alpha_dyn * mean(dyn weights^2) + alpha_rec *
/// mean(rec weights^2). Regularization applies to weights only; biases are
/// not penalized.
double total_loss(const LDNet& model, const Dataset& dataset, const LossSpec& spec);

struct BpttResult {
    double loss = 0.0;
    Vector grad_dyn;
    Vector grad_rec;
};

/// Loss and exact reverse-mode gradient through the Euler recursion, the
/// latent interpolation and the reconstruction calls. Samples are accumulated
/// in index order so results are reproducible bit-for-bit.
BpttResult bptt_gradient(const LDNet& model, const Dataset& dataset, const LossSpec& spec);

}  // namespace ldnet
