#pragma once

#include "ldnet/types.hpp"

#include <functional>
#include <string>
#include <vector>

namespace ldnet {

/// Objective with gradient: fills grad (same size as x) and returns the value.
using Objective = std::function<double(const Vector&, Vector&)>;

struct AdamState {
    Vector m;
    Vector v;
    long t = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState make_adam_state(Index n);

/// One Adam update with bias correction, in place on params.
void adam_step(AdamState& state, Vector& params, const Vector& gradient, double lr);

struct BfgsOptions {
    double wolfe_c1 = 1e-4;
    double wolfe_c2 = 0.9;
    double grad_tol = 1e-10;  // stop when max|g| drops below this
    int max_line_search_steps = 50;
};

struct BfgsResult {
    Vector x;
    double value = 0.0;
    int iterations = 0;
    std::string stop_reason;
};

/// Dense-inverse-Hessian BFGS with a strong-Wolfe line search. One "epoch" is
/// one accepted iteration. Never returns a point with a higher objective than
/// the start; on line-search failure the best iterate so far is returned.
BfgsResult bfgs_run(const Objective& objective, Vector x0, int max_epochs,
                    const BfgsOptions& options = {}, std::vector<double>* history = nullptr);

}  // namespace ldnet
