#include "ldnet/optimizers.hpp"

#include <cmath>

namespace ldnet {

AdamState make_adam_state(Index n) {
    AdamState s;
    s.m = Vector::Zero(n);
    s.v = Vector::Zero(n);
    return s;
}

void adam_step(AdamState& state, Vector& params, const Vector& gradient, double lr) {
    if (gradient.size() != params.size() || state.m.size() != params.size())
        throw ShapeError("Adam state, parameters and gradient must agree in size");
    if (!gradient.allFinite()) throw DivergenceError("nonfinite gradient in Adam step", state.t);
    state.t += 1;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient;
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * gradient.cwiseAbs2();
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    params -= (lr / bc1) * state.m.cwiseQuotient(
                  ((state.v / bc2).cwiseSqrt().array() + state.eps).matrix());
}

namespace {

struct LinePoint {
    double alpha = 0.0;
    double phi = 0.0;
    double dphi = 0.0;
};

// Cubic interpolation of the step; falls back to bisection when degenerate.
double interpolate_step(const LinePoint& a, const LinePoint& b) {
    const double d1 = a.dphi + b.dphi - 3.0 * (a.phi - b.phi) / (a.alpha - b.alpha);
    const double disc = d1 * d1 - a.dphi * b.dphi;
    if (disc >= 0.0) {
        const double d2 = std::copysign(std::sqrt(disc), b.alpha - a.alpha);
        double t = b.alpha -
                   (b.alpha - a.alpha) * (b.dphi + d2 - d1) / (b.dphi - a.dphi + 2.0 * d2);
        const double lo = std::min(a.alpha, b.alpha);
        const double hi = std::max(a.alpha, b.alpha);
        const double guard = 0.1 * (hi - lo);
        if (std::isfinite(t) && t > lo + guard && t < hi - guard) return t;
    }
    return 0.5 * (a.alpha + b.alpha);
}

}  // namespace

BfgsResult bfgs_run(const Objective& objective, Vector x0, int max_epochs,
                    const BfgsOptions& options, std::vector<double>* history) {
    const Index n = x0.size();
    Vector g(n);
    double f = objective(x0, g);
    if (!std::isfinite(f)) throw SpecError("objective is nonfinite at the starting point");

    BfgsResult result;
    result.x = std::move(x0);
    result.value = f;
    if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
        result.stop_reason = "gradient tolerance met at start";
        return result;
    }

    Matrix h_inv = Matrix::Identity(n, n);
    bool scale_h_on_next_update = true;

    for (int iter = 0; iter < max_epochs; ++iter) {
        Vector direction = -(h_inv * g);
        double dphi0 = direction.dot(g);
        if (!(dphi0 < 0.0)) {
            h_inv.setIdentity();
            scale_h_on_next_update = true;
            direction = -g;
            dphi0 = direction.dot(g);
        }

        // Strong Wolfe line search: bracket, then zoom.
        const double phi0 = f;
        Vector x_trial;
        Vector g_trial(n);
        int evals = 0;
        auto eval = [&](double alpha) {
            x_trial = result.x + alpha * direction;
            const double value = objective(x_trial, g_trial);
            ++evals;
            return LinePoint{alpha, value, direction.dot(g_trial)};
        };
        auto armijo_fails = [&](const LinePoint& p) {
            return !std::isfinite(p.phi) || p.phi > phi0 + options.wolfe_c1 * p.alpha * dphi0;
        };
        auto wolfe_ok = [&](const LinePoint& p) {
            return !armijo_fails(p) && std::abs(p.dphi) <= options.wolfe_c2 * std::abs(dphi0);
        };
        auto zoom = [&](LinePoint lo, LinePoint hi) -> std::pair<bool, LinePoint> {
            while (evals < options.max_line_search_steps) {
                if (std::abs(hi.alpha - lo.alpha) < 1e-14 * std::max(1.0, lo.alpha)) break;
                LinePoint mid = eval(interpolate_step(lo, hi));
                if (armijo_fails(mid) || mid.phi >= lo.phi) {
                    hi = mid;
                } else {
                    if (wolfe_ok(mid)) return {true, mid};
                    if (mid.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
                    lo = mid;
                }
            }
            // Fall back to the best sufficient-decrease point seen in the zoom.
            if (!armijo_fails(lo) && lo.alpha > 0.0) return {true, eval(lo.alpha)};
            return {false, lo};
        };

        bool found = false;
        LinePoint accepted;
        LinePoint prev{0.0, phi0, dphi0};
        double alpha = 1.0;
        while (evals < options.max_line_search_steps) {
            LinePoint cur = eval(alpha);
            if (armijo_fails(cur) || (prev.alpha > 0.0 && cur.phi >= prev.phi)) {
                std::tie(found, accepted) = zoom(prev, cur);
                break;
            }
            if (wolfe_ok(cur)) {
                found = true;
                accepted = cur;
                break;
            }
            if (cur.dphi >= 0.0) {
                std::tie(found, accepted) = zoom(cur, prev);
                break;
            }
            prev = cur;
            alpha *= 2.0;
        }

        if (!found || accepted.alpha <= 0.0) {
            result.stop_reason = "line search failed";
            return result;
        }
        // eval() leaves x_trial/g_trial at the last evaluated point, which is
        // the accepted one (every acceptance breaks out immediately).
        Vector s = accepted.alpha * direction;
        Vector y = g_trial - g;
        const double sy = s.dot(y);

        result.x += s;
        f = accepted.phi;
        g = g_trial;
        result.value = f;
        result.iterations = iter + 1;
        if (history) history->push_back(f);

        if (g.lpNorm<Eigen::Infinity>() <= options.grad_tol) {
            result.stop_reason = "gradient tolerance met";
            return result;
        }

        if (sy > 1e-12 * s.norm() * y.norm()) {
            if (scale_h_on_next_update) {
                h_inv *= sy / y.squaredNorm();
                scale_h_on_next_update = false;
            }
            const double rho = 1.0 / sy;
            Vector hy = h_inv * y;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            h_inv.noalias() -= rho * (s * hy.transpose() + hy * s.transpose());
            h_inv.noalias() += (rho * rho * y.dot(hy) + rho) * (s * s.transpose());
        }
    }

    result.stop_reason = "max epochs reached";
    return result;
}

}  // namespace ldnet
