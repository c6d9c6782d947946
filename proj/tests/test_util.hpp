#pragma once

#include "ldnet/dense_network.hpp"
#include "ldnet/types.hpp"

#include <cmath>
#include <functional>
#include <vector>

namespace ldnet::testing {

/// Independent tanh-MLP evaluation with plain loops, no Eigen products.
inline Vector plain_mlp(const DenseNetwork& net, const Vector& input) {
    std::vector<double> a(input.data(), input.data() + input.size());
    for (Index k = 0; k < net.num_layers(); ++k) {
        const Matrix& w = net.weights[k];
        std::vector<double> next(static_cast<std::size_t>(w.rows()));
        for (Index r = 0; r < w.rows(); ++r) {
            double acc = net.biases[k][r];
            for (Index c = 0; c < w.cols(); ++c) acc += w(r, c) * a[static_cast<std::size_t>(c)];
            next[static_cast<std::size_t>(r)] = (k + 1 < net.num_layers()) ? std::tanh(acc) : acc;
        }
        a = std::move(next);
    }
    return Eigen::Map<Vector>(a.data(), static_cast<Index>(a.size()));
}

/// Central finite differences of a scalar function of a flat vector.
inline Vector central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                 double h = 1e-6) {
    Vector g(x.size());
    Vector xp = x;
    for (Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = f(xp);
        xp[i] = xi - h;
        const double fm = f(xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

/// Per-entry relative error with a floor keyed to the gradient scale, so that
/// near-zero entries are judged on an absolute basis.
inline double max_relative_error(const Vector& a, const Vector& b) {
    const double scale = std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
    const double floor = std::max(1e-3 * scale, 1e-12);
    double worst = 0.0;
    for (Index i = 0; i < a.size(); ++i) {
        const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
    return worst;
}

}  // namespace ldnet::testing
