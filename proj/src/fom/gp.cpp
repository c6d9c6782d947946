#include "ldnet/fom/gp.hpp"

#include "ldnet/rng.hpp"

#include <Eigen/Cholesky>

#include <cmath>

namespace ldnet::fom {

Matrix gp_kernel_matrix(const GPConfig& config) {
    if (config.times.size() == 0) throw SpecError("GP sample grid is empty");
    if (config.std <= 0.0) throw SpecError("GP standard deviation must be positive");
    if (config.timescale <= 0.0) throw SpecError("GP timescale must be positive");
    const Index n = config.times.size();
    const double var = config.std * config.std;
    const double inv2tau2 = 1.0 / (2.0 * config.timescale * config.timescale);
    Matrix k(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j <= i; ++j) {
            const double d = config.times[i] - config.times[j];
            k(i, j) = k(j, i) = var * std::exp(-d * d * inv2tau2);
        }
    return k;
}

InputSignal sample_gp(const GPConfig& config) {
    Matrix k = gp_kernel_matrix(config);
    const Index n = k.rows();
    const double var = config.std * config.std;

    Eigen::LLT<Matrix> llt;
    double jitter = 1e-10;
    for (;;) {
        Matrix kj = k + jitter * var * Matrix::Identity(n, n);
        llt.compute(kj);
        if (llt.info() == Eigen::Success) break;
        jitter *= 10.0;
        if (jitter > 1e-3)
            throw NumericsError("GP kernel matrix is not positive definite even with jitter");
    }

    Rng rng = Rng::derive(config.seed, "gp-path", 0);
    Vector path = Vector::Constant(n, config.mean) + llt.matrixL() * rng.normal_vector(n);

    InputSignal signal;
    signal.times = config.times;
    signal.values = path;
    return signal;
}

double bounded_frequency_transform(double fmin, double fmax, double gamma) {
    return 0.5 * (fmin + fmax + (fmax - fmin) * std::tanh(0.6 * gamma));
}

InputSignal sample_bounded_frequency(double fmin, double fmax, double timescale,
                                     const Vector& times, std::uint64_t seed) {
    if (!(fmax > fmin) || fmin <= 0.0)
        throw SpecError("bounded frequency needs fmax > fmin > 0");
    GPConfig gp{0.0, 1.0, timescale, times, seed};
    InputSignal signal = sample_gp(gp);
    for (Index i = 0; i < signal.values.rows(); ++i)
        signal.values(i, 0) = bounded_frequency_transform(fmin, fmax, signal.values(i, 0));
    return signal;
}

}  // namespace ldnet::fom
