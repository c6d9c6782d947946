#include "ldnet/model.hpp"
#include "ldnet/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ldnet;

namespace {

LDNet random_model(Index d_s, Index d_u, Index d_x, Index d_y, std::uint64_t seed,
                   bool rec_uses_input = false) {
    LDNetSpec spec;
    spec.n_latent = d_s;
    spec.dyn_hidden = {7, 7};
    spec.rec_hidden = {6};
    spec.dt = 0.1;
    spec.dt_ref = 0.5;
    spec.rec_uses_input = rec_uses_input;
    spec.seed = seed;
    Rng rng(seed ^ 0xabcdULL);
    NormalizationSpec u_norm{rng.normal_vector(d_u), rng.uniform_vector(d_u, 0.5, 2.0)};
    NormalizationSpec x_norm{rng.normal_vector(d_x), rng.uniform_vector(d_x, 0.5, 2.0)};
    NormalizationSpec y_norm{rng.normal_vector(d_y), rng.uniform_vector(d_y, 0.5, 2.0)};
    return make_ldnet(spec, u_norm, x_norm, y_norm);
}

InputSignal ramp_signal(Index d_u, double T, Index n, std::uint64_t seed) {
    InputSignal s;
    s.times.resize(n);
    s.values.resize(n, d_u);
    Rng rng(seed);
    for (Index i = 0; i < n; ++i) {
        s.times[i] = T * static_cast<double>(i) / static_cast<double>(n - 1);
        s.values.row(i) = rng.normal_vector(d_u).transpose();
    }
    return s;
}

}  // namespace

TEST_CASE("input sampling: linear midpoint, exact knots, clamping") {
    InputSignal s;
    s.times = (Vector(2) << 0.0, 1.0).finished();
    s.values = (Matrix(2, 1) << 0.0, 2.0).finished();
    CHECK(sample_input_at(s, 0.5)[0] == doctest::Approx(1.0).epsilon(1e-15));

    InputSignal r = ramp_signal(3, 2.0, 7, 99);
    for (Index i = 0; i < r.times.size(); ++i)
        CHECK(sample_input_at(r, r.times[i]) == Vector(r.values.row(i).transpose()));
    CHECK(sample_input_at(r, 5.0) == Vector(r.values.row(6).transpose()));  // clamp

    InputSignal c = InputSignal::constant((Vector(2) << 3.0, -1.0).finished(), 4.0);
    for (double t : {0.0, 0.3, 2.7, 4.0, 9.0})
        CHECK(sample_input_at(c, t) == Vector(c.values.row(0).transpose()));

    CHECK_THROWS_AS(sample_input_at(r, -0.1), DomainError);

    InputSignal bad;
    bad.times = (Vector(2) << 1.0, 1.0).finished();
    bad.values = Matrix::Zero(2, 1);
    CHECK_THROWS_AS(validate(bad), SpecError);
}

TEST_CASE("latent rhs: equilibrium fixed point, zero net, formula oracle") {
    LDNet model = random_model(2, 3, 1, 1, 11);
    Vector u_eq = (Vector(3) << 0.2, -0.4, 1.0).finished();
    model.equilibrium_input = u_eq;
    CHECK(latent_rhs(model, Vector::Zero(2), u_eq).isZero(0.0));

    LDNet zero = random_model(2, 3, 1, 1, 12);
    zero.dyn = make_zero_network(zero.dyn.layer_sizes);
    Rng rng(5);
    CHECK(latent_rhs(zero, rng.normal_vector(2), rng.normal_vector(3)).isZero(0.0));

    // Independent re-evaluation of the scaled composition.
    LDNet m = random_model(3, 2, 1, 1, 13);
    Vector s = rng.normal_vector(3);
    Vector u = rng.normal_vector(2);
    Vector z(5);
    z.head(3) = s;
    z.tail(2) = (u - m.u_norm.center).cwiseQuotient(m.u_norm.half_width);
    Vector expected = testing::plain_mlp(m.dyn, z) / m.dt_ref;
    CHECK((latent_rhs(m, s, u) - expected).lpNorm<Eigen::Infinity>() <= 1e-14);

    CHECK_THROWS_AS(latent_rhs(m, Vector::Zero(4), u), ShapeError);
    CHECK_THROWS_AS(latent_rhs(m, s, Vector::Zero(5)), ShapeError);
}

TEST_CASE("euler integration: constant rhs, equilibrium, linear recurrence") {
    // Constant rhs c: zero weights, output bias c * dt_ref.
    LDNet model = random_model(2, 1, 1, 1, 21);
    model.dyn = make_zero_network(model.dyn.layer_sizes);
    Vector c = (Vector(2) << 0.3, -0.7).finished();
    model.dyn.biases.back() = c * model.dt_ref;
    InputSignal u = InputSignal::constant(Vector::Zero(1), 1.0);
    LatentTrajectory traj = integrate_latent(model, u, 1.0);
    CHECK(traj.states.cols() == 11);
    CHECK(traj.states.col(0).isZero(0.0));
    for (Index k = 0; k <= 10; ++k) {
        Vector expected = static_cast<double>(k) * model.dt * c;
        CHECK((traj.states.col(k) - expected).lpNorm<Eigen::Infinity>() <= 1e-13);
    }

    // Equilibrium input held: trajectory pinned at zero, bitwise.
    LDNet eq_model = random_model(3, 2, 1, 1, 22);
    Vector u_eq = (Vector(2) << 0.5, -0.5).finished();
    eq_model.equilibrium_input = u_eq;
    LatentTrajectory eq_traj = integrate_latent(eq_model, InputSignal::constant(u_eq, 2.0), 2.0);
    CHECK(eq_traj.states.isZero(0.0));

    // Scalar linear rhs ds/dt = -s through a single linear layer.
    LDNet lin = random_model(1, 1, 1, 1, 23);
    lin.dyn = make_zero_network({2, 1});
    lin.dyn.weights[0](0, 0) = -lin.dt_ref;
    Vector s = Vector::Constant(1, 1.0);
    const Vector u0 = Vector::Zero(1);
    for (int k = 0; k < 10; ++k) s += lin.dt * latent_rhs(lin, s, u0);
    CHECK(s[0] == doctest::Approx(std::pow(1.0 - lin.dt, 10)).epsilon(1e-14));
    LatentTrajectory lin_traj = integrate_latent(lin, InputSignal::constant(u0, 1.0), 1.0);
    CHECK(lin_traj.states.isZero(0.0));

    // Nonfinite parameters surface as a divergence with the step index.
    LDNet broken = random_model(1, 1, 1, 1, 24);
    broken.dyn.biases.back()[0] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(integrate_latent(broken, InputSignal::constant(u0, 1.0), 1.0),
                    DivergenceError);
}

TEST_CASE("latent interpolation: knots bit-exact, midpoint mean, range check") {
    LatentTrajectory traj;
    traj.dt = 0.25;
    Rng rng(31);
    traj.states = Matrix(2, 5);
    for (Index k = 0; k < 5; ++k) traj.states.col(k) = rng.normal_vector(2);
    traj.states.col(0).setZero();

    for (Index k = 0; k < 5; ++k)
        CHECK(interpolate_latent(traj, 0.25 * static_cast<double>(k)) == Vector(traj.states.col(k)));
    Vector mid = interpolate_latent(traj, 0.375);
    CHECK((mid - 0.5 * (traj.states.col(1) + traj.states.col(2))).lpNorm<Eigen::Infinity>() <=
          1e-15);

    LatentTrajectory flat;
    flat.dt = 0.5;
    flat.states = Matrix::Constant(3, 4, 1.5);
    for (double t : {0.0, 0.1, 0.77, 1.5})
        CHECK(interpolate_latent(flat, t) == Vector::Constant(3, 1.5));

    CHECK_THROWS_AS(interpolate_latent(traj, -0.5), DomainError);
    CHECK_THROWS_AS(interpolate_latent(traj, 1.1), DomainError);
}

TEST_CASE("reconstruction: dirichlet exactness, zero net offset, formula oracle") {
    Rng rng(41);

    // Dirichlet: output equals the lift wherever the mask vanishes.
    LDNet model = random_model(2, 2, 1, 1, 42);
    model.dirichlet = DirichletCondition{
        [](const Vector& x) { return Vector::Constant(1, 2.0 + x[0]); },
        [](const Vector& x) { return x[0] * (1.0 - x[0]); },  // zero on {0, 1}
    };
    for (double xb : {0.0, 1.0}) {
        Vector x = Vector::Constant(1, xb);
        Vector out = reconstruct(model, rng.normal_vector(2), rng.normal_vector(2), x);
        CHECK(out[0] == 2.0 + xb);
    }

    // Zero network, no dirichlet: the output normalization center.
    LDNet zero = random_model(2, 2, 1, 3, 43);
    zero.rec = make_zero_network(zero.rec.layer_sizes);
    Vector out = reconstruct(zero, rng.normal_vector(2), rng.normal_vector(2),
                             rng.normal_vector(1));
    CHECK(out == zero.y_norm.center);

    // Independent normalized-composition oracle.
    LDNet m = random_model(2, 2, 2, 2, 44, true);
    Vector s = rng.normal_vector(2);
    Vector u = rng.normal_vector(2);
    Vector x = rng.normal_vector(2);
    Vector z(6);
    z.head(2) = s;
    z.segment(2, 2) = (u - m.u_norm.center).cwiseQuotient(m.u_norm.half_width);
    z.tail(2) = (x - m.x_norm.center).cwiseQuotient(m.x_norm.half_width);
    Vector expected =
        m.y_norm.center + m.y_norm.half_width.cwiseProduct(testing::plain_mlp(m.rec, z));
    CHECK((reconstruct(m, s, u, x) - expected).lpNorm<Eigen::Infinity>() <= 1e-14);

    CHECK_THROWS_AS(reconstruct(m, s, u, Vector::Zero(3)), ShapeError);
}

TEST_CASE("prediction: frozen equilibrium, pointwise independence, composition") {
    Rng rng(51);

    LDNet model = random_model(2, 2, 1, 1, 52);
    Vector u_eq = (Vector(2) << 1.0, -1.0).finished();
    model.equilibrium_input = u_eq;

    Vector obs_times = (Vector(4) << 0.15, 0.4, 0.75, 1.0).finished();
    Matrix pts(1, 5);
    pts << -0.9, -0.3, 0.0, 0.4, 0.8;
    std::vector<Matrix> points(4, pts);

    // Held equilibrium input freezes the latent state: fields constant in time.
    auto fields = predict(model, InputSignal::constant(u_eq, 1.0), obs_times, points);
    for (std::size_t j = 1; j < fields.size(); ++j)
        CHECK((fields[j] - fields[0]).lpNorm<Eigen::Infinity>() == 0.0);

    // A repeated query point yields the identical value.
    Matrix doubled(1, 2);
    doubled << 0.4, 0.4;
    auto rep = predict(model, ramp_signal(2, 1.0, 11, 53), obs_times,
                       std::vector<Matrix>(4, doubled));
    for (const Matrix& f : rep) CHECK(f.col(0) == f.col(1));

    // Composition against looped scalar reconstructions, bit-identical.
    LDNet m = random_model(3, 2, 1, 2, 54);
    InputSignal signal = ramp_signal(2, 1.0, 11, 55);
    auto full = predict(m, signal, obs_times, points);
    LatentTrajectory traj = integrate_latent(m, signal, obs_times.maxCoeff());
    for (Index j = 0; j < obs_times.size(); ++j) {
        Vector s_tau = interpolate_latent(traj, obs_times[j]);
        Vector u_tau = sample_input_at(signal, obs_times[j]);
        for (Index p = 0; p < pts.cols(); ++p) {
            Vector one = reconstruct(m, s_tau, u_tau, pts.col(p));
            CHECK(full[static_cast<std::size_t>(j)].col(p) == one);
        }
    }

    // Permuting query points permutes outputs identically.
    Matrix perm(1, 5);
    perm << 0.8, -0.9, 0.4, -0.3, 0.0;
    auto permuted = predict(m, signal, obs_times, std::vector<Matrix>(4, perm));
    CHECK(permuted[1].col(0) == full[1].col(4));
    CHECK(permuted[1].col(1) == full[1].col(0));
    CHECK(permuted[1].col(2) == full[1].col(3));
}

TEST_CASE("causality: truncating future inputs leaves earlier predictions unchanged") {
    LDNet model = random_model(2, 2, 1, 1, 61);
    const double dt = model.dt;  // 0.1
    const double T = 2.0;
    const Index n = 21;
    InputSignal signal = ramp_signal(2, T, n, 62);  // knots on the Euler grid

    Vector obs_times(6);
    obs_times << 0.2, 0.5, 0.8, 0.95, 1.1, 1.3;
    Matrix pts(1, 3);
    pts << -0.5, 0.1, 0.7;
    std::vector<Matrix> points(6, pts);
    auto full = predict(model, signal, obs_times, points);

    const double t_star = 1.4;
    InputSignal truncated;
    Index keep = 0;
    while (keep < signal.times.size() && signal.times[keep] <= t_star + 1e-12) ++keep;
    truncated.times = signal.times.head(keep);
    truncated.values = signal.values.topRows(keep);
    auto cut = predict(model, truncated, obs_times, points);

    for (Index j = 0; j < obs_times.size(); ++j) {
        if (obs_times[j] <= t_star - dt)
            CHECK(cut[static_cast<std::size_t>(j)] == full[static_cast<std::size_t>(j)]);
    }
}
