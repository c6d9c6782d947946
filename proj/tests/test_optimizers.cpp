#include "ldnet/optimizers.hpp"
#include "ldnet/rng.hpp"
#include "ldnet/training.hpp"

#include <doctest.h>

#include <cmath>

using namespace ldnet;

TEST_CASE("adam: first-step direction, zero gradient, scripted recurrence") {
    Vector params = (Vector(3) << 1.0, -2.0, 0.5).finished();
    Vector g = (Vector(3) << 0.2, -0.3, 0.0).finished();
    AdamState state = make_adam_state(3);
    Vector before = params;
    adam_step(state, params, g, 1e-2);
    // First step with bias correction moves by ~lr in the sign direction.
    CHECK(params[0] == doctest::Approx(before[0] - 1e-2).epsilon(1e-6));
    CHECK(params[1] == doctest::Approx(before[1] + 1e-2).epsilon(1e-6));
    CHECK(params[2] == before[2]);

    AdamState zero_state = make_adam_state(3);
    Vector frozen = before;
    for (int i = 0; i < 5; ++i) adam_step(zero_state, frozen, Vector::Zero(3), 1e-2);
    CHECK(frozen == before);

    // Three steps on f(t) = t^2/2 from t = 1 against a hand-rolled recurrence.
    double theta = 1.0;
    double m = 0.0, v = 0.0;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8, lr = 0.1;
    for (int t = 1; t <= 3; ++t) {
        const double grad = theta;
        m = b1 * m + (1 - b1) * grad;
        v = b2 * v + (1 - b2) * grad * grad;
        const double mhat = m / (1 - std::pow(b1, t));
        const double vhat = v / (1 - std::pow(b2, t));
        theta -= lr * mhat / (std::sqrt(vhat) + eps);
    }
    Vector p = Vector::Constant(1, 1.0);
    AdamState s = make_adam_state(1);
    for (int t = 0; t < 3; ++t) adam_step(s, p, p, lr);
    CHECK(p[0] == doctest::Approx(theta).epsilon(1e-12));

    Vector bad = Vector::Constant(1, std::nan(""));
    AdamState s2 = make_adam_state(1);
    CHECK_THROWS_AS(adam_step(s2, p, bad, lr), DivergenceError);
}

TEST_CASE("bfgs: SPD quadratic reaches tight gradient norms in few iterations") {
    Matrix a(2, 2);
    a << 3.0, 0.4, 0.4, 1.5;
    Objective objective = [&](const Vector& x, Vector& g) {
        g = a * x;
        return 0.5 * x.dot(a * x);
    };
    BfgsResult r = bfgs_run(objective, (Vector(2) << 4.0, -3.0).finished(), 10);
    Vector g(2);
    objective(r.x, g);
    CHECK(g.norm() <= 1e-10);
    CHECK(r.iterations <= 10);
}

TEST_CASE("bfgs: rosenbrock from the classic start") {
    Objective rosenbrock = [](const Vector& x, Vector& g) {
        const double a = 1.0 - x[0];
        const double b = x[1] - x[0] * x[0];
        g.resize(2);
        g[0] = -2.0 * a - 400.0 * x[0] * b;
        g[1] = 200.0 * b;
        return a * a + 100.0 * b * b;
    };
    BfgsResult r = bfgs_run(rosenbrock, (Vector(2) << -1.2, 1.0).finished(), 200);
    CHECK(r.iterations <= 200);
    CHECK(std::abs(r.x[0] - 1.0) <= 1e-6);
    CHECK(std::abs(r.x[1] - 1.0) <= 1e-6);
}

TEST_CASE("bfgs: zero gradient start returns the input unchanged") {
    Objective objective = [](const Vector& x, Vector& g) {
        g = Vector::Zero(x.size());
        return 1.0;
    };
    Vector x0 = (Vector(3) << 1.0, 2.0, 3.0).finished();
    BfgsResult r = bfgs_run(objective, x0, 50);
    CHECK(r.x == x0);
    CHECK(r.iterations == 0);

    Objective nan_objective = [](const Vector&, Vector& g) {
        g = Vector::Zero(2);
        return std::nan("");
    };
    CHECK_THROWS_AS(bfgs_run(nan_objective, Vector::Zero(2), 5), SpecError);
}

TEST_CASE("bfgs: never returns a higher objective than the start") {
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 4;
        Matrix m(n, n);
        for (Index i = 0; i < n; ++i) m.col(i) = rng.normal_vector(n);
        Matrix spd = m * m.transpose() + 0.1 * Matrix::Identity(n, n);
        Vector shift = rng.normal_vector(n);
        Objective objective = [&](const Vector& x, Vector& g) {
            Vector d = x - shift;
            g = spd * d + 0.3 * d.array().cos().matrix();
            return 0.5 * d.dot(spd * d) + 0.3 * d.array().sin().sum();
        };
        Vector x0 = rng.normal_vector(n);
        Vector g0(n);
        const double f0 = objective(x0, g0);
        BfgsResult r = bfgs_run(objective, x0, 25);
        CHECK(r.value <= f0);
    }
}

TEST_CASE("two-stage driver: empty schedule is the identity, bfgs stage monotone") {
    Objective quadratic = [](const Vector& x, Vector& g) {
        g = 2.0 * x;
        return x.squaredNorm();
    };
    Vector x0 = (Vector(2) << 0.7, -1.1).finished();

    std::vector<LossHistoryEntry> history;
    TrainingSchedule empty;
    Vector unchanged = optimize_two_stage(quadratic, x0, empty, &history);
    CHECK(unchanged == x0);
    CHECK(history.empty());

    TrainingSchedule schedule;
    schedule.adam_epochs = 20;
    schedule.bfgs_epochs = 10;
    history.clear();
    optimize_two_stage(quadratic, x0, schedule, &history);
    CHECK(history.size() >= 21);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& e : history)
        if (e.stage == "bfgs") {
            CHECK(e.loss <= prev);
            prev = e.loss;
        }

    TrainingSchedule bad;
    bad.adam_lr0 = 0.0;
    CHECK_THROWS_AS(optimize_two_stage(quadratic, x0, bad, nullptr), SpecError);
}
