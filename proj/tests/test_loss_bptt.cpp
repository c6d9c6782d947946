#include "ldnet/loss.hpp"
#include "ldnet/rng.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace ldnet;

namespace {

LDNet small_model(Index d_s, Index d_u, Index d_x, Index d_y, std::uint64_t seed,
                  bool rec_uses_input, double dt = 0.1) {
    LDNetSpec spec;
    spec.n_latent = d_s;
    spec.dyn_hidden = {6};
    spec.rec_hidden = {5, 5};
    spec.dt = dt;
    spec.dt_ref = 0.7;
    spec.rec_uses_input = rec_uses_input;
    spec.seed = seed;
    Rng rng(seed ^ 0x77ULL);
    NormalizationSpec u_norm{rng.normal_vector(d_u), rng.uniform_vector(d_u, 0.5, 2.0)};
    NormalizationSpec x_norm{rng.normal_vector(d_x), rng.uniform_vector(d_x, 0.5, 2.0)};
    NormalizationSpec y_norm{rng.normal_vector(d_y), rng.uniform_vector(d_y, 0.5, 2.0)};
    return make_ldnet(spec, u_norm, x_norm, y_norm);
}

Dataset random_dataset(const LDNet& model, Index n_samples, Index n_times, Index n_points,
                       std::uint64_t seed, bool off_grid_times = false) {
    Dataset dataset;
    dataset.d_u = model.input_dim();
    dataset.d_x = model.space_dim();
    dataset.d_y = model.output_dim();
    dataset.y_norm = 1.0;
    dataset.u_normalization = model.u_norm;
    dataset.x_normalization = model.x_norm;
    dataset.y_normalization = model.y_norm;
    Rng rng(seed);
    const double T = 1.0;
    for (Index i = 0; i < n_samples; ++i) {
        Sample s;
        const Index n_knots = 6;
        s.input.times.resize(n_knots);
        s.input.values.resize(n_knots, dataset.d_u);
        for (Index k = 0; k < n_knots; ++k) {
            s.input.times[k] = T * static_cast<double>(k) / static_cast<double>(n_knots - 1);
            s.input.values.row(k) = rng.normal_vector(dataset.d_u).transpose();
        }
        s.obs_times.resize(n_times);
        for (Index j = 0; j < n_times; ++j) {
            const double grid = T * static_cast<double>(j + 1) / static_cast<double>(n_times);
            s.obs_times[j] = off_grid_times ? grid * (0.93 + 0.05 * rng.uniform()) : grid;
        }
        std::sort(s.obs_times.data(), s.obs_times.data() + n_times);
        for (Index j = 0; j < n_times; ++j) {
            Matrix pts(dataset.d_x, n_points);
            Matrix out(dataset.d_y, n_points);
            for (Index p = 0; p < n_points; ++p) {
                pts.col(p) = rng.normal_vector(dataset.d_x);
                out.col(p) = rng.normal_vector(dataset.d_y);
            }
            s.points.push_back(std::move(pts));
            s.outputs.push_back(std::move(out));
        }
        dataset.samples.push_back(std::move(s));
    }
    return dataset;
}

Vector pack(const LDNet& model) {
    Vector theta(model.parameter_count());
    theta.head(model.dyn.parameter_count()) = flatten(model.dyn);
    theta.tail(model.rec.parameter_count()) = flatten(model.rec);
    return theta;
}

void unpack(LDNet& model, const Vector& theta) {
    set_parameters(model.dyn, theta.head(model.dyn.parameter_count()));
    set_parameters(model.rec, theta.tail(model.rec.parameter_count()));
}

}  // namespace

TEST_CASE("discrepancy metrics: closed forms and singular guard") {
    Vector a = (Vector(2) << 1.0, 2.0).finished();
    CHECK(discrepancy_quadratic(a, a, 2.0) == 0.0);

    Vector pred = (Vector(2) << 3.0, 4.0).finished();
    CHECK(discrepancy_quadratic(pred, Vector::Zero(2), 5.0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(discrepancy_quadratic(pred, Vector::Zero(2), 0.0), SpecError);
    CHECK_THROWS_AS(discrepancy_quadratic(pred, Vector::Zero(3), 1.0), ShapeError);

    CHECK(discrepancy_goal_oriented(a, a, 1.0, 0.1, 1e-4) == 0.0);
    CHECK(discrepancy_goal_oriented(Vector::Zero(2), Vector::Zero(2), 1.0, 0.1, 1e-4) == 0.0);

    // Direct evaluation of the two terms.
    Vector ref = (Vector(2) << 1.0, 0.0).finished();
    Vector two = (Vector(2) << 2.0, 0.0).finished();
    const double gamma = 1e-1, eps = 1e-4;
    const double dir_diff = 1.0 / (eps + 1.0) - 2.0 / (eps + 2.0);
    const double expected = 1.0 + gamma * dir_diff * dir_diff;
    CHECK(discrepancy_goal_oriented(two, ref, 1.0, gamma, eps) ==
          doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("total loss: perfect predictions, regularization, nested averages") {
    LDNet model = small_model(2, 2, 1, 1, 5, false);
    model.dyn = make_zero_network(model.dyn.layer_sizes);
    model.rec = make_zero_network(model.rec.layer_sizes);

    Dataset dataset = random_dataset(model, 3, 4, 5, 17);
    for (Sample& s : dataset.samples)
        for (Matrix& out : s.outputs)
            out.colwise() = model.y_norm.center;  // equals the zero-net prediction

    LossSpec spec;
    spec.metric = QuadraticMetric{1.0};
    CHECK(total_loss(model, dataset, spec) == 0.0);

    spec.alpha_dyn = 0.3;
    spec.alpha_rec = 0.7;
    const double reg = 0.3 * weight_mean_square(model.dyn) + 0.7 * weight_mean_square(model.rec);
    CHECK(total_loss(model, dataset, spec) == doctest::Approx(reg).epsilon(1e-15));

    // Data term and gradient vanish at the perfect fit; the regularizer
    // gradient is the plain quadratic one, zero on biases.
    LDNet rnd = small_model(2, 2, 1, 1, 6, false);
    Dataset perfect = random_dataset(rnd, 2, 3, 4, 23);
    for (Index i = 0; i < perfect.n_samples(); ++i) {
        Sample& s = perfect.samples[static_cast<std::size_t>(i)];
        auto pred = predict(rnd, s.input, s.obs_times, s.points);
        for (std::size_t j = 0; j < pred.size(); ++j) s.outputs[j] = pred[j];
    }
    LossSpec reg_spec;
    reg_spec.metric = QuadraticMetric{1.0};
    reg_spec.alpha_dyn = 0.11;
    reg_spec.alpha_rec = 0.19;
    BpttResult r = bptt_gradient(rnd, perfect, reg_spec);
    Vector expected_dyn = Vector::Zero(rnd.dyn.parameter_count());
    add_weight_mean_square_gradient(rnd.dyn, 0.11, expected_dyn);
    Vector expected_rec = Vector::Zero(rnd.rec.parameter_count());
    add_weight_mean_square_gradient(rnd.rec, 0.19, expected_rec);
    CHECK((r.grad_dyn - expected_dyn).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK((r.grad_rec - expected_rec).lpNorm<Eigen::Infinity>() <= 1e-12);

    CHECK_THROWS_AS(total_loss(model, Dataset{}, spec), DataError);
}

TEST_CASE("total loss: unequal point counts use per-time means, not pooling") {
    LDNet model = small_model(1, 1, 1, 1, 7, false);
    Dataset dataset = random_dataset(model, 1, 2, 2, 31);
    // Second time gets 4 points instead of 2.
    Sample& s = dataset.samples[0];
    Rng rng(32);
    Matrix pts(1, 4), out(1, 4);
    for (Index p = 0; p < 4; ++p) {
        pts.col(p) = rng.normal_vector(1);
        out.col(p) = rng.normal_vector(1);
    }
    s.points[1] = pts;
    s.outputs[1] = out;

    LossSpec spec;
    spec.metric = QuadraticMetric{1.3};

    // Hand-expanded nested average.
    auto fields = predict(model, s.input, s.obs_times, s.points);
    double expected = 0.0;
    for (int j = 0; j < 2; ++j) {
        double time_sum = 0.0;
        for (Index p = 0; p < s.points[static_cast<std::size_t>(j)].cols(); ++p)
            time_sum += (fields[static_cast<std::size_t>(j)].col(p) -
                         s.outputs[static_cast<std::size_t>(j)].col(p))
                            .squaredNorm() /
                        (1.3 * 1.3);
        expected += time_sum / static_cast<double>(s.points[static_cast<std::size_t>(j)].cols());
    }
    expected /= 2.0;
    CHECK(total_loss(model, dataset, spec) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("total loss is invariant under sample/time/point permutations") {
    LDNet model = small_model(2, 2, 1, 2, 8, true);
    Dataset dataset = random_dataset(model, 3, 4, 5, 41);
    LossSpec spec;
    spec.metric = QuadraticMetric{0.8};
    const double base = total_loss(model, dataset, spec);

    Dataset shuffled = dataset;
    std::swap(shuffled.samples[0], shuffled.samples[2]);
    CHECK(total_loss(model, shuffled, spec) == doctest::Approx(base).epsilon(1e-13));

    // Permute (time, block) tuples within a sample; the loss never depends on
    // the order in which observation times are listed.
    Dataset times_permuted = dataset;
    {
        Sample& s = times_permuted.samples[1];
        s.obs_times.reverseInPlace();
        std::reverse(s.points.begin(), s.points.end());
        std::reverse(s.outputs.begin(), s.outputs.end());
    }
    CHECK(total_loss(model, times_permuted, spec) == doctest::Approx(base).epsilon(1e-13));

    Dataset points_permuted = dataset;
    for (Sample& s : points_permuted.samples)
        for (std::size_t j = 0; j < s.points.size(); ++j) {
            s.points[j].col(0).swap(s.points[j].col(s.points[j].cols() - 1));
            s.outputs[j].col(0).swap(s.outputs[j].col(s.outputs[j].cols() - 1));
        }
    CHECK(total_loss(model, points_permuted, spec) == doctest::Approx(base).epsilon(1e-13));
}

TEST_CASE("bptt gradient matches finite differences across model variants") {
    struct Variant {
        Index d_s, d_u, d_x, d_y;
        bool rec_uses_input;
        bool equilibrium;
        bool dirichlet;
        bool goal_oriented;
        bool off_grid;
        double alpha;
    };
    const Variant variants[] = {
        {2, 2, 1, 1, false, false, false, false, false, 0.0},
        {1, 1, 1, 1, true, false, false, false, true, 0.0},
        {3, 2, 2, 2, false, true, false, false, false, 1e-2},
        {2, 1, 1, 1, true, false, true, false, true, 0.0},
        {2, 2, 2, 2, false, false, false, true, false, 1e-3},
        {4, 3, 1, 2, true, true, false, true, true, 1e-4},
    };

    std::uint64_t seed = 100;
    for (const Variant& v : variants) {
        LDNet model = small_model(v.d_s, v.d_u, v.d_x, v.d_y, ++seed, v.rec_uses_input);
        if (v.equilibrium) {
            Rng rng(seed ^ 0x5555ULL);
            model.equilibrium_input = rng.normal_vector(v.d_u);
        }
        if (v.dirichlet)
            model.dirichlet = DirichletCondition{
                [dy = v.d_y](const Vector& x) { return Vector::Constant(dy, 0.3 * x[0]); },
                [](const Vector& x) { return std::sin(x[0]); },
            };
        Dataset dataset = random_dataset(model, 3, 4, 3, seed ^ 0x999ULL, v.off_grid);
        LossSpec spec;
        if (v.goal_oriented)
            spec.metric = GoalOrientedMetric{0.9, 1e-1, 1e-4};
        else
            spec.metric = QuadraticMetric{1.1};
        spec.alpha_dyn = v.alpha;
        spec.alpha_rec = 0.5 * v.alpha;

        BpttResult r = bptt_gradient(model, dataset, spec);
        Vector analytic(model.parameter_count());
        analytic.head(r.grad_dyn.size()) = r.grad_dyn;
        analytic.tail(r.grad_rec.size()) = r.grad_rec;

        LDNet probe = model;
        auto objective = [&](const Vector& theta) {
            unpack(probe, theta);
            return total_loss(probe, dataset, spec);
        };
        Vector fd = testing::central_difference(objective, pack(model));
        CHECK(testing::max_relative_error(fd, analytic) <= 1e-5);
    }
}

TEST_CASE("bptt loss value agrees with total_loss") {
    LDNet model = small_model(2, 2, 1, 1, 300, false);
    Dataset dataset = random_dataset(model, 2, 5, 4, 301);
    LossSpec spec;
    spec.metric = QuadraticMetric{1.0};
    spec.alpha_dyn = 1e-3;
    spec.alpha_rec = 1e-3;
    BpttResult r = bptt_gradient(model, dataset, spec);
    CHECK(r.loss == doctest::Approx(total_loss(model, dataset, spec)).epsilon(1e-15));
}
