#include "ldnet/metrics.hpp"
#include "ldnet/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace ldnet;

namespace {

FieldSet random_fields(Index n_samples, Index n_times, Index n_points, Index d_y,
                       std::uint64_t seed) {
    Rng rng(seed);
    FieldSet set;
    for (Index i = 0; i < n_samples; ++i) {
        FieldSeries series;
        for (Index j = 0; j < n_times; ++j) {
            Matrix f(d_y, n_points);
            for (Index p = 0; p < n_points; ++p) f.col(p) = rng.normal_vector(d_y);
            series.push_back(std::move(f));
        }
        set.push_back(std::move(series));
    }
    return set;
}

FieldSet affine(const FieldSet& fields, double a, double b) {
    FieldSet out = fields;
    for (auto& series : out)
        for (auto& f : series) f = (a * f.array() + b).matrix();
    return out;
}

}  // namespace

TEST_CASE("nrmse: identity, constant offset, loop oracle") {
    FieldSet ref = random_fields(3, 4, 5, 1, 1);
    CHECK(nrmse(ref, ref, 2.0) == 0.0);

    const double delta = 0.37;
    CHECK(nrmse(affine(ref, 1.0, delta), ref, 1.0) == doctest::Approx(delta).epsilon(1e-12));

    // Flat loop honoring the nested-average order.
    FieldSet pred = random_fields(3, 4, 5, 2, 2);
    FieldSet target = random_fields(3, 4, 5, 2, 3);
    const double y_norm = 1.7;
    double acc_samples = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        double acc_times = 0.0;
        for (std::size_t j = 0; j < pred[i].size(); ++j) {
            double acc_points = 0.0;
            for (Index p = 0; p < pred[i][j].cols(); ++p)
                acc_points += (pred[i][j].col(p) - target[i][j].col(p)).squaredNorm();
            acc_times += acc_points / static_cast<double>(pred[i][j].cols());
        }
        acc_samples += acc_times / static_cast<double>(pred[i].size());
    }
    const double expected =
        std::sqrt(acc_samples / static_cast<double>(pred.size()) / (y_norm * y_norm));
    CHECK(nrmse(pred, target, y_norm) == doctest::Approx(expected).epsilon(1e-12));

    CHECK(nrmse(pred, target, y_norm) == nrmse(target, pred, y_norm));
    CHECK_THROWS_AS(nrmse(pred, target, 0.0), SpecError);
    CHECK_THROWS_AS(nrmse(pred, random_fields(2, 4, 5, 2, 4), y_norm), DataError);
}

TEST_CASE("nrmse scales linearly with a common error factor") {
    FieldSet ref = random_fields(2, 3, 6, 1, 5);
    FieldSet pred = random_fields(2, 3, 6, 1, 6);
    const double base = nrmse(pred, ref, 1.0);
    // Scale the error field by 3: pred' = ref + 3 (pred - ref).
    FieldSet scaled = ref;
    for (std::size_t i = 0; i < ref.size(); ++i)
        for (std::size_t j = 0; j < ref[i].size(); ++j)
            scaled[i][j] = ref[i][j] + 3.0 * (pred[i][j] - ref[i][j]);
    CHECK(nrmse(scaled, ref, 1.0) == doctest::Approx(3.0 * base).epsilon(1e-12));
}

TEST_CASE("pearson dissimilarity: identity, affine invariance, anti-correlation") {
    FieldSet ref = random_fields(2, 5, 4, 1, 7);
    CHECK(pearson_dissimilarity(ref, ref) == doctest::Approx(0.0).epsilon(1e-14));

    CHECK(pearson_dissimilarity(affine(ref, 2.5, -0.8), ref) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // Centered sign flip gives rho = -1.
    Vector mean = Vector::Zero(1);
    Index count = 0;
    for (const auto& series : ref)
        for (const auto& f : series) {
            mean += f.rowwise().sum();
            count += f.cols();
        }
    mean /= static_cast<double>(count);
    FieldSet flipped = ref;
    for (auto& series : flipped)
        for (auto& f : series) f = (2.0 * mean[0] - f.array()).matrix();
    CHECK(pearson_dissimilarity(flipped, ref) == doctest::Approx(2.0).epsilon(1e-12));

    FieldSet constant = affine(ref, 0.0, 1.0);
    CHECK_THROWS_AS(pearson_dissimilarity(constant, ref), NumericsError);
}

TEST_CASE("permutation invariance over samples") {
    FieldSet pred = random_fields(3, 2, 4, 1, 8);
    FieldSet ref = random_fields(3, 2, 4, 1, 9);
    FieldSet pred_p = {pred[2], pred[0], pred[1]};
    FieldSet ref_p = {ref[2], ref[0], ref[1]};
    CHECK(nrmse(pred_p, ref_p, 1.0) == doctest::Approx(nrmse(pred, ref, 1.0)).epsilon(1e-14));
    CHECK(pearson_dissimilarity(pred_p, ref_p) ==
          doctest::Approx(pearson_dissimilarity(pred, ref)).epsilon(1e-13));
}

TEST_CASE("evaluation report carries counts and per-sample breakdown") {
    FieldSet pred = random_fields(3, 4, 5, 1, 10);
    FieldSet ref = random_fields(3, 4, 5, 1, 11);
    EvaluationReport report = evaluate(pred, ref, 1.5);
    CHECK(report.n_samples == 3);
    CHECK(report.n_times == 12);
    CHECK(report.n_points == 60);
    CHECK(report.per_sample_nrmse.size() == 3);
    double acc = 0.0;
    for (double v : report.per_sample_nrmse) acc += v * v;
    CHECK(report.nrmse == doctest::Approx(std::sqrt(acc / 3.0)).epsilon(1e-12));
}
