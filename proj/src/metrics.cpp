#include "ldnet/metrics.hpp"

#include <cmath>

namespace ldnet {

namespace {

void check_alignment(const FieldSet& a, const FieldSet& b) {
    if (a.size() != b.size()) throw DataError("prediction and reference sample counts differ");
    if (a.empty()) throw DataError("empty evaluation sets");
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size())
            throw DataError("prediction and reference time counts differ");
        if (a[i].empty()) throw DataError("sample has no observation times");
        for (std::size_t j = 0; j < a[i].size(); ++j) {
            if (a[i][j].rows() != b[i][j].rows() || a[i][j].cols() != b[i][j].cols())
                throw DataError("prediction and reference shapes differ");
            if (a[i][j].cols() == 0) throw DataError("empty observation point set");
        }
    }
}

// Average over samples of average over times of average over points.
Vector nested_mean_vector(const FieldSet& fields) {
    Vector mean = Vector::Zero(fields.front().front().rows());
    for (const FieldSeries& series : fields) {
        Vector acc_times = Vector::Zero(mean.size());
        for (const Matrix& block : series)
            acc_times += block.rowwise().sum() / static_cast<double>(block.cols());
        mean += acc_times / static_cast<double>(series.size());
    }
    return mean / static_cast<double>(fields.size());
}

}  // namespace

double nrmse(const FieldSet& predictions, const FieldSet& references, double y_norm) {
    check_alignment(predictions, references);
    if (y_norm <= 0.0) throw SpecError("y_norm must be positive");
    double acc_samples = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double acc_times = 0.0;
        for (std::size_t j = 0; j < predictions[i].size(); ++j) {
            const Matrix& p = predictions[i][j];
            const Matrix& r = references[i][j];
            acc_times += (p - r).squaredNorm() / static_cast<double>(p.cols());
        }
        acc_samples += acc_times / static_cast<double>(predictions[i].size());
    }
    const double mean_sq =
        acc_samples / static_cast<double>(predictions.size()) / (y_norm * y_norm);
    return std::sqrt(mean_sq);
}

double pearson_dissimilarity(const FieldSet& predictions, const FieldSet& references) {
    check_alignment(predictions, references);
    Index total_points = 0;
    for (const FieldSeries& series : predictions)
        for (const Matrix& block : series) total_points += block.cols();
    if (total_points < 2) throw DataError("correlation needs at least two observations");

    const Vector pred_mean = nested_mean_vector(predictions);
    const Vector ref_mean = nested_mean_vector(references);

    double cross = 0.0, pred_sq = 0.0, ref_sq = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        for (std::size_t j = 0; j < predictions[i].size(); ++j) {
            const Matrix p = predictions[i][j].colwise() - pred_mean;
            const Matrix r = references[i][j].colwise() - ref_mean;
            cross += p.cwiseProduct(r).sum();
            pred_sq += p.squaredNorm();
            ref_sq += r.squaredNorm();
        }
    }
    if (pred_sq <= 0.0 || ref_sq <= 0.0)
        throw NumericsError("correlation undefined: a field has zero variance");
    return 1.0 - cross / std::sqrt(pred_sq * ref_sq);
}

EvaluationReport evaluate(const FieldSet& predictions, const FieldSet& references,
                          double y_norm) {
    check_alignment(predictions, references);
    EvaluationReport report;
    report.nrmse = nrmse(predictions, references, y_norm);
    report.pearson_dissimilarity = pearson_dissimilarity(predictions, references);
    report.n_samples = static_cast<Index>(predictions.size());
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        double acc_times = 0.0;
        for (std::size_t j = 0; j < predictions[i].size(); ++j) {
            const Matrix& p = predictions[i][j];
            acc_times += (p - references[i][j]).squaredNorm() / static_cast<double>(p.cols());
            report.n_points += p.cols();
        }
        report.n_times += static_cast<Index>(predictions[i].size());
        report.per_sample_nrmse.push_back(std::sqrt(
            acc_times / static_cast<double>(predictions[i].size()) / (y_norm * y_norm)));
    }
    return report;
}

}  // namespace ldnet
