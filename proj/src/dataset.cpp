#include "ldnet/dataset.hpp"

#include "ldnet/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>

namespace ldnet {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_doubles(std::ofstream& out, const double* data, std::size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
}

std::vector<double> read_doubles(const fs::path& file, std::size_t expected) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError("cannot open " + file.string());
    std::vector<double> data(expected);
    in.read(reinterpret_cast<char*>(data.data()),
            static_cast<std::streamsize>(expected * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != expected * sizeof(double))
        throw DataError(file.string() + " is shorter than the declared shape");
    char probe;
    if (in.read(&probe, 1)) throw DataError(file.string() + " is longer than the declared shape");
    return data;
}

ordered_json vector_to_json(const Vector& v) {
    ordered_json arr = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Vector json_to_vector(const ordered_json& arr) {
    Vector v(static_cast<Index>(arr.size()));
    for (Index i = 0; i < v.size(); ++i) v[i] = arr[static_cast<std::size_t>(i)].get<double>();
    return v;
}

}  // namespace

void validate(const Dataset& dataset) {
    if (dataset.samples.empty()) throw DataError("dataset has no samples");
    if (dataset.d_u <= 0 || dataset.d_x <= 0 || dataset.d_y <= 0)
        throw DataError("dataset dimensions must be positive");
    if (dataset.y_norm <= 0.0) throw DataError("dataset y_norm must be positive");
    validate(dataset.u_normalization);
    validate(dataset.x_normalization);
    validate(dataset.y_normalization);
    if (dataset.u_normalization.dim() != dataset.d_u ||
        dataset.x_normalization.dim() != dataset.d_x ||
        dataset.y_normalization.dim() != dataset.d_y)
        throw DataError("normalization dimensions do not match dataset dimensions");
    for (const Sample& s : dataset.samples) {
        validate(s.input);
        if (s.input.dim() != dataset.d_u) throw DataError("sample input dimension mismatch");
        const Index n_times = s.obs_times.size();
        if (n_times == 0) throw DataError("sample has no observation times");
        if (s.points.size() != static_cast<std::size_t>(n_times) ||
            s.outputs.size() != static_cast<std::size_t>(n_times))
            throw DataError("sample observation sets are misaligned");
        for (Index j = 1; j < n_times; ++j)
            if (s.obs_times[j] <= s.obs_times[j - 1])
                throw DataError("observation times must be strictly increasing");
        const Index n_pts = s.points.front().cols();
        for (Index j = 0; j < n_times; ++j) {
            const Matrix& pts = s.points[static_cast<std::size_t>(j)];
            const Matrix& out = s.outputs[static_cast<std::size_t>(j)];
            if (pts.rows() != dataset.d_x || out.rows() != dataset.d_y)
                throw DataError("observation dimensions do not match dataset dimensions");
            if (pts.cols() != n_pts || out.cols() != n_pts)
                throw DataError("point count must be constant across times within a sample");
            if (!pts.allFinite() || !out.allFinite())
                throw DataError("dataset contains nonfinite values");
        }
        if (!s.input.values.allFinite()) throw DataError("dataset contains nonfinite values");
    }
}

bool has_shared_grid(const Dataset& dataset) {
    if (dataset.samples.empty()) return false;
    const Matrix& ref = dataset.samples.front().points.front();
    for (const Sample& s : dataset.samples)
        for (const Matrix& pts : s.points)
            if (pts.rows() != ref.rows() || pts.cols() != ref.cols() || pts != ref) return false;
    return true;
}

Matrix stack_shared_grid_outputs(const Dataset& dataset) {
    if (!has_shared_grid(dataset))
        throw DataError("operation requires one shared spatial grid across samples and times");
    const Index n_times = dataset.samples.front().obs_times.size();
    for (const Sample& s : dataset.samples)
        if (s.obs_times.size() != n_times)
            throw DataError("operation requires a shared number of observation times");
    const Index n_h = dataset.samples.front().points.front().cols() * dataset.d_y;
    Matrix stacked(n_h, dataset.n_samples() * n_times);
    for (Index i = 0; i < dataset.n_samples(); ++i)
        for (Index j = 0; j < n_times; ++j)
            stacked.col(i * n_times + j) =
                dataset.samples[static_cast<std::size_t>(i)].outputs[static_cast<std::size_t>(j)]
                    .reshaped();
    return stacked;
}

Dataset thin_points(const Dataset& dataset, Index n_keep, std::uint64_t seed) {
    if (n_keep < 1) throw SpecError("must keep at least one point per time");
    Dataset out = dataset;
    for (Index i = 0; i < out.n_samples(); ++i) {
        Sample& s = out.samples[static_cast<std::size_t>(i)];
        Rng rng = Rng::derive(seed, "thin-points", static_cast<std::uint64_t>(i));
        for (std::size_t j = 0; j < s.points.size(); ++j) {
            const Index n = s.points[j].cols();
            if (n_keep >= n) continue;
            std::vector<Index> idx(static_cast<std::size_t>(n));
            for (Index p = 0; p < n; ++p) idx[static_cast<std::size_t>(p)] = p;
            for (Index p = 0; p < n_keep; ++p) {
                Index r = p + static_cast<Index>(rng.next_u64() % static_cast<std::uint64_t>(n - p));
                std::swap(idx[static_cast<std::size_t>(p)], idx[static_cast<std::size_t>(r)]);
            }
            Matrix pts(dataset.d_x, n_keep), vals(dataset.d_y, n_keep);
            for (Index p = 0; p < n_keep; ++p) {
                pts.col(p) = s.points[j].col(idx[static_cast<std::size_t>(p)]);
                vals.col(p) = s.outputs[j].col(idx[static_cast<std::size_t>(p)]);
            }
            s.points[j] = std::move(pts);
            s.outputs[j] = std::move(vals);
        }
    }
    return out;
}

Dataset thin_times(const Dataset& dataset, Index stride) {
    if (stride < 1) throw SpecError("time stride must be at least 1");
    Dataset out = dataset;
    for (Sample& s : out.samples) {
        std::vector<Index> keep;
        for (Index j = 0; j < s.obs_times.size(); ++j)
            if ((j + 1) % stride == 0 || j + 1 == s.obs_times.size()) keep.push_back(j);
        Vector times(static_cast<Index>(keep.size()));
        std::vector<Matrix> pts, vals;
        for (std::size_t j = 0; j < keep.size(); ++j) {
            times[static_cast<Index>(j)] = s.obs_times[keep[j]];
            pts.push_back(s.points[static_cast<std::size_t>(keep[j])]);
            vals.push_back(s.outputs[static_cast<std::size_t>(keep[j])]);
        }
        s.obs_times = std::move(times);
        s.points = std::move(pts);
        s.outputs = std::move(vals);
    }
    return out;
}

void write_dataset(const Dataset& dataset, const fs::path& dir) {
    validate(dataset);
    fs::create_directories(dir);

    ordered_json manifest;
    manifest["format"] = "ldnet-dataset-v1";
    manifest["case"] = dataset.case_id;
    manifest["seed"] = dataset.seed;
    manifest["n_samples"] = dataset.n_samples();
    manifest["d_u"] = dataset.d_u;
    manifest["d_x"] = dataset.d_x;
    manifest["d_y"] = dataset.d_y;
    manifest["y_norm"] = dataset.y_norm;
    manifest["u_center"] = vector_to_json(dataset.u_normalization.center);
    manifest["u_half_width"] = vector_to_json(dataset.u_normalization.half_width);
    manifest["x_center"] = vector_to_json(dataset.x_normalization.center);
    manifest["x_half_width"] = vector_to_json(dataset.x_normalization.half_width);
    manifest["y_center"] = vector_to_json(dataset.y_normalization.center);
    manifest["y_half_width"] = vector_to_json(dataset.y_normalization.half_width);
    manifest["generator"] = dataset.generator_json.empty()
                                ? ordered_json::object()
                                : ordered_json::parse(dataset.generator_json);

    ordered_json samples = ordered_json::array();
    for (const Sample& s : dataset.samples) {
        ordered_json rec;
        rec["input_times"] = vector_to_json(s.input.times);
        rec["obs_times"] = vector_to_json(s.obs_times);
        rec["n_points"] = s.points.front().cols();
        samples.push_back(std::move(rec));
    }
    manifest["samples"] = std::move(samples);

    {
        std::ofstream out(dir / "manifest.json");
        if (!out) throw DataError("cannot write " + (dir / "manifest.json").string());
        out << manifest.dump(2) << "\n";
    }

    for (Index i = 0; i < dataset.n_samples(); ++i) {
        const Sample& s = dataset.samples[static_cast<std::size_t>(i)];
        const std::string tag = std::to_string(i);
        {
            std::ofstream out(dir / ("u_" + tag + ".bin"), std::ios::binary);
            // row-major (n_times x d_u)
            for (Index r = 0; r < s.input.values.rows(); ++r)
                for (Index c = 0; c < s.input.values.cols(); ++c) {
                    const double v = s.input.values(r, c);
                    write_doubles(out, &v, 1);
                }
        }
        std::ofstream yout(dir / ("y_" + tag + ".bin"), std::ios::binary);
        std::ofstream xout(dir / ("x_" + tag + ".bin"), std::ios::binary);
        for (std::size_t j = 0; j < s.points.size(); ++j) {
            // row-major (n_times x n_points x d): points vary fastest by component
            for (Index p = 0; p < s.points[j].cols(); ++p) {
                write_doubles(yout, s.outputs[j].col(p).data(),
                              static_cast<std::size_t>(dataset.d_y));
                write_doubles(xout, s.points[j].col(p).data(),
                              static_cast<std::size_t>(dataset.d_x));
            }
        }
    }
}

Dataset read_dataset(const fs::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw DataError("cannot open " + (dir / "manifest.json").string());
    ordered_json manifest;
    try {
        in >> manifest;
    } catch (const std::exception& e) {
        throw DataError("malformed manifest: " + std::string(e.what()));
    }
    if (manifest.value("format", "") != "ldnet-dataset-v1")
        throw DataError("unknown dataset format");

    Dataset dataset;
    dataset.case_id = manifest.at("case").get<std::string>();
    dataset.seed = manifest.at("seed").get<std::uint64_t>();
    dataset.d_u = manifest.at("d_u").get<Index>();
    dataset.d_x = manifest.at("d_x").get<Index>();
    dataset.d_y = manifest.at("d_y").get<Index>();
    dataset.y_norm = manifest.at("y_norm").get<double>();
    dataset.u_normalization = {json_to_vector(manifest.at("u_center")),
                               json_to_vector(manifest.at("u_half_width"))};
    dataset.x_normalization = {json_to_vector(manifest.at("x_center")),
                               json_to_vector(manifest.at("x_half_width"))};
    dataset.y_normalization = {json_to_vector(manifest.at("y_center")),
                               json_to_vector(manifest.at("y_half_width"))};
    dataset.generator_json = manifest.at("generator").dump();

    const Index n_samples = manifest.at("n_samples").get<Index>();
    const auto& sample_records = manifest.at("samples");
    if (static_cast<Index>(sample_records.size()) != n_samples)
        throw DataError("manifest sample records disagree with n_samples");

    for (Index i = 0; i < n_samples; ++i) {
        const auto& rec = sample_records[static_cast<std::size_t>(i)];
        Sample s;
        s.input.times = json_to_vector(rec.at("input_times"));
        s.obs_times = json_to_vector(rec.at("obs_times"));
        const Index n_pts = rec.at("n_points").get<Index>();
        const Index n_in = s.input.times.size();
        const Index n_times = s.obs_times.size();
        const std::string tag = std::to_string(i);

        std::vector<double> u = read_doubles(dir / ("u_" + tag + ".bin"),
                                             static_cast<std::size_t>(n_in * dataset.d_u));
        s.input.values.resize(n_in, dataset.d_u);
        for (Index r = 0; r < n_in; ++r)
            for (Index c = 0; c < dataset.d_u; ++c)
                s.input.values(r, c) = u[static_cast<std::size_t>(r * dataset.d_u + c)];

        std::vector<double> y = read_doubles(
            dir / ("y_" + tag + ".bin"), static_cast<std::size_t>(n_times * n_pts * dataset.d_y));
        std::vector<double> x = read_doubles(
            dir / ("x_" + tag + ".bin"), static_cast<std::size_t>(n_times * n_pts * dataset.d_x));
        for (Index j = 0; j < n_times; ++j) {
            Matrix pts(dataset.d_x, n_pts), vals(dataset.d_y, n_pts);
            for (Index p = 0; p < n_pts; ++p) {
                for (Index c = 0; c < dataset.d_x; ++c)
                    pts(c, p) = x[static_cast<std::size_t>((j * n_pts + p) * dataset.d_x + c)];
                for (Index c = 0; c < dataset.d_y; ++c)
                    vals(c, p) = y[static_cast<std::size_t>((j * n_pts + p) * dataset.d_y + c)];
            }
            s.points.push_back(std::move(pts));
            s.outputs.push_back(std::move(vals));
        }
        dataset.samples.push_back(std::move(s));
    }
    validate(dataset);
    return dataset;
}

}  // namespace ldnet
