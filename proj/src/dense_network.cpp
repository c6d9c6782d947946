#include "ldnet/dense_network.hpp"

#include "ldnet/rng.hpp"

#include <cmath>

namespace ldnet {

namespace {

using RowMajorMap =
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

void check_architecture(const std::vector<Index>& layer_sizes) {
    if (layer_sizes.size() < 2)
        throw ShapeError("network architecture needs at least input and output sizes");
    for (Index s : layer_sizes)
        if (s <= 0) throw ShapeError("network layer sizes must be positive");
}

void check_input_dim(const DenseNetwork& net, Index rows) {
    if (rows != net.input_dim())
        throw ShapeError("input dimension " + std::to_string(rows) + " does not match network input " +
                         std::to_string(net.input_dim()));
}

}  // namespace

Index DenseNetwork::parameter_count() const {
    Index n = 0;
    for (Index k = 0; k < num_layers(); ++k) n += weights[k].size() + biases[k].size();
    return n;
}

Index DenseNetwork::weight_count() const {
    Index n = 0;
    for (const Matrix& w : weights) n += w.size();
    return n;
}

DenseNetwork make_zero_network(const std::vector<Index>& layer_sizes) {
    check_architecture(layer_sizes);
    DenseNetwork net;
    net.layer_sizes = layer_sizes;
    for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
        net.weights.push_back(Matrix::Zero(layer_sizes[k + 1], layer_sizes[k]));
        net.biases.push_back(Vector::Zero(layer_sizes[k + 1]));
    }
    return net;
}

DenseNetwork init_glorot(const std::vector<Index>& layer_sizes, std::uint64_t seed) {
    DenseNetwork net = make_zero_network(layer_sizes);
    Rng rng = Rng::derive(seed, "glorot", 0);
    for (Index k = 0; k < net.num_layers(); ++k) {
        Matrix& w = net.weights[k];
        const double fan_in = static_cast<double>(w.cols());
        const double fan_out = static_cast<double>(w.rows());
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        // Row-major fill so the draw order matches the flat parameter order.
        for (Index r = 0; r < w.rows(); ++r)
            for (Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
    return net;
}

Vector flatten(const DenseNetwork& net) {
    Vector flat(net.parameter_count());
    Index pos = 0;
    for (Index k = 0; k < net.num_layers(); ++k) {
        const Matrix& w = net.weights[k];
        RowMajorMap(flat.data() + pos, w.rows(), w.cols()) = w;
        pos += w.size();
        flat.segment(pos, net.biases[k].size()) = net.biases[k];
        pos += net.biases[k].size();
    }
    return flat;
}

void set_parameters(DenseNetwork& net, const Vector& flat) {
    if (flat.size() != net.parameter_count())
        throw ShapeError("flat parameter vector has " + std::to_string(flat.size()) +
                         " entries, network needs " + std::to_string(net.parameter_count()));
    Index pos = 0;
    for (Index k = 0; k < net.num_layers(); ++k) {
        Matrix& w = net.weights[k];
        w = ConstRowMajorMap(flat.data() + pos, w.rows(), w.cols());
        pos += w.size();
        net.biases[k] = flat.segment(pos, net.biases[k].size());
        pos += net.biases[k].size();
    }
}

double weight_mean_square(const DenseNetwork& net) {
    double sum = 0.0;
    for (const Matrix& w : net.weights) sum += w.squaredNorm();
    return sum / static_cast<double>(net.weight_count());
}

void add_weight_mean_square_gradient(const DenseNetwork& net, double scale,
                                     Eigen::Ref<Vector> flat_grad) {
    const double factor = 2.0 * scale / static_cast<double>(net.weight_count());
    Index pos = 0;
    for (Index k = 0; k < net.num_layers(); ++k) {
        const Matrix& w = net.weights[k];
        RowMajorMap(flat_grad.data() + pos, w.rows(), w.cols()) += factor * w;
        pos += w.size() + net.biases[k].size();
    }
}

Matrix forward(const DenseNetwork& net, const Matrix& inputs) {
    check_input_dim(net, inputs.rows());
    Matrix a = inputs;
    for (Index k = 0; k < net.num_layers(); ++k) {
        Matrix z = (net.weights[k] * a).colwise() + net.biases[k];
        if (k + 1 < net.num_layers())
            a = z.array().tanh().matrix();
        else
            a = std::move(z);
    }
    return a;
}

Vector forward(const DenseNetwork& net, const Vector& input) {
    return forward(net, Matrix(input)).col(0);
}

Matrix forward(const DenseNetwork& net, const Matrix& inputs, ForwardTrace& trace) {
    check_input_dim(net, inputs.rows());
    trace.layer_values.clear();
    trace.layer_values.reserve(static_cast<std::size_t>(net.num_layers()));
    trace.layer_values.push_back(inputs);
    for (Index k = 0; k + 1 < net.num_layers(); ++k) {
        Matrix z = (net.weights[k] * trace.layer_values.back()).colwise() + net.biases[k];
        trace.layer_values.push_back(z.array().tanh().matrix());
    }
    return (net.weights[net.num_layers() - 1] * trace.layer_values.back()).colwise() +
           net.biases[net.num_layers() - 1];
}

Matrix vjp_backward(const DenseNetwork& net, const ForwardTrace& trace,
                    const Matrix& output_cotangents, Eigen::Ref<Vector> flat_grad) {
    if (output_cotangents.rows() != net.output_dim())
        throw ShapeError("cotangent dimension does not match network output");
    if (flat_grad.size() != net.parameter_count())
        throw ShapeError("gradient accumulator size does not match parameter count");

    // Offset of layer k inside the flat vector.
    std::vector<Index> offsets(static_cast<std::size_t>(net.num_layers()));
    Index pos = 0;
    for (Index k = 0; k < net.num_layers(); ++k) {
        offsets[static_cast<std::size_t>(k)] = pos;
        pos += net.weights[k].size() + net.biases[k].size();
    }

    Matrix delta = output_cotangents;  // cotangent of the pre-activation of layer k
    for (Index k = net.num_layers() - 1; k >= 0; --k) {
        const Matrix& a_prev = trace.layer_values[static_cast<std::size_t>(k)];
        const Matrix& w = net.weights[k];
        RowMajorMap(flat_grad.data() + offsets[static_cast<std::size_t>(k)], w.rows(), w.cols()) +=
            delta * a_prev.transpose();
        flat_grad.segment(offsets[static_cast<std::size_t>(k)] + w.size(), w.rows()) +=
            delta.rowwise().sum();
        if (k == 0) return w.transpose() * delta;
        delta = ((w.transpose() * delta).array() * (1.0 - a_prev.array().square())).matrix();
    }
    return {};  // unreachable
}

std::pair<Vector, Vector> vjp(const DenseNetwork& net, const Vector& input,
                              const Vector& cotangent) {
    ForwardTrace trace;
    forward(net, Matrix(input), trace);
    Vector grad = Vector::Zero(net.parameter_count());
    Matrix input_grad = vjp_backward(net, trace, Matrix(cotangent), grad);
    return {input_grad.col(0), std::move(grad)};
}

}  // namespace ldnet
