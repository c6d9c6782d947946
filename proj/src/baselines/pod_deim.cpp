#include "ldnet/baselines/pod_deim.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ldnet::baselines {

PODBasis compute_pod(const Matrix& snapshots, Index d_s) {
    if (snapshots.size() == 0) throw DataError("empty snapshot matrix");
    if (d_s < 1 || d_s > std::min(snapshots.rows(), snapshots.cols()))
        throw NumericsError("requested basis size exceeds the snapshot matrix rank bound");

    PODBasis pod;
    if (snapshots.cols() >= snapshots.rows()) {
        // Method of snapshots: eigenvectors of Z Z^T.
        Matrix gram = snapshots * snapshots.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
        if (eig.info() != Eigen::Success) throw NumericsError("eigendecomposition failed");
        const Index n = gram.rows();
        pod.singular_values.resize(n);
        pod.V.resize(n, d_s);
        for (Index k = 0; k < n; ++k)
            pod.singular_values[k] = std::sqrt(std::max(0.0, eig.eigenvalues()[n - 1 - k]));
        for (Index k = 0; k < d_s; ++k) pod.V.col(k) = eig.eigenvectors().col(n - 1 - k);
    } else {
        Eigen::BDCSVD<Matrix> svd(snapshots, Eigen::ComputeThinU);
        pod.singular_values = svd.singularValues();
        pod.V = svd.matrixU().leftCols(d_s);
    }
    return pod;
}

std::vector<Index> deim_indices(const Matrix& basis) {
    if (basis.size() == 0) throw DataError("empty basis");
    const Index m = basis.cols();
    std::vector<Index> indices;
    indices.reserve(static_cast<std::size_t>(m));

    Index first;
    basis.col(0).cwiseAbs().maxCoeff(&first);
    if (basis(first, 0) == 0.0) throw NumericsError("degenerate basis: first column is zero");
    indices.push_back(first);

    for (Index k = 1; k < m; ++k) {
        const Index kk = static_cast<Index>(indices.size());
        Matrix sub(kk, kk);
        Vector rhs(kk);
        for (Index r = 0; r < kk; ++r) {
            for (Index c = 0; c < kk; ++c) sub(r, c) = basis(indices[static_cast<std::size_t>(r)], c);
            rhs[r] = basis(indices[static_cast<std::size_t>(r)], k);
        }
        Eigen::PartialPivLU<Matrix> lu(sub);
        Vector coeff = lu.solve(rhs);
        Vector residual = basis.col(k) - basis.leftCols(kk) * coeff;
        Index next;
        const double max_res = residual.cwiseAbs().maxCoeff(&next);
        if (!(max_res > 0.0) || !std::isfinite(max_res))
            throw NumericsError("degenerate basis during greedy index selection");
        indices.push_back(next);
    }
    return indices;
}

DEIMOperator make_deim(const Matrix& basis) {
    DEIMOperator deim{basis, deim_indices(basis)};
    return deim;
}

namespace {

Matrix selected_rows(const Matrix& m, const std::vector<Index>& rows) {
    Matrix out(static_cast<Index>(rows.size()), m.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Index>(r)) = m.row(rows[r]);
    return out;
}

}  // namespace

Vector deim_approximate(const DEIMOperator& deim, const Vector& v) {
    if (v.size() != deim.basis.rows()) throw ShapeError("vector length does not match the basis");
    Matrix sub = selected_rows(deim.basis, deim.indices);
    Vector rhs(static_cast<Index>(deim.indices.size()));
    for (std::size_t r = 0; r < deim.indices.size(); ++r)
        rhs[static_cast<Index>(r)] = v[deim.indices[r]];
    return deim.basis * Eigen::PartialPivLU<Matrix>(sub).solve(rhs);
}

PodDeimResult pod_deim_simulate(const fom::APConfig& config, const Matrix& V,
                                const DEIMOperator& deim, const PodDeimOptions& options) {
    const Index nx = config.nx;
    if (V.rows() != 2 * nx) throw ShapeError("state basis rows must cover both fields");
    if (deim.basis.rows() != 2 * nx) throw ShapeError("nonlinearity basis rows must cover both fields");
    const Index d_s = V.cols();
    const Index m = deim.basis.cols();

    const double dx = config.L / static_cast<double>(nx - 1);
    const double dt = config.T / static_cast<double>(config.nt);
    const double d_over_dx2 = config.D / (dx * dx);
    const double inv_tau = 1.0 / config.tau;

    // Reduced diffusion operator: apply the mirrored-ghost Laplacian to the
    // z-block of each basis column.
    Matrix av = Matrix::Zero(2 * nx, d_s);
    for (Index c = 0; c < d_s; ++c) {
        auto zc = V.col(c).head(nx);
        av.col(c).segment(1, nx - 2) =
            d_over_dx2 * (zc.segment(2, nx - 2) - 2.0 * zc.segment(1, nx - 2) +
                          zc.segment(0, nx - 2));
        av(0, c) = d_over_dx2 * 2.0 * (zc[1] - zc[0]);
        av(nx - 1, c) = d_over_dx2 * 2.0 * (zc[nx - 2] - zc[nx - 1]);
    }
    const Matrix a_reduced = V.transpose() * av;

    // DEIM projection: V^T U (P^T U)^{-1}.
    const Matrix sub = selected_rows(deim.basis, deim.indices);
    const Matrix w_deim =
        (V.transpose() * deim.basis) * Eigen::PartialPivLU<Matrix>(sub).inverse();

    // Stimulus injection matrix (one column per site, two nodes each).
    const std::vector<Index> site_nodes[2] = {fom::ap_stimulus_nodes(config, 0),
                                              fom::ap_stimulus_nodes(config, 1)};
    Matrix b_reduced = Matrix::Zero(d_s, 2);
    if (!options.stimulus_in_deim) {
        for (int site = 0; site < 2; ++site)
            for (Index node : site_nodes[site]) b_reduced.col(site) += V.row(node).transpose();
    }

    // Rows of V needed to evaluate the reaction terms at the selected indices.
    Matrix vz_sel(m, d_s), vw_sel(m, d_s);
    std::vector<bool> is_w_row(static_cast<std::size_t>(m));
    std::vector<double> stim_gain(static_cast<std::size_t>(m), 0.0);
    std::vector<int> stim_site(static_cast<std::size_t>(m), -1);
    for (Index r = 0; r < m; ++r) {
        const Index idx = deim.indices[static_cast<std::size_t>(r)];
        const bool w_row = idx >= nx;
        const Index node = w_row ? idx - nx : idx;
        is_w_row[static_cast<std::size_t>(r)] = w_row;
        vz_sel.row(r) = V.row(node);
        vw_sel.row(r) = V.row(nx + node);
        if (options.stimulus_in_deim && !w_row)
            for (int site = 0; site < 2; ++site)
                for (Index sn : site_nodes[site])
                    if (sn == node) {
                        stim_gain[static_cast<std::size_t>(r)] = 1.0;
                        stim_site[static_cast<std::size_t>(r)] = site;
                    }
    }

    const long capture_stride = config.nt / static_cast<long>(config.n_obs_times);
    const int space_stride = nx / config.n_obs_space;

    PodDeimResult result;
    result.reduced_states.resize(d_s, config.n_obs_times);
    result.z.resize(config.n_obs_space, config.n_obs_times);

    Vector s = Vector::Zero(d_s);  // V^T Z0 with zero initial conditions
    Vector f_sel(m);
    long next_capture = capture_stride;
    int capture_idx = 0;

    for (long step = 0; step < config.nt; ++step) {
        const double t = static_cast<double>(step) * dt;
        const Vector z_sel = vz_sel * s;
        const Vector w_sel = vw_sel * s;
        for (Index r = 0; r < m; ++r) {
            const double z = z_sel[r];
            const double w = w_sel[r];
            if (is_w_row[static_cast<std::size_t>(r)]) {
                f_sel[r] = inv_tau * (config.gamma + config.mu1 * w / (config.mu2 + z)) *
                           (-w - config.K * z * (z - config.b - 1.0));
            } else {
                f_sel[r] = inv_tau * (config.K * z * (1.0 - z) * (z - config.alpha) - z * w);
                if (stim_gain[static_cast<std::size_t>(r)] != 0.0)
                    f_sel[r] += fom::stimulus_value(config.stimulus,
                                                    stim_site[static_cast<std::size_t>(r)], t);
            }
        }
        Vector ds = a_reduced * s + w_deim * f_sel;
        if (!options.stimulus_in_deim) {
            for (int site = 0; site < 2; ++site) {
                const double rate = fom::stimulus_value(config.stimulus, site, t);
                if (rate != 0.0) ds += rate * b_reduced.col(site);
            }
        }
        s += dt * ds;

        if (step + 1 == next_capture) {
            if (!s.allFinite())
                throw DivergenceError("reduced state became nonfinite", step + 1);
            result.reduced_states.col(capture_idx) = s;
            for (int j = 0; j < config.n_obs_space; ++j)
                result.z(j, capture_idx) = V.row(static_cast<Index>(j) * space_stride).dot(s);
            ++capture_idx;
            next_capture += capture_stride;
        }
    }
    return result;
}

}  // namespace ldnet::baselines
