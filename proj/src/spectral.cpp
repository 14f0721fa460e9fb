#include "minsum/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "minsum/errors.hpp"

namespace minsum {

namespace {

constexpr int kDenseLimit = 64;

// Largest |eigenvalue| of the deflated operator by power iteration on its
// square.  Squaring makes the dominant magnitude a dominant eigenvalue even
// when the extreme eigenvalues come as a near-symmetric pair.
double power_iteration_rho(const WeightMatrix& w) {
    int n = w.size();
    auto deflated = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        return w.apply(x) - Eigen::VectorXd::Constant(n, x.mean());
    };
    std::mt19937_64 rng(12345);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i)
        v(i) = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
    v.array() -= v.mean();
    double vn = v.norm();
    if (vn == 0.0) throw NumericalError("degenerate start vector in power iteration");
    v /= vn;

    double rho = 0.0;
    const long max_iters = 1000000;
    for (long it = 0; it < max_iters; ++it) {
        Eigen::VectorXd mv = deflated(deflated(v));
        double lambda = v.dot(mv);  // Rayleigh quotient for the squared operator
        double norm = mv.norm();
        if (norm == 0.0) return 0.0;
        double residual = (mv - lambda * v).norm();
        double estimate = std::sqrt(std::max(lambda, 0.0));
        v = mv / norm;
        bool settled = std::abs(estimate - rho) <= 1e-13 &&
                       residual <= 1e-10 * std::max(1.0, std::abs(lambda));
        rho = estimate;
        if (settled) return rho;
    }
    throw NumericalError("power iteration did not settle within 1000000 iterations");
}

}  // namespace

WeightMatrix::WeightMatrix(const Graph& g, std::vector<double> edge_values,
                           std::vector<double> diagonal)
    : n_(g.node_count()), edge_values_(std::move(edge_values)), diag_(std::move(diagonal)) {
    if (static_cast<int>(edge_values_.size()) != g.edge_count())
        throw std::invalid_argument("one weight per edge required");
    if (static_cast<int>(diag_.size()) != n_)
        throw std::invalid_argument("one diagonal entry per node required");
    rows_.resize(n_);
    std::vector<double> row_sum(diag_.begin(), diag_.end());
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [u, v] = g.edges()[e];
        rows_[u].emplace_back(v, edge_values_[e]);
        rows_[v].emplace_back(u, edge_values_[e]);
        row_sum[u] += edge_values_[e];
        row_sum[v] += edge_values_[e];
    }
    for (auto& r : rows_) std::sort(r.begin(), r.end());
    for (int v = 0; v < n_; ++v)
        if (std::abs(row_sum[v] - 1.0) > 1e-12)
            throw std::invalid_argument("rows must sum to 1");
}

WeightMatrix WeightMatrix::metropolis_hastings(const Graph& g) {
    double inv = 1.0 / (2.0 * g.max_degree());
    std::vector<double> edge_values(g.edge_count(), inv);
    std::vector<double> diag(g.node_count());
    for (int v = 0; v < g.node_count(); ++v) diag[v] = 1.0 - g.degree(v) * inv;
    return WeightMatrix(g, std::move(edge_values), std::move(diag));
}

WeightMatrix WeightMatrix::from_dense(const Graph& g, const Eigen::MatrixXd& w) {
    int n = g.node_count();
    if (w.rows() != n || w.cols() != n)
        throw std::invalid_argument("matrix size must match the graph");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(w(i, j) - w(j, i)) > 1e-12)
                throw std::invalid_argument("matrix must be symmetric");
            if (!g.adjacent(i, j) && w(i, j) != 0.0)
                throw std::invalid_argument("nonzero entry outside the graph");
        }
    std::vector<double> edge_values;
    edge_values.reserve(g.edge_count());
    for (auto [u, v] : g.edges()) edge_values.push_back(w(u, v));
    std::vector<double> diag(n);
    for (int i = 0; i < n; ++i) diag[i] = w(i, i);
    return WeightMatrix(g, std::move(edge_values), std::move(diag));
}

Eigen::VectorXd WeightMatrix::apply(const Eigen::VectorXd& x) const {
    if (x.size() != n_) throw std::invalid_argument("vector size mismatch");
    Eigen::VectorXd y(n_);
    for (int v = 0; v < n_; ++v) {
        double acc = diag_[v] * x(v);
        for (auto [w, val] : rows_[v]) acc += val * x(w);
        y(v) = acc;
    }
    return y;
}

Eigen::MatrixXd WeightMatrix::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, n_);
    for (int v = 0; v < n_; ++v) {
        m(v, v) = diag_[v];
        for (auto [w, val] : rows_[v]) m(v, w) = val;
    }
    return m;
}

double second_eigenvalue_magnitude(const WeightMatrix& w) {
    int n = w.size();
    if (n <= kDenseLimit) {
        Eigen::MatrixXd m = w.dense();
        m.array() -= 1.0 / n;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
        if (solver.info() != Eigen::Success)
            throw NumericalError("eigenvalue solve failed");
        return solver.eigenvalues().cwiseAbs().maxCoeff();
    }
    return power_iteration_rho(w);
}

double optimal_gamma(double rho_w) {
    if (!(rho_w >= 0.0 && rho_w < 1.0))
        throw std::invalid_argument("rho_w must lie in [0, 1)");
    return 2.0 / (1.0 + std::sqrt(1.0 - rho_w * rho_w));
}

double predicted_rho_k(double rho_w) {
    if (!(rho_w >= 0.0 && rho_w < 1.0))
        throw std::invalid_argument("rho_w must lie in [0, 1)");
    double s = std::sqrt(1.0 - rho_w * rho_w);
    return std::sqrt((1.0 - s) / (1.0 + s));
}

Eigen::MatrixXd build_k(double gamma, const WeightMatrix& w) {
    int n = w.size();
    if (n > kDenseLimit)
        throw std::invalid_argument("dense operator limited to 64 nodes");
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    k.topLeftCorner(n, n) = gamma * w.dense();
    k.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    k.bottomLeftCorner(n, n) = (1.0 - gamma) * Eigen::MatrixXd::Identity(n, n);
    return k;
}

Eigen::MatrixXd build_k_infinity(double gamma, int n) {
    if (n > kDenseLimit)
        throw std::invalid_argument("dense operator limited to 64 nodes");
    double c = 1.0 / ((2.0 - gamma) * n);
    Eigen::MatrixXd k(2 * n, 2 * n);
    k.topRows(n).setConstant(c);
    k.bottomRows(n).setConstant(c * (1.0 - gamma));
    return k;
}

SpectralReport spectral_report(const Graph& g) {
    SpectralReport r;
    r.n = g.node_count();
    WeightMatrix w = WeightMatrix::metropolis_hastings(g);
    r.rho_w = second_eigenvalue_magnitude(w);
    r.gamma = optimal_gamma(r.rho_w);
    r.rho_k_predicted = predicted_rho_k(r.rho_w);
    r.diffusive_time_scale = 1.0 / (1.0 - r.rho_w);
    r.accelerated_time_scale = 1.0 / (1.0 - r.rho_k_predicted);
    return r;
}

std::string to_json(const SpectralReport& r) {
    nlohmann::ordered_json j;
    j["n"] = r.n;
    j["rho_w"] = r.rho_w;
    j["gamma"] = r.gamma;
    j["rho_k_predicted"] = r.rho_k_predicted;
    j["diffusive_time_scale"] = r.diffusive_time_scale;
    j["accelerated_time_scale"] = r.accelerated_time_scale;
    return j.dump(2) + "\n";
}

}  // namespace minsum
