#pragma once

#include <string>

#include <Eigen/Dense>

#include "minsum/graph.hpp"

namespace minsum {

// Symmetric doubly stochastic matrix supported on a graph: one value per
// undirected edge plus a diagonal.  Construction validates the structure.
class WeightMatrix {
public:
    WeightMatrix(const Graph& g, std::vector<double> edge_values,
                 std::vector<double> diagonal);

    // 1/(2 d_max) on every edge, 1 - d_v/(2 d_max) on the diagonal.
    static WeightMatrix metropolis_hastings(const Graph& g);
    static WeightMatrix from_dense(const Graph& g, const Eigen::MatrixXd& w);

    int size() const { return n_; }
    int edge_count() const { return static_cast<int>(edge_values_.size()); }
    double diagonal(int v) const { return diag_[v]; }
    double edge_value(int e) const { return edge_values_[e]; }  // graph edge order
    // Sorted (neighbor, value) pairs for one row, diagonal excluded.
    const std::vector<std::pair<int, double>>& row(int v) const { return rows_[v]; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd dense() const;

private:
    int n_;
    std::vector<double> edge_values_;
    std::vector<double> diag_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
};

// Largest eigenvalue magnitude of W - (1/n) 11^T: dense solve up to 64
// nodes, power iteration on the squared deflated operator beyond that.
double second_eigenvalue_magnitude(const WeightMatrix& w);

// 2 / (1 + sqrt(1 - rho^2)); requires rho in [0, 1).
double optimal_gamma(double rho_w);

// sqrt((1 - sqrt(1 - rho^2)) / (1 + sqrt(1 - rho^2))); requires rho in [0, 1).
double predicted_rho_k(double rho_w);

// The 2n x 2n linear update [[gamma W, I], [(1-gamma) I, 0]] and its limit.
// Dense helpers, limited to n <= 64.
Eigen::MatrixXd build_k(double gamma, const WeightMatrix& w);
Eigen::MatrixXd build_k_infinity(double gamma, int n);

struct SpectralReport {
    int n = 0;
    double rho_w = 0.0;
    double gamma = 0.0;
    double rho_k_predicted = 0.0;
    double diffusive_time_scale = 0.0;    // 1 / (1 - rho_w)
    double accelerated_time_scale = 0.0;  // 1 / (1 - rho_k)
};

SpectralReport spectral_report(const Graph& g);
std::string to_json(const SpectralReport& r);

}  // namespace minsum
