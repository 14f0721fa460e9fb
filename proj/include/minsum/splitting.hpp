#pragma once

#include <vector>

#include <Eigen/Dense>

#include "minsum/graph.hpp"
#include "minsum/spectral.hpp"

namespace minsum {

// Symmetric per-edge coupling with an implicitly zero diagonal.
class EdgeCoupling {
public:
    EdgeCoupling(const Graph& g, std::vector<double> per_edge);

    static EdgeCoupling adjacency(const Graph& g);  // all couplings equal 1
    // scale * (off-diagonal part of w); the diagonal of w is dropped here
    // because message updates only ever read couplings across edges.
    static EdgeCoupling from_weight(const WeightMatrix& w, double scale);

    double value(int edge) const { return per_edge_[edge]; }  // graph edge order
    // Sorted (neighbor, coupling) pairs for one node.
    const std::vector<std::pair<int, double>>& row(int v) const { return rows_[v]; }
    int node_count() const { return static_cast<int>(rows_.size()); }
    int edge_count() const { return static_cast<int>(per_edge_.size()); }

private:
    EdgeCoupling() = default;

    std::vector<double> per_edge_;
    std::vector<std::vector<std::pair<int, double>>> rows_;
};

struct SplittingParams {
    double delta;
    EdgeCoupling gamma;

    SplittingParams(double d, EdgeCoupling g);  // requires d != 0
    static SplittingParams ordinary(const Graph& g);  // delta 1, unit couplings
    static SplittingParams from_weight(double delta, const WeightMatrix& w, double scale);
};

// Per-node inputs, each strictly inside (0, 1).
struct ProblemData {
    Eigen::VectorXd b;

    explicit ProblemData(Eigen::VectorXd values);
    double mean() const { return b.mean(); }
};

// Message state of the edge protocol: one R and one r entry per directed
// edge, ordered by DirectedEdgeIndex.
struct EdgeState {
    Eigen::VectorXd R;
    Eigen::VectorXd r;
    int step = 0;
};

EdgeState zero_edge_state(int directed_edge_count);

// The splitting message recursion over directed edges.  step() advances via
// the assembled sparse update matrix; generic_step() recomputes the same
// update from the node-sum form and must stay numerically identical.
class EdgeProtocol {
public:
    EdgeProtocol(const Graph& g, const SplittingParams& params, const ProblemData& data);

    const DirectedEdgeIndex& index() const { return index_; }
    double delta() const { return delta_; }
    double step_constant() const { return 2.0 - 1.0 / delta_; }
    const Eigen::VectorXd& drive() const { return hhat_; }

    void step(EdgeState& s) const;
    void generic_step(EdgeState& s) const;

    // Belief ratio per node; throws if a denominator is not strictly positive.
    Eigen::VectorXd output(const EdgeState& s) const;

    Eigen::VectorXd apply_update_matrix(const Eigen::VectorXd& x) const;
    Eigen::MatrixXd update_matrix_dense() const;  // limited to 2m <= 200

private:
    void check_finite(const EdgeState& s) const;

    int n_;
    double delta_;
    DirectedEdgeIndex index_;
    Eigen::VectorXd b_;
    Eigen::VectorXd hhat_;
    // Sparse rows of the update matrix: (column, value) per directed edge.
    std::vector<std::vector<std::pair<int, double>>> rows_;
    // Incoming edges per node with their couplings, for the node-sum form
    // and for the output ratio.
    std::vector<std::vector<std::pair<int, double>>> incoming_;
};

// Drive vector of the recursion: entry (w,v) equals b_w + (1 - 1/delta) b_v.
Eigen::VectorXd hhat_vector(double delta, const ProblemData& data,
                            const DirectedEdgeIndex& index);

}  // namespace minsum
