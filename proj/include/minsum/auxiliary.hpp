#pragma once

#include <Eigen/Dense>

#include "minsum/splitting.hpp"

namespace minsum {

// Node-space state: numerator pair (r, q) and denominator pair (R, Q).
struct NodeState {
    Eigen::VectorXd r;
    Eigen::VectorXd q;
    Eigen::VectorXd R;
    Eigen::VectorXd Q;
    int step = 0;
};

// The 2x2 block operator driving the node recursion,
//
//   [ (1-d) I - (1-d) diag(G1) + d G      d I     ]
//   [   d I - d diag(G1) + (1-d) G      (1-d) I   ],
//
// where G1 holds the full row sums of the coupling matrix G.  G may carry a
// diagonal: with the zero-diagonal coupling of SplittingParams the recursion
// tracks the edge protocol exactly, while G = gamma W (diagonal included)
// yields the accelerated consensus update.
class AuxOperator {
public:
    static AuxOperator from_params(const SplittingParams& params);
    static AuxOperator with_weight(double delta, double gamma, const WeightMatrix& w);

    int node_count() const { return n_; }
    double delta() const { return delta_; }

    void apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
               Eigen::VectorXd& out_x, Eigen::VectorXd& out_y) const;
    Eigen::MatrixXd dense() const;  // limited to 64 nodes

private:
    AuxOperator() = default;

    int n_ = 0;
    double delta_ = 0.0;
    std::vector<std::vector<std::pair<int, double>>> rows_;  // off-diagonal couplings
    Eigen::VectorXd diag_;
    Eigen::VectorXd row_sums_;
};

// r = q = b, R = Q = 1; the image of the all-zero edge state.
NodeState initial_node_state(const ProblemData& data);

// Node state matching an arbitrary edge state: incoming message sums feed
// (r, R), while (q, Q) subtract the sums of outgoing messages.
NodeState init_from_edge(const SplittingParams& params, const ProblemData& data,
                         const DirectedEdgeIndex& index, const EdgeState& s);

void aux_step(NodeState& s, const AuxOperator& op);

// Belief ratio r_v / R_v; throws if a denominator is not strictly positive.
Eigen::VectorXd aux_output(const NodeState& s);

}  // namespace minsum
