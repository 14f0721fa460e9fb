#include "minsum/auxiliary.hpp"

#include <stdexcept>
#include <string>

#include "minsum/errors.hpp"

namespace minsum {

AuxOperator AuxOperator::from_params(const SplittingParams& params) {
    AuxOperator op;
    op.n_ = params.gamma.node_count();
    op.delta_ = params.delta;
    op.rows_.resize(op.n_);
    op.diag_ = Eigen::VectorXd::Zero(op.n_);
    op.row_sums_ = Eigen::VectorXd::Zero(op.n_);
    for (int v = 0; v < op.n_; ++v) {
        op.rows_[v].assign(params.gamma.row(v).begin(), params.gamma.row(v).end());
        for (auto [u, val] : op.rows_[v]) op.row_sums_(v) += val;
    }
    return op;
}

AuxOperator AuxOperator::with_weight(double delta, double gamma, const WeightMatrix& w) {
    if (delta == 0.0) throw std::invalid_argument("delta must be nonzero");
    AuxOperator op;
    op.n_ = w.size();
    op.delta_ = delta;
    op.rows_.resize(op.n_);
    op.diag_ = Eigen::VectorXd::Zero(op.n_);
    op.row_sums_ = Eigen::VectorXd::Zero(op.n_);
    for (int v = 0; v < op.n_; ++v) {
        op.diag_(v) = gamma * w.diagonal(v);
        op.row_sums_(v) = op.diag_(v);
        op.rows_[v].reserve(w.row(v).size());
        for (auto [u, val] : w.row(v)) {
            op.rows_[v].emplace_back(u, gamma * val);
            op.row_sums_(v) += gamma * val;
        }
    }
    return op;
}

void AuxOperator::apply(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                        Eigen::VectorXd& out_x, Eigen::VectorXd& out_y) const {
    if (x.size() != n_ || y.size() != n_)
        throw std::invalid_argument("vector size mismatch");
    double d = delta_;
    out_x.resize(n_);
    out_y.resize(n_);
    for (int v = 0; v < n_; ++v) {
        double gx = diag_(v) * x(v);
        for (auto [u, val] : rows_[v]) gx += val * x(u);
        out_x(v) = (1.0 - d) * (1.0 - row_sums_(v)) * x(v) + d * gx + d * y(v);
        out_y(v) = d * (1.0 - row_sums_(v)) * x(v) + (1.0 - d) * gx + (1.0 - d) * y(v);
    }
}

Eigen::MatrixXd AuxOperator::dense() const {
    if (n_ > 64) throw std::invalid_argument("dense operator limited to 64 nodes");
    double d = delta_;
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n_, n_);
    for (int v = 0; v < n_; ++v) {
        g(v, v) = diag_(v);
        for (auto [u, val] : rows_[v]) g(v, u) = val;
    }
    Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n_, n_);
    Eigen::MatrixXd scale = row_sums_.asDiagonal();
    Eigen::MatrixXd k(2 * n_, 2 * n_);
    k.topLeftCorner(n_, n_) = (1.0 - d) * (id - scale) + d * g;
    k.topRightCorner(n_, n_) = d * id;
    k.bottomLeftCorner(n_, n_) = d * (id - scale) + (1.0 - d) * g;
    k.bottomRightCorner(n_, n_) = (1.0 - d) * id;
    return k;
}

NodeState initial_node_state(const ProblemData& data) {
    NodeState s;
    s.r = data.b;
    s.q = data.b;
    s.R = Eigen::VectorXd::Ones(data.b.size());
    s.Q = Eigen::VectorXd::Ones(data.b.size());
    return s;
}

NodeState init_from_edge(const SplittingParams& params, const ProblemData& data,
                         const DirectedEdgeIndex& index, const EdgeState& s) {
    int n = params.gamma.node_count();
    if (data.b.size() != n) throw std::invalid_argument("inputs must match the graph size");
    double d = params.delta;
    NodeState out;
    out.r.resize(n);
    out.q.resize(n);
    out.R.resize(n);
    out.Q.resize(n);
    for (int v = 0; v < n; ++v) {
        double in_R = 0.0, in_r = 0.0, out_R = 0.0, out_r = 0.0;
        for (auto [u, coupling] : params.gamma.row(v)) {
            in_R += coupling * s.R(index.index_of(u, v));
            in_r += coupling * s.r(index.index_of(u, v));
            out_R += coupling * s.R(index.index_of(v, u));
            out_r += coupling * s.r(index.index_of(v, u));
        }
        out.R(v) = 1.0 + d * in_R;
        out.Q(v) = 1.0 - d * out_R;
        out.r(v) = data.b(v) + d * in_r;
        out.q(v) = data.b(v) - d * out_r;
    }
    out.step = s.step;
    return out;
}

void aux_step(NodeState& s, const AuxOperator& op) {
    Eigen::VectorXd nr, nq, nR, nQ;
    op.apply(s.r, s.q, nr, nq);
    op.apply(s.R, s.Q, nR, nQ);
    s.r = std::move(nr);
    s.q = std::move(nq);
    s.R = std::move(nR);
    s.Q = std::move(nQ);
    s.step += 1;
    if (!s.r.allFinite() || !s.q.allFinite() || !s.R.allFinite() || !s.Q.allFinite())
        throw NumericalError("node state left the finite range at step " +
                                 std::to_string(s.step),
                             s.step);
}

Eigen::VectorXd aux_output(const NodeState& s) {
    Eigen::VectorXd x(s.r.size());
    for (Eigen::Index v = 0; v < s.r.size(); ++v) {
        if (!(s.R(v) > 0.0))
            throw NumericalError("belief denominator not positive at node " +
                                     std::to_string(v) + " (step " +
                                     std::to_string(s.step) + ")",
                                 s.step);
        x(v) = s.r(v) / s.R(v);
    }
    return x;
}

}  // namespace minsum
