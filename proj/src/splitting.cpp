#include "minsum/splitting.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "minsum/errors.hpp"

namespace minsum {

EdgeCoupling::EdgeCoupling(const Graph& g, std::vector<double> per_edge)
    : per_edge_(std::move(per_edge)) {
    if (static_cast<int>(per_edge_.size()) != g.edge_count())
        throw std::invalid_argument("one coupling per edge required");
    for (double v : per_edge_)
        if (!std::isfinite(v)) throw std::invalid_argument("couplings must be finite");
    rows_.resize(g.node_count());
    for (int e = 0; e < g.edge_count(); ++e) {
        auto [u, v] = g.edges()[e];
        rows_[u].emplace_back(v, per_edge_[e]);
        rows_[v].emplace_back(u, per_edge_[e]);
    }
    for (auto& r : rows_) std::sort(r.begin(), r.end());
}

EdgeCoupling EdgeCoupling::adjacency(const Graph& g) {
    return EdgeCoupling(g, std::vector<double>(g.edge_count(), 1.0));
}

EdgeCoupling EdgeCoupling::from_weight(const WeightMatrix& w, double scale) {
    EdgeCoupling out;
    out.per_edge_.reserve(w.edge_count());
    for (int e = 0; e < w.edge_count(); ++e)
        out.per_edge_.push_back(scale * w.edge_value(e));
    out.rows_.resize(w.size());
    for (int v = 0; v < w.size(); ++v) {
        out.rows_[v].reserve(w.row(v).size());
        for (auto [u, val] : w.row(v)) out.rows_[v].emplace_back(u, scale * val);
    }
    return out;
}

SplittingParams::SplittingParams(double d, EdgeCoupling g) : delta(d), gamma(std::move(g)) {
    if (d == 0.0) throw std::invalid_argument("delta must be nonzero");
}

SplittingParams SplittingParams::ordinary(const Graph& g) {
    return SplittingParams(1.0, EdgeCoupling::adjacency(g));
}

SplittingParams SplittingParams::from_weight(double delta, const WeightMatrix& w, double scale) {
    return SplittingParams(delta, EdgeCoupling::from_weight(w, scale));
}

ProblemData::ProblemData(Eigen::VectorXd values) : b(std::move(values)) {
    if (b.size() < 1) throw std::invalid_argument("inputs must not be empty");
    for (Eigen::Index i = 0; i < b.size(); ++i)
        if (!(b(i) > 0.0 && b(i) < 1.0))
            throw std::invalid_argument("inputs must lie strictly inside (0, 1)");
}

EdgeState zero_edge_state(int directed_edge_count) {
    EdgeState s;
    s.R = Eigen::VectorXd::Zero(directed_edge_count);
    s.r = Eigen::VectorXd::Zero(directed_edge_count);
    return s;
}

Eigen::VectorXd hhat_vector(double delta, const ProblemData& data,
                            const DirectedEdgeIndex& index) {
    Eigen::VectorXd h(index.size());
    for (int e = 0; e < index.size(); ++e)
        h(e) = data.b(index.tail(e)) + (1.0 - 1.0 / delta) * data.b(index.head(e));
    return h;
}

EdgeProtocol::EdgeProtocol(const Graph& g, const SplittingParams& params,
                           const ProblemData& data)
    : n_(g.node_count()), delta_(params.delta), index_(g), b_(data.b) {
    if (data.b.size() != n_) throw std::invalid_argument("inputs must match the graph size");
    hhat_ = hhat_vector(delta_, data, index_);

    // Row for the message on (w, v): couplings into w scaled by delta and
    // couplings into v scaled by delta - 1, with the back edge in each group
    // shifted by -delta and -(delta - 1) respectively.
    rows_.resize(index_.size());
    for (int e = 0; e < index_.size(); ++e) {
        int w = index_.tail(e), v = index_.head(e);
        auto& row = rows_[e];
        for (auto [z, coupling] : params.gamma.row(w)) {
            double c = delta_ * coupling;
            if (z == v) c -= delta_;
            row.emplace_back(index_.index_of(z, w), c);
        }
        for (auto [z, coupling] : params.gamma.row(v)) {
            double c = (delta_ - 1.0) * coupling;
            if (z == w) c -= delta_ - 1.0;
            row.emplace_back(index_.index_of(z, v), c);
        }
    }

    incoming_.resize(n_);
    for (int v = 0; v < n_; ++v)
        for (auto [z, coupling] : params.gamma.row(v))
            incoming_[v].emplace_back(index_.index_of(z, v), coupling);
}

Eigen::VectorXd EdgeProtocol::apply_update_matrix(const Eigen::VectorXd& x) const {
    if (x.size() != index_.size()) throw std::invalid_argument("vector size mismatch");
    Eigen::VectorXd y(index_.size());
    for (int e = 0; e < index_.size(); ++e) {
        double acc = 0.0;
        for (auto [col, val] : rows_[e]) acc += val * x(col);
        y(e) = acc;
    }
    return y;
}

Eigen::MatrixXd EdgeProtocol::update_matrix_dense() const {
    if (index_.size() > 200)
        throw std::invalid_argument("dense update matrix limited to 200 directed edges");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(index_.size(), index_.size());
    for (int e = 0; e < index_.size(); ++e)
        for (auto [col, val] : rows_[e]) m(e, col) += val;
    return m;
}

void EdgeProtocol::check_finite(const EdgeState& s) const {
    if (!s.R.allFinite() || !s.r.allFinite())
        throw NumericalError("edge messages left the finite range at step " +
                                 std::to_string(s.step),
                             s.step);
}

void EdgeProtocol::step(EdgeState& s) const {
    s.R = Eigen::VectorXd::Constant(index_.size(), step_constant()) + apply_update_matrix(s.R);
    s.r = hhat_ + apply_update_matrix(s.r);
    s.step += 1;
    check_finite(s);
}

void EdgeProtocol::generic_step(EdgeState& s) const {
    // Node-sum form: per-edge intermediate against the head node, then the
    // new message mixes the intermediate with its reverse.
    int m = index_.size();
    Eigen::VectorXd sum_R = Eigen::VectorXd::Zero(n_), sum_r = Eigen::VectorXd::Zero(n_);
    for (int v = 0; v < n_; ++v)
        for (auto [e, coupling] : incoming_[v]) {
            sum_R(v) += coupling * s.R(e);
            sum_r(v) += coupling * s.r(e);
        }
    Eigen::VectorXd xi_R(m), xi_r(m);
    for (int e = 0; e < m; ++e) {
        int v = index_.head(e);
        xi_R(e) = 1.0 / delta_ - s.R(e) + sum_R(v);
        xi_r(e) = b_(v) / delta_ - s.r(e) + sum_r(v);
    }
    Eigen::VectorXd new_R(m), new_r(m);
    for (int e = 0; e < m; ++e) {
        int rev = index_.reverse_of(e);
        new_R(e) = (delta_ - 1.0) * xi_R(e) + delta_ * xi_R(rev);
        new_r(e) = (delta_ - 1.0) * xi_r(e) + delta_ * xi_r(rev);
    }
    s.R = std::move(new_R);
    s.r = std::move(new_r);
    s.step += 1;
    check_finite(s);
}

Eigen::VectorXd EdgeProtocol::output(const EdgeState& s) const {
    Eigen::VectorXd x(n_);
    for (int v = 0; v < n_; ++v) {
        double num = b_(v), den = 1.0;
        for (auto [e, coupling] : incoming_[v]) {
            num += delta_ * coupling * s.r(e);
            den += delta_ * coupling * s.R(e);
        }
        if (!(den > 0.0))
            throw NumericalError("belief denominator not positive at node " +
                                     std::to_string(v) + " (step " +
                                     std::to_string(s.step) + ")",
                                 s.step);
        x(v) = num / den;
    }
    return x;
}

}  // namespace minsum
