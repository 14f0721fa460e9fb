#include "minsum/baselines.hpp"

namespace minsum {

Eigen::VectorXd diffusion_step(const WeightMatrix& w, const Eigen::VectorXd& x) {
    return w.apply(x);
}

TwoStepState warm_start(const Eigen::VectorXd& b) {
    TwoStepState s;
    s.curr = b;
    s.prev = b;
    return s;
}

namespace {

void advance(TwoStepState& s, Eigen::VectorXd next) {
    s.prev = std::move(s.curr);
    s.curr = std::move(next);
    s.step += 1;
}

}  // namespace

void shift_register_step(TwoStepState& s, const WeightMatrix& w, double gamma) {
    advance(s, (1.0 + gamma) * w.apply(s.curr) - gamma * s.prev);
}

void heavy_ball_step(TwoStepState& s, const WeightMatrix& w, double gamma) {
    advance(s, w.apply(s.curr) + gamma * (s.curr - s.prev));
}

void nesterov_step(TwoStepState& s, const WeightMatrix& w, double gamma) {
    advance(s, (1.0 + gamma) * w.apply(s.curr) - gamma * w.apply(s.prev));
}

}  // namespace minsum
