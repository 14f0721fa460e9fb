#pragma once

#include <Eigen/Dense>

#include "minsum/spectral.hpp"

namespace minsum {

// x <- W x
Eigen::VectorXd diffusion_step(const WeightMatrix& w, const Eigen::VectorXd& x);

// Two-step iterations keep the previous iterate around.
struct TwoStepState {
    Eigen::VectorXd curr;
    Eigen::VectorXd prev;
    int step = 0;
};

TwoStepState warm_start(const Eigen::VectorXd& b);  // curr = prev = b

// x_t = (1 + gamma) W x_{t-1} - gamma x_{t-2}
void shift_register_step(TwoStepState& s, const WeightMatrix& w, double gamma);

// x_t = W x_{t-1} + gamma (x_{t-1} - x_{t-2})
void heavy_ball_step(TwoStepState& s, const WeightMatrix& w, double gamma);

// x_t = (1 + gamma) W x_{t-1} - gamma W x_{t-2}
void nesterov_step(TwoStepState& s, const WeightMatrix& w, double gamma);

}  // namespace minsum
