#include <cmath>
#include <random>

#include <doctest.h>
#include <Eigen/Dense>

#include "minsum/analysis.hpp"
#include "minsum/baselines.hpp"

using minsum::Graph;
using minsum::TwoStepState;
using minsum::WeightMatrix;

namespace {

Eigen::VectorXd random_vec(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = 0.1 + 0.8 * minsum::uniform01(rng);
    return v;
}

}  // namespace

TEST_CASE("diffusion step is the weight action") {
    Graph g = Graph::cycle(6);
    WeightMatrix w = WeightMatrix::metropolis_hastings(g);
    Eigen::VectorXd x = random_vec(6, 1);
    CHECK((minsum::diffusion_step(w, x) - w.dense() * x).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("warm start duplicates the inputs") {
    Eigen::VectorXd b = random_vec(5, 2);
    TwoStepState s = minsum::warm_start(b);
    CHECK((s.curr - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK((s.prev - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(s.step == 0);
}

TEST_CASE("first step collapses to diffusion for every method") {
    Graph g = Graph::cycle(5);
    WeightMatrix w = WeightMatrix::metropolis_hastings(g);
    Eigen::VectorXd b = random_vec(5, 3);
    Eigen::VectorXd wb = w.dense() * b;
    double gamma = 0.3;

    TwoStepState s = minsum::warm_start(b);
    minsum::heavy_ball_step(s, w, gamma);
    CHECK((s.curr - wb).cwiseAbs().maxCoeff() < 1e-14);

    s = minsum::warm_start(b);
    minsum::nesterov_step(s, w, gamma);
    CHECK((s.curr - wb).cwiseAbs().maxCoeff() < 1e-14);

    // The shift register mixes in the previous iterate immediately.
    s = minsum::warm_start(b);
    minsum::shift_register_step(s, w, gamma);
    CHECK((s.curr - ((1.0 + gamma) * wb - gamma * b)).cwiseAbs().maxCoeff() < 1e-14);

    s = minsum::warm_start(b);
    minsum::shift_register_step(s, w, 0.0);
    CHECK((s.curr - wb).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("two steps match the dense recurrences") {
    Graph g = Graph::cycle(4);
    WeightMatrix wm = WeightMatrix::metropolis_hastings(g);
    Eigen::MatrixXd w = wm.dense();
    Eigen::VectorXd b = random_vec(4, 4);
    double gamma = 0.3;

    auto two_steps = [&](auto stepper, auto recurrence) {
        TwoStepState s = minsum::warm_start(b);
        stepper(s);
        Eigen::VectorXd x1 = s.curr;
        stepper(s);
        Eigen::VectorXd expect = recurrence(x1, b);
        CHECK((s.curr - expect).cwiseAbs().maxCoeff() < 1e-14);
        CHECK(s.step == 2);
        CHECK((s.prev - x1).cwiseAbs().maxCoeff() == 0.0);
    };

    two_steps([&](TwoStepState& s) { minsum::shift_register_step(s, wm, gamma); },
              [&](const Eigen::VectorXd& x1, const Eigen::VectorXd& x0) {
                  return ((1.0 + gamma) * (w * x1) - gamma * x0).eval();
              });
    two_steps([&](TwoStepState& s) { minsum::heavy_ball_step(s, wm, gamma); },
              [&](const Eigen::VectorXd& x1, const Eigen::VectorXd& x0) {
                  return (w * x1 + gamma * (x1 - x0)).eval();
              });
    two_steps([&](TwoStepState& s) { minsum::nesterov_step(s, wm, gamma); },
              [&](const Eigen::VectorXd& x1, const Eigen::VectorXd& x0) {
                  return ((1.0 + gamma) * (w * x1) - gamma * (w * x0)).eval();
              });
}

TEST_CASE("tuned shift register settles fast") {
    // With the spectral momentum the register should be inside 1e-6 of
    // consensus within ten times the accelerated time scale.
    Graph g = Graph::cycle(8);
    minsum::ProblemData d(random_vec(8, 5));
    minsum::RunSettings st;
    st.policy = minsum::TuningPolicy::Accelerated;
    st.t_max = 400;
    st.eps = 0.0;  // keep the full trace
    minsum::RunTrace trace =
        minsum::run_experiment(minsum::Algorithm::ShiftRegister, g, d, st);
    double rho_k = minsum::predicted_rho_k(trace.meta.rho_w);
    int budget = 10 * static_cast<int>(std::ceil(1.0 / (1.0 - rho_k)));
    REQUIRE(budget < static_cast<int>(trace.errors.size()));
    CHECK(trace.errors[budget] <= 1e-6);
}

TEST_CASE("oversized momentum diverges and is reported") {
    Graph g = Graph::cycle(4);
    minsum::ProblemData d(random_vec(4, 6));
    minsum::RunSettings st;
    st.policy = minsum::TuningPolicy::ExplicitValues;
    st.gamma = 5.0;
    st.t_max = 2000;
    minsum::RunTrace trace =
        minsum::run_experiment(minsum::Algorithm::ShiftRegister, g, d, st);
    CHECK(trace.meta.status == "failed");
    CHECK(trace.meta.failure_step > 0);
    CHECK(!trace.meta.failure.empty());
    CHECK(static_cast<int>(trace.errors.size()) < st.t_max + 1);
}
