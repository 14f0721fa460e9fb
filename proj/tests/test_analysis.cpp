#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <doctest.h>
#include <Eigen/Dense>
#include <json.hpp>

#include "minsum/analysis.hpp"
#include "minsum/errors.hpp"

using minsum::Algorithm;
using minsum::Graph;
using minsum::ProblemData;
using minsum::RunSettings;
using minsum::RunTrace;
using minsum::TuningPolicy;
using minsum::WeightMatrix;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path test_dir() {
    auto dir = std::filesystem::temp_directory_path() / "minsum_analysis_test";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("algorithm and policy names round trip") {
    for (Algorithm a : minsum::all_algorithms())
        CHECK(minsum::algorithm_from_name(minsum::to_string(a)) == a);
    CHECK(minsum::all_algorithms().size() == 7);
    CHECK_THROWS_AS(minsum::algorithm_from_name("gradient"), std::invalid_argument);

    for (TuningPolicy p :
         {TuningPolicy::Accelerated, TuningPolicy::Ordinary, TuningPolicy::ExplicitValues})
        CHECK(minsum::policy_from_name(minsum::to_string(p)) == p);
    CHECK_THROWS_AS(minsum::policy_from_name("auto"), std::invalid_argument);
}

TEST_CASE("error norm") {
    Eigen::VectorXd x(2);
    x << 1.0, 0.0;
    CHECK(minsum::error_norm(x, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(minsum::error_norm(Eigen::VectorXd::Constant(7, 0.3), 0.3) == 0.0);
}

TEST_CASE("convergence time hysteresis") {
    std::vector<double> errors;
    for (int t = 0; t < 5; ++t) errors.push_back(1e-3);
    for (int t = 0; t < 20; ++t) errors.push_back(1e-5);
    CHECK(minsum::convergence_time(errors, 1e-4) == 5);

    // An early blip pushes the window past it.
    errors = std::vector<double>(40, 1e-5);
    errors[3] = 1.0;
    CHECK(minsum::convergence_time(errors, 1e-4) == 4);
    // A late blip leaves the first full window intact.
    errors = std::vector<double>(40, 1e-5);
    errors[13] = 1.0;
    CHECK(minsum::convergence_time(errors, 1e-4) == 0);

    CHECK(minsum::convergence_time(std::vector<double>(11, 0.0), 1e-4) == 0);
    // Too short to confirm a full window.
    CHECK(!minsum::convergence_time(std::vector<double>(10, 0.0), 1e-4).has_value());
    CHECK(!minsum::convergence_time(std::vector<double>(40, 1.0), 1e-4).has_value());
}

TEST_CASE("empirical rate on a clean geometric decay") {
    std::vector<double> errors;
    for (int t = 0; t <= 60; ++t) errors.push_back(0.7 * std::pow(0.8, t));
    CHECK(minsum::empirical_rate(errors, 5, 40) == doctest::Approx(0.8).epsilon(1e-12));

    CHECK_THROWS_AS(minsum::empirical_rate(errors, 0, 40), std::invalid_argument);
    CHECK_THROWS_AS(minsum::empirical_rate(errors, 40, 40), std::invalid_argument);
    CHECK_THROWS_AS(minsum::empirical_rate(errors, 5, 61), std::invalid_argument);
    errors[20] = 0.0;
    CHECK_THROWS_AS(minsum::empirical_rate(errors, 5, 40), std::invalid_argument);
}

TEST_CASE("default fit window") {
    std::vector<double> errors;
    for (int t = 0; t <= 100; ++t) errors.push_back(std::pow(0.8, t));
    auto [t0, t1] = minsum::default_fit_window(errors);
    CHECK(t0 == 21);
    CHECK(t1 == 80);

    // The window must stop before the floating point floor.
    errors.clear();
    for (int t = 0; t <= 100; ++t)
        errors.push_back(t < 50 ? std::pow(0.5, t) : 1e-14);
    auto [f0, f1] = minsum::default_fit_window(errors);
    CHECK(f1 < 50);
    CHECK(f0 >= 1);
    CHECK(f1 > f0);

    CHECK_THROWS_AS(minsum::default_fit_window(std::vector<double>{1.0, 0.5}),
                    std::invalid_argument);
}

TEST_CASE("default inputs are deterministic and in range") {
    Eigen::VectorXd a = minsum::default_inputs(1000, 42);
    Eigen::VectorXd b = minsum::default_inputs(1000, 42);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.minCoeff() > 0.05);
    CHECK(a.maxCoeff() < 0.95);
    Eigen::VectorXd c = minsum::default_inputs(1000, 43);
    CHECK((a - c).cwiseAbs().maxCoeff() > 0.0);
    // The draw is usable as problem data directly.
    ProblemData d(a);
    CHECK(d.mean() == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("error bound sequence") {
    Graph g = Graph::cycle(4);
    WeightMatrix w = WeightMatrix::metropolis_hastings(g);
    double rho_w = minsum::second_eigenvalue_magnitude(w);
    double gamma = minsum::optimal_gamma(rho_w);
    int t_max = 40;
    std::vector<double> bounds = minsum::error_bound_sequence(gamma, w, t_max);
    REQUIRE(static_cast<int>(bounds.size()) == t_max + 1);

    // Independent recomputation with a singular value decomposition.
    Eigen::MatrixXd k = minsum::build_k(gamma, w);
    Eigen::MatrixXd k_inf = minsum::build_k_infinity(gamma, 4);
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(8, 8) - k_inf;
    double c = 4.0 * std::sqrt(8.0) / (2.0 - gamma);
    for (int t = 0; t <= t_max; ++t) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(p);
        double expect = c * svd.singularValues()(0) / 2.0;  // sqrt(n) = 2
        CHECK(bounds[t] == doctest::Approx(expect).epsilon(1e-12));
        p = p * (k - k_inf);
    }

    // The tail contracts at the predicted rate (up to the defective-pair
    // polynomial factor).
    double rho_k = minsum::predicted_rho_k(rho_w);
    CHECK(bounds[40] / bounds[39] == doctest::Approx(rho_k).epsilon(0.05));

    CHECK_THROWS_AS(minsum::error_bound_sequence(gamma, w, -1), std::invalid_argument);
}

TEST_CASE("flat-spectrum weights contract in finitely many steps") {
    // With uniform averaging weights the deflated operator is nilpotent:
    // gamma is 1 and every power beyond the first vanishes.
    Graph g = Graph::complete(4);
    Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(4, 4, 0.25);
    WeightMatrix w = WeightMatrix::from_dense(g, uniform);
    double rho_w = minsum::second_eigenvalue_magnitude(w);
    CHECK(std::abs(rho_w) <= 1e-14);
    double gamma = minsum::optimal_gamma(rho_w);
    CHECK(std::abs(gamma - 1.0) <= 1e-14);
    std::vector<double> bounds = minsum::error_bound_sequence(gamma, w, 4);
    CHECK(bounds[1] > 0.0);
    for (int t = 2; t <= 4; ++t) CHECK(bounds[t] <= 1e-13);
}

TEST_CASE("runs record the full error history") {
    Graph g = Graph::cycle(8);
    ProblemData d(minsum::default_inputs(8, 7));
    RunSettings st;
    st.t_max = 300;
    st.eps = 1e-8;
    RunTrace trace = minsum::run_experiment(Algorithm::Diffusion, g, d, st);
    CHECK(trace.meta.status == "converged");
    CHECK(trace.errors[0] == doctest::Approx(minsum::error_norm(d.b, d.mean())).epsilon(1e-15));
    // Early stop leaves exactly the confirming window behind.
    CHECK(static_cast<int>(trace.errors.size()) - 1 == trace.meta.converged_at + 10);
    CHECK(minsum::convergence_time(trace.errors, st.eps) == trace.meta.converged_at);
    CHECK(trace.meta.final_error == trace.errors.back());
    CHECK(trace.meta.algorithm == "diffusion");
    CHECK(trace.bounds.empty());
}

TEST_CASE("accelerated runs carry a valid envelope") {
    Graph g = Graph::cycle(8);
    ProblemData d(minsum::default_inputs(8, 8));
    RunSettings st;
    st.t_max = 200;
    st.eps = 0.0;
    RunTrace trace = minsum::run_experiment(Algorithm::MinsumAux, g, d, st);
    CHECK(trace.meta.status != "failed");
    REQUIRE(trace.bounds.size() == trace.errors.size());
    double root_n = std::sqrt(8.0);
    for (std::size_t t = 0; t < trace.errors.size(); ++t)
        CHECK(trace.errors[t] * root_n <= trace.bounds[t] * root_n + 1e-9);
    CHECK(trace.meta.gamma ==
          doctest::Approx(minsum::optimal_gamma(trace.meta.rho_w)).epsilon(1e-14));
    CHECK(trace.meta.delta == 1.0);
}

TEST_CASE("affine input maps scale both linear methods exactly") {
    Graph g = Graph::cycle(6);
    ProblemData d(minsum::default_inputs(6, 9));
    ProblemData shifted(0.5 * d.b + Eigen::VectorXd::Constant(6, 0.25));
    RunSettings st;
    st.t_max = 60;
    st.eps = 0.0;
    for (Algorithm a : {Algorithm::Diffusion, Algorithm::MinsumAux}) {
        RunTrace base = minsum::run_experiment(a, g, d, st);
        RunTrace scaled = minsum::run_experiment(a, g, shifted, st);
        REQUIRE(base.errors.size() == scaled.errors.size());
        // Relative agreement while the signal dominates, absolute once the
        // trace reaches the rounding plateau.
        for (std::size_t t = 0; t < base.errors.size(); ++t)
            CHECK(std::abs(scaled.errors[t] - 0.5 * base.errors[t]) <=
                  1e-12 * base.errors[t] + 1e-13);
    }
}

TEST_CASE("unit-coupling message passing still averages out slowly") {
    Graph g = Graph::cycle(3);
    ProblemData d(minsum::default_inputs(3, 10));
    RunSettings st;
    st.policy = TuningPolicy::Ordinary;
    st.t_max = 300;
    st.eps = 0.0;
    RunTrace trace = minsum::run_experiment(Algorithm::MinsumEdge, g, d, st);
    CHECK(trace.meta.status == "not-reached");
    // Harmonic-like decay: far slower than geometric but still shrinking.
    // (steps congruent to 1 mod 3 hit the mean exactly on this cycle, so
    // compare against a step that stays off the mean)
    CHECK(trace.errors[300] < 0.1 * trace.errors[5]);
    CHECK(std::isnan(trace.meta.gamma));
}

TEST_CASE("matrix and node-sum protocol runs agree step by step") {
    Graph g = Graph::cycle(5);
    ProblemData d(minsum::default_inputs(5, 11));
    RunSettings st;
    st.t_max = 40;
    st.eps = 0.0;
    RunTrace a = minsum::run_experiment(Algorithm::MinsumEdge, g, d, st);
    RunTrace b = minsum::run_experiment(Algorithm::MinsumGeneric, g, d, st);
    REQUIRE(a.errors.size() == b.errors.size());
    for (std::size_t t = 0; t < a.errors.size(); ++t)
        CHECK(a.errors[t] ==
              doctest::Approx(b.errors[t]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("not reached and failure statuses") {
    Graph g = Graph::cycle(32);
    ProblemData d(minsum::default_inputs(32, 12));
    RunSettings st;
    st.t_max = 50;
    st.eps = 1e-10;
    RunTrace trace = minsum::run_experiment(Algorithm::Diffusion, g, d, st);
    CHECK(trace.meta.status == "not-reached");
    CHECK(trace.meta.converged_at == -1);
    CHECK(trace.errors.size() == 51);

    st.policy = TuningPolicy::ExplicitValues;
    st.gamma = 5.0;
    st.t_max = 2000;
    RunTrace diverged = minsum::run_experiment(Algorithm::HeavyBall, g, d, st);
    CHECK(diverged.meta.status == "failed");
    CHECK(diverged.meta.failure_step > 0);

    st.gamma = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(minsum::run_experiment(Algorithm::HeavyBall, g, d, st),
                    std::invalid_argument);
    RunSettings bad;
    bad.t_max = 0;
    CHECK_THROWS_AS(minsum::run_experiment(Algorithm::Diffusion, g, d, bad),
                    std::invalid_argument);
}

TEST_CASE("trace serialization") {
    Graph g = Graph::cycle(8);
    ProblemData d(minsum::default_inputs(8, 13));
    RunSettings st;
    st.t_max = 120;
    st.eps = 1e-7;
    st.seed = 13;
    RunTrace trace = minsum::run_experiment(Algorithm::MinsumAux, g, d, st);

    auto dir = test_dir();
    auto csv_a = dir / "trace_a.csv";
    auto csv_b = dir / "trace_b.csv";
    minsum::write_trace_csv(trace, csv_a.string());
    RunTrace again = minsum::run_experiment(Algorithm::MinsumAux, g, d, st);
    minsum::write_trace_csv(again, csv_b.string());
    CHECK(slurp(csv_a) == slurp(csv_b));  // byte-identical reruns
    CHECK(!std::filesystem::exists(csv_a.string() + ".tmp"));

    std::istringstream in(slurp(csv_a));
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,error,bound");
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 2);
        CHECK(line.back() != ',');  // envelope column is populated here
    }
    CHECK(rows == static_cast<int>(trace.errors.size()));

    // Without an envelope the third column stays empty.
    RunTrace plain = minsum::run_experiment(Algorithm::Diffusion, g, d, st);
    auto csv_c = dir / "trace_c.csv";
    minsum::write_trace_csv(plain, csv_c.string());
    std::istringstream in2(slurp(csv_c));
    std::getline(in2, line);
    std::getline(in2, line);
    CHECK(line.back() == ',');

    auto j = nlohmann::json::parse(minsum::trace_meta_json(trace));
    CHECK(j["algorithm"] == "minsum-aux");
    CHECK(j["n"] == 8);
    CHECK(j["policy"] == "accelerated");
    CHECK(j["status"] == "converged");
    CHECK(j["seed"] == 13);
    CHECK(j["failure"].is_null());
    CHECK(j["failure_step"].is_null());
    CHECK(j["converged_at"].get<int>() == trace.meta.converged_at);
    CHECK(j["has_bounds"] == true);

    ProblemData other(minsum::default_inputs(8, 14));
    RunTrace different = minsum::run_experiment(Algorithm::MinsumAux, g, other, st);
    auto csv_d = dir / "trace_d.csv";
    minsum::write_trace_csv(different, csv_d.string());
    CHECK(slurp(csv_a) != slurp(csv_d));
}

TEST_CASE("atomic write creates directories and leaves no temp file") {
    auto dir = test_dir() / "nested" / "deeper";
    std::filesystem::remove_all(dir);
    auto file = dir / "x.txt";
    minsum::atomic_write(file.string(), "payload\n");
    CHECK(slurp(file) == "payload\n");
    CHECK(!std::filesystem::exists(file.string() + ".tmp"));
    minsum::atomic_write(file.string(), "replaced\n");
    CHECK(slurp(file) == "replaced\n");
}
