#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "minsum/auxiliary.hpp"
#include "minsum/baselines.hpp"
#include "minsum/graph.hpp"
#include "minsum/spectral.hpp"
#include "minsum/splitting.hpp"

namespace minsum {

enum class Algorithm {
    Diffusion,
    HeavyBall,
    Nesterov,
    ShiftRegister,
    MinsumEdge,
    MinsumGeneric,
    MinsumAux,
};

// Names used on the command line and in reports: diffusion, heavy-ball,
// nesterov, shift-register, minsum-edge, minsum-generic, minsum-aux.
Algorithm algorithm_from_name(const std::string& name);
std::string to_string(Algorithm a);
const std::vector<Algorithm>& all_algorithms();

// accelerated: tuning constants from the spectral gap of the diffusion
//   matrix (two-step methods get the optimal constant minus one, the
//   splitting methods get delta 1 with couplings gamma W).
// ordinary: unit couplings with delta 1, or momentum zero.
// explicit_values: user-supplied gamma and delta taken literally.
enum class TuningPolicy { Accelerated, Ordinary, ExplicitValues };

TuningPolicy policy_from_name(const std::string& name);
std::string to_string(TuningPolicy p);

struct RunSettings {
    TuningPolicy policy = TuningPolicy::Accelerated;
    double gamma = std::numeric_limits<double>::quiet_NaN();  // explicit policy only
    double delta = 1.0;                                       // explicit policy only
    int t_max = 1000;
    double eps = 1e-6;
    std::uint64_t seed = 1;  // carried into the metadata, not used by the run
};

struct RunMeta {
    std::string algorithm;
    int n = 0;
    std::string policy;
    double delta = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double rho_w = std::numeric_limits<double>::quiet_NaN();
    double eps = 0.0;
    int t_max = 0;
    std::uint64_t seed = 0;
    std::string status;  // converged | not-reached | failed
    int converged_at = -1;
    std::string failure;
    int failure_step = -1;
    double final_error = std::numeric_limits<double>::quiet_NaN();
};

struct RunTrace {
    std::vector<double> errors;  // one entry per step, starting at t = 0
    std::vector<double> bounds;  // parallel to errors when recorded, else empty
    RunMeta meta;
};

// ||x - mean 1||_2 / sqrt(n)
double error_norm(const Eigen::VectorXd& x, double mean);

// Envelope (4 sqrt(2n) / (2 - gamma)) ||(K - Kinf)^t||_2 / sqrt(n) for
// t = 0..t_max, with the t = 0 factor taken as I - Kinf.  Dense, n <= 64.
std::vector<double> error_bound_sequence(double gamma, const WeightMatrix& w, int t_max);

// First t whose full window [t, t+10] stays at or below eps; the window must
// fit inside the trace.  nullopt when no such t exists.
std::optional<int> convergence_time(const std::vector<double>& errors, double eps);

// exp(slope) of a least-squares line through (t, log error) on [t0, t1].
// Requires 1 <= t0 < t1 within the trace and positive errors on the window.
double empirical_rate(const std::vector<double>& errors, int t0, int t1);

// Middle 60 percent of the usable segment: steps 1..t_end, where t_end stops
// before the first error at or below 1e-13 (floating point floor).
std::pair<int, int> default_fit_window(const std::vector<double>& errors);

// Deterministic inputs in (0.05, 0.95): entry i is 0.05 + 0.9 u_i with u_i
// drawn from mt19937_64(seed) as (x >> 11) * 2^-53.
Eigen::VectorXd default_inputs(int n, std::uint64_t seed);

// Runs one algorithm on one graph, recording the consensus error at every
// step (t = 0 included).  Stops early once convergence holds for a full
// window, converts numerical failures into a failed status instead of
// throwing, and for the accelerated node recursion on graphs up to 64 nodes
// also records and checks the predicted error envelope.
RunTrace run_experiment(Algorithm algo, const Graph& g, const ProblemData& data,
                        const RunSettings& settings);

// Write-to-temp-then-rename; creates parent directories.
void atomic_write(const std::string& path, const std::string& content);

// Round-trip safe rendering (%.17g), used by every CSV writer.
std::string format_double(double v);

// CSV with header "t,error,bound"; the bound column stays empty when the
// trace carries no envelope.  Doubles are printed with %.17g.
void write_trace_csv(const RunTrace& trace, const std::string& path);

std::string trace_meta_json(const RunTrace& trace);

}  // namespace minsum
