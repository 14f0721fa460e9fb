#include "minsum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "minsum/errors.hpp"

namespace minsum {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

double op_norm(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.transpose() * m);
    if (solver.info() != Eigen::Success)
        throw NumericalError("singular value solve failed");
    return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

nlohmann::ordered_json json_or_null(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

}  // namespace

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "diffusion") return Algorithm::Diffusion;
    if (name == "heavy-ball") return Algorithm::HeavyBall;
    if (name == "nesterov") return Algorithm::Nesterov;
    if (name == "shift-register") return Algorithm::ShiftRegister;
    if (name == "minsum-edge") return Algorithm::MinsumEdge;
    if (name == "minsum-generic") return Algorithm::MinsumGeneric;
    if (name == "minsum-aux") return Algorithm::MinsumAux;
    throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::Diffusion: return "diffusion";
        case Algorithm::HeavyBall: return "heavy-ball";
        case Algorithm::Nesterov: return "nesterov";
        case Algorithm::ShiftRegister: return "shift-register";
        case Algorithm::MinsumEdge: return "minsum-edge";
        case Algorithm::MinsumGeneric: return "minsum-generic";
        case Algorithm::MinsumAux: return "minsum-aux";
    }
    throw std::invalid_argument("unknown algorithm value");
}

const std::vector<Algorithm>& all_algorithms() {
    static const std::vector<Algorithm> all = {
        Algorithm::Diffusion,     Algorithm::HeavyBall,  Algorithm::Nesterov,
        Algorithm::ShiftRegister, Algorithm::MinsumEdge, Algorithm::MinsumGeneric,
        Algorithm::MinsumAux,
    };
    return all;
}

TuningPolicy policy_from_name(const std::string& name) {
    if (name == "accelerated") return TuningPolicy::Accelerated;
    if (name == "ordinary") return TuningPolicy::Ordinary;
    if (name == "explicit") return TuningPolicy::ExplicitValues;
    throw std::invalid_argument("unknown tuning policy: " + name);
}

std::string to_string(TuningPolicy p) {
    switch (p) {
        case TuningPolicy::Accelerated: return "accelerated";
        case TuningPolicy::Ordinary: return "ordinary";
        case TuningPolicy::ExplicitValues: return "explicit";
    }
    throw std::invalid_argument("unknown policy value");
}

double error_norm(const Eigen::VectorXd& x, double mean) {
    return (x.array() - mean).matrix().norm() / std::sqrt(static_cast<double>(x.size()));
}

std::vector<double> error_bound_sequence(double gamma, const WeightMatrix& w, int t_max) {
    if (t_max < 0) throw std::invalid_argument("t_max must be nonnegative");
    int n = w.size();
    Eigen::MatrixXd k = build_k(gamma, w);
    Eigen::MatrixXd k_inf = build_k_infinity(gamma, n);
    Eigen::MatrixXd decay = k - k_inf;
    // Powers start from the projector complement so the t = 0 entry covers
    // the initial error as well.
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(2 * n, 2 * n) - k_inf;
    double c = 4.0 * std::sqrt(2.0 * n) / (2.0 - gamma);
    double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> out;
    out.reserve(t_max + 1);
    out.push_back(c * op_norm(p) / root_n);
    for (int t = 1; t <= t_max; ++t) {
        p = p * decay;
        out.push_back(c * op_norm(p) / root_n);
    }
    return out;
}

std::optional<int> convergence_time(const std::vector<double>& errors, double eps) {
    int last = static_cast<int>(errors.size()) - 1;
    for (int t = 0; t + 10 <= last; ++t) {
        bool ok = true;
        for (int s = t; s <= t + 10; ++s)
            if (!(errors[s] <= eps)) {
                ok = false;
                break;
            }
        if (ok) return t;
    }
    return std::nullopt;
}

double empirical_rate(const std::vector<double>& errors, int t0, int t1) {
    if (!(t0 >= 1 && t1 > t0 && t1 < static_cast<int>(errors.size())))
        throw std::invalid_argument("fit window must satisfy 1 <= t0 < t1 within the trace");
    double n = 0.0, st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    for (int t = t0; t <= t1; ++t) {
        if (!(errors[t] > 0.0) || !std::isfinite(errors[t]))
            throw std::invalid_argument("fit window requires positive finite errors");
        double y = std::log(errors[t]);
        n += 1.0;
        st += t;
        sy += y;
        stt += static_cast<double>(t) * t;
        sty += t * y;
    }
    double denom = n * stt - st * st;
    return std::exp((n * sty - st * sy) / denom);
}

std::pair<int, int> default_fit_window(const std::vector<double>& errors) {
    const double floor = 1e-13;
    int last = static_cast<int>(errors.size()) - 1;
    int t_end = 0;
    for (int t = 1; t <= last; ++t) {
        if (!(errors[t] > floor)) break;
        t_end = t;
    }
    if (t_end < 3) throw std::invalid_argument("trace too short to pick a fit window");
    int span = t_end - 1;
    int t0 = 1 + static_cast<int>(std::lround(0.2 * span));
    int t1 = 1 + static_cast<int>(std::lround(0.8 * span));
    if (t1 <= t0) {
        t0 = 1;
        t1 = t_end;
    }
    return {t0, t1};
}

Eigen::VectorXd default_inputs(int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("n must be positive");
    std::mt19937_64 rng(seed);
    Eigen::VectorXd b(n);
    for (int i = 0; i < n; ++i) b(i) = 0.05 + 0.9 * uniform01(rng);
    return b;
}

namespace {

// Resolved tuning for one run.
struct Tuning {
    double gamma = std::numeric_limits<double>::quiet_NaN();  // coupling scale
    double momentum = std::numeric_limits<double>::quiet_NaN();  // two-step constant
    double delta = std::numeric_limits<double>::quiet_NaN();
    double rho_w = std::numeric_limits<double>::quiet_NaN();
};

Tuning resolve_tuning(Algorithm algo, TuningPolicy policy, const RunSettings& st,
                      const WeightMatrix& w) {
    Tuning t;
    bool two_step = algo == Algorithm::HeavyBall || algo == Algorithm::Nesterov ||
                    algo == Algorithm::ShiftRegister;
    bool splitting = algo == Algorithm::MinsumEdge || algo == Algorithm::MinsumGeneric ||
                     algo == Algorithm::MinsumAux;
    switch (policy) {
        case TuningPolicy::Accelerated: {
            t.rho_w = second_eigenvalue_magnitude(w);
            double g = optimal_gamma(t.rho_w);
            if (two_step) {
                // The two-step methods take the optimal constant shifted by
                // one; the shift-register update with this momentum has the
                // same spectrum as the accelerated node recursion.
                t.momentum = g - 1.0;
            } else if (splitting) {
                t.gamma = g;
                t.delta = 1.0;
            }
            break;
        }
        case TuningPolicy::Ordinary:
            if (two_step) t.momentum = 0.0;
            if (splitting) t.delta = 1.0;
            break;
        case TuningPolicy::ExplicitValues:
            if (algo != Algorithm::Diffusion && !std::isfinite(st.gamma))
                throw std::invalid_argument("explicit tuning requires a finite gamma");
            if (two_step) t.momentum = st.gamma;
            if (splitting) {
                if (st.delta == 0.0) throw std::invalid_argument("delta must be nonzero");
                t.gamma = st.gamma;
                t.delta = st.delta;
            }
            break;
    }
    return t;
}

}  // namespace

RunTrace run_experiment(Algorithm algo, const Graph& g, const ProblemData& data,
                        const RunSettings& settings) {
    if (settings.t_max < 1) throw std::invalid_argument("t_max must be at least 1");
    if (!(settings.eps >= 0.0)) throw std::invalid_argument("eps must be nonnegative");
    int n = g.node_count();
    if (data.b.size() != n) throw std::invalid_argument("inputs must match the graph size");

    WeightMatrix w = WeightMatrix::metropolis_hastings(g);
    Tuning tuning = resolve_tuning(algo, settings.policy, settings, w);

    RunTrace trace;
    RunMeta& meta = trace.meta;
    meta.algorithm = to_string(algo);
    meta.n = n;
    meta.policy = to_string(settings.policy);
    meta.delta = tuning.delta;
    meta.gamma = std::isnan(tuning.gamma) ? tuning.momentum : tuning.gamma;
    meta.rho_w = tuning.rho_w;
    meta.eps = settings.eps;
    meta.t_max = settings.t_max;
    meta.seed = settings.seed;

    double target = data.mean();
    auto& errors = trace.errors;
    errors.reserve(settings.t_max + 1);

    int run_below = 0;
    // Returns true once the trailing window [t-10, t] sits at or below eps.
    auto record = [&](const Eigen::VectorXd& x) {
        double e = error_norm(x, target);
        errors.push_back(e);
        run_below = e <= settings.eps ? run_below + 1 : 0;
        if (run_below >= 11) {
            meta.status = "converged";
            meta.converged_at = static_cast<int>(errors.size()) - 11;
            return true;
        }
        return false;
    };

    auto fail = [&](const NumericalError& err, int step) {
        meta.status = "failed";
        meta.failure = err.what();
        meta.failure_step = err.step() >= 0 ? err.step() : step;
    };

    try {
        switch (algo) {
            case Algorithm::Diffusion: {
                Eigen::VectorXd x = data.b;
                if (!record(x))
                    for (int t = 1; t <= settings.t_max; ++t) {
                        x = diffusion_step(w, x);
                        if (!x.allFinite())
                            throw NumericalError("iterate left the finite range at step " +
                                                     std::to_string(t),
                                                 t);
                        if (record(x)) break;
                    }
                break;
            }
            case Algorithm::HeavyBall:
            case Algorithm::Nesterov:
            case Algorithm::ShiftRegister: {
                TwoStepState s = warm_start(data.b);
                if (!record(s.curr))
                    for (int t = 1; t <= settings.t_max; ++t) {
                        if (algo == Algorithm::HeavyBall)
                            heavy_ball_step(s, w, tuning.momentum);
                        else if (algo == Algorithm::Nesterov)
                            nesterov_step(s, w, tuning.momentum);
                        else
                            shift_register_step(s, w, tuning.momentum);
                        if (!s.curr.allFinite())
                            throw NumericalError("iterate left the finite range at step " +
                                                     std::to_string(t),
                                                 t);
                        if (record(s.curr)) break;
                    }
                break;
            }
            case Algorithm::MinsumEdge:
            case Algorithm::MinsumGeneric: {
                SplittingParams params =
                    settings.policy == TuningPolicy::Ordinary
                        ? SplittingParams::ordinary(g)
                        : SplittingParams::from_weight(tuning.delta, w, tuning.gamma);
                EdgeProtocol protocol(g, params, data);
                EdgeState s = zero_edge_state(protocol.index().size());
                if (!record(protocol.output(s)))
                    for (int t = 1; t <= settings.t_max; ++t) {
                        if (algo == Algorithm::MinsumEdge)
                            protocol.step(s);
                        else
                            protocol.generic_step(s);
                        if (record(protocol.output(s))) break;
                    }
                break;
            }
            case Algorithm::MinsumAux: {
                AuxOperator op =
                    settings.policy == TuningPolicy::Ordinary
                        ? AuxOperator::from_params(SplittingParams::ordinary(g))
                        : AuxOperator::with_weight(tuning.delta, tuning.gamma, w);
                NodeState s = initial_node_state(data);
                if (!record(aux_output(s)))
                    for (int t = 1; t <= settings.t_max; ++t) {
                        aux_step(s, op);
                        if (record(aux_output(s))) break;
                    }
                break;
            }
        }
    } catch (const NumericalError& err) {
        fail(err, static_cast<int>(errors.size()));
    }

    if (meta.status.empty()) meta.status = "not-reached";
    if (!errors.empty()) meta.final_error = errors.back();

    // The accelerated node recursion admits a computable contraction
    // envelope; record it alongside the trace and flag any violation.
    if (algo == Algorithm::MinsumAux && settings.policy == TuningPolicy::Accelerated &&
        n <= 64 && meta.status != "failed" && !errors.empty()) {
        int recorded = static_cast<int>(errors.size()) - 1;
        trace.bounds = error_bound_sequence(tuning.gamma, w, recorded);
        double root_n = std::sqrt(static_cast<double>(n));
        for (int t = 0; t <= recorded; ++t) {
            if (errors[t] * root_n > trace.bounds[t] * root_n + 1e-9) {
                meta.status = "failed";
                meta.failure = "error exceeded the contraction envelope at step " +
                               std::to_string(t);
                meta.failure_step = t;
                break;
            }
        }
    }

    return trace;
}

void atomic_write(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    fs::rename(tmp, target);
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ostringstream out;
    out << "t,error,bound\n";
    for (std::size_t t = 0; t < trace.errors.size(); ++t) {
        out << t << "," << format_double(trace.errors[t]) << ",";
        if (t < trace.bounds.size()) out << format_double(trace.bounds[t]);
        out << "\n";
    }
    atomic_write(path, out.str());
}

std::string trace_meta_json(const RunTrace& trace) {
    const RunMeta& m = trace.meta;
    nlohmann::ordered_json j;
    j["algorithm"] = m.algorithm;
    j["n"] = m.n;
    j["policy"] = m.policy;
    j["delta"] = json_or_null(m.delta);
    j["gamma"] = json_or_null(m.gamma);
    j["rho_w"] = json_or_null(m.rho_w);
    j["eps"] = m.eps;
    j["t_max"] = m.t_max;
    j["seed"] = m.seed;
    j["status"] = m.status;
    j["converged_at"] =
        m.converged_at >= 0 ? nlohmann::ordered_json(m.converged_at) : nullptr;
    j["failure"] = m.failure.empty() ? nlohmann::ordered_json(nullptr)
                                     : nlohmann::ordered_json(m.failure);
    j["failure_step"] =
        m.failure_step >= 0 ? nlohmann::ordered_json(m.failure_step) : nullptr;
    j["final_error"] = json_or_null(m.final_error);
    j["steps_recorded"] = trace.errors.empty() ? 0 : trace.errors.size() - 1;
    j["has_bounds"] = !trace.bounds.empty();
    return j.dump(2) + "\n";
}

}  // namespace minsum
