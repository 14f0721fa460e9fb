#include "minsum/harness.hpp"

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "minsum/errors.hpp"
#include "minsum/spectral.hpp"

namespace minsum {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad integer for " + key + ": " + value);
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad number for " + key + ": " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("bad seed for " + key + ": " + value);
    }
}

std::vector<int> parse_int_list(const std::string& spec) {
    std::vector<int> out;
    for (const auto& item : split_list(spec)) out.push_back(parse_int("n", item));
    if (out.empty()) throw std::invalid_argument("empty n list");
    return out;
}

std::string sanitize(const std::string& s) {
    std::string out;
    for (char c : s)
        out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
                c == '.')
                   ? c
                   : '_';
    return out;
}

std::uint64_t cell_seed(std::uint64_t seed, int n) {
    return seed ^ (static_cast<std::uint64_t>(n) * 0x9e3779b97f4a7c15ULL);
}

RunSettings settings_from(const HarnessOptions& opt) {
    RunSettings st;
    st.policy = policy_from_name(opt.policy);
    st.gamma = opt.gamma;
    st.delta = opt.delta;
    st.t_max = opt.t_max;
    st.eps = opt.eps;
    st.seed = opt.seed;
    return st;
}

std::filesystem::path out_path(const HarnessOptions& opt, const std::string& name) {
    return std::filesystem::path(opt.out_dir) / name;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is not 'key = value'");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        " is missing a key or value");
        out.emplace_back(key, value);
    }
    return out;
}

Graph build_graph(const HarnessOptions& opt, int n) {
    if (opt.graph_kind == "cycle") return Graph::cycle(n);
    if (opt.graph_kind == "complete") return Graph::complete(n);
    if (opt.graph_kind == "torus") return Graph::torus(opt.side, opt.dim);
    if (opt.graph_kind == "rgg") return Graph::random_geometric(n, opt.radius, opt.seed);
    if (opt.graph_kind == "file") {
        if (opt.graph_file.empty())
            throw std::invalid_argument("--graph file requires --graph-file");
        return load_edge_list(opt.graph_file);
    }
    throw std::invalid_argument("unknown graph kind: " + opt.graph_kind);
}

std::string graph_label(const HarnessOptions& opt, int n) {
    if (opt.graph_kind == "cycle") return "cycle_" + std::to_string(n);
    if (opt.graph_kind == "complete") return "complete_" + std::to_string(n);
    if (opt.graph_kind == "torus")
        return "torus_s" + std::to_string(opt.side) + "_d" + std::to_string(opt.dim);
    if (opt.graph_kind == "rgg") {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "rgg_n%d_r%g_s%llu", n, opt.radius,
                      static_cast<unsigned long long>(opt.seed));
        return buf;
    }
    return "file_" + sanitize(std::filesystem::path(opt.graph_file).stem().string());
}

int cmd_spectra(const HarnessOptions& opt) {
    Graph g = build_graph(opt, opt.n_list.at(0));
    std::string label = graph_label(opt, opt.n_list.at(0));
    SpectralReport report = spectral_report(g);
    std::printf("graph = %s\n", label.c_str());
    std::printf("n = %d\n", report.n);
    std::printf("rho_w = %.12g\n", report.rho_w);
    std::printf("gamma = %.12g\n", report.gamma);
    std::printf("rho_k_predicted = %.12g\n", report.rho_k_predicted);
    std::printf("diffusive_time_scale = %.12g\n", report.diffusive_time_scale);
    std::printf("accelerated_time_scale = %.12g\n", report.accelerated_time_scale);
    auto path = out_path(opt, "spectra_" + label + ".json");
    atomic_write(path.string(), to_json(report));
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

int cmd_run(const HarnessOptions& opt) {
    Graph g = build_graph(opt, opt.n_list.at(0));
    std::string label = graph_label(opt, opt.n_list.at(0));
    ProblemData data(default_inputs(g.node_count(), opt.seed));
    RunSettings st = settings_from(opt);

    nlohmann::ordered_json summary;
    summary["graph"] = label;
    summary["n"] = g.node_count();
    summary["policy"] = opt.policy;
    summary["seed"] = opt.seed;
    summary["t_max"] = opt.t_max;
    summary["eps"] = opt.eps;
    nlohmann::ordered_json per_algo = nlohmann::ordered_json::object();

    std::map<std::string, int> times;
    for (const auto& name : opt.algos) {
        Algorithm algo = algorithm_from_name(name);
        RunTrace trace = run_experiment(algo, g, data, st);
        auto csv = out_path(opt, "trace_" + label + "_" + name + ".csv");
        write_trace_csv(trace, csv.string());
        atomic_write(out_path(opt, "trace_" + label + "_" + name + ".json").string(),
                     trace_meta_json(trace));

        nlohmann::ordered_json entry;
        entry["status"] = trace.meta.status;
        entry["converged_at"] = trace.meta.converged_at >= 0
                                    ? nlohmann::ordered_json(trace.meta.converged_at)
                                    : nullptr;
        entry["final_error"] = trace.meta.final_error;
        double rate = std::numeric_limits<double>::quiet_NaN();
        try {
            auto [t0, t1] = default_fit_window(trace.errors);
            rate = empirical_rate(trace.errors, t0, t1);
        } catch (const std::invalid_argument&) {
        }
        entry["fitted_rate"] = std::isnan(rate) ? nlohmann::ordered_json(nullptr)
                                                : nlohmann::ordered_json(rate);
        if (trace.meta.status == "failed") entry["failure"] = trace.meta.failure;
        per_algo[name] = entry;

        if (trace.meta.status == "converged") times[name] = trace.meta.converged_at;
        if (trace.meta.status == "failed")
            std::printf("%s: failed (%s)\n", name.c_str(), trace.meta.failure.c_str());
        else if (trace.meta.status == "converged")
            std::printf("%s: converged at t=%d (final error %.3g)\n", name.c_str(),
                        trace.meta.converged_at, trace.meta.final_error);
        else
            std::printf("%s: eps not reached within %d steps (final error %.3g)\n",
                        name.c_str(), opt.t_max, trace.meta.final_error);
    }
    summary["algorithms"] = per_algo;

    // Headline comparison when both reference methods finished.
    if (times.count("diffusion") && times.count("minsum-aux") && times["minsum-aux"] > 0) {
        double ratio = static_cast<double>(times["diffusion"]) / times["minsum-aux"];
        summary["diffusion_to_splitting_time_ratio"] = ratio;
        std::printf("diffusion/splitting convergence time ratio: %.3g\n", ratio);
    } else {
        summary["diffusion_to_splitting_time_ratio"] = nullptr;
    }

    auto path = out_path(opt, "summary.json");
    atomic_write(path.string(), summary.dump(2) + "\n");
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

namespace {

struct SweepRow {
    int n = 0;
    int diameter = 0;
    double rho_w = std::numeric_limits<double>::quiet_NaN();
    double rho_k = std::numeric_limits<double>::quiet_NaN();
    int t_diffusion = -1;
    int t_splitting = -1;
    std::string note;
};

SweepRow sweep_cell(const HarnessOptions& opt, int n) {
    SweepRow row;
    row.n = n;
    Graph g = build_graph(opt, n);
    row.diameter = g.diameter();
    SpectralReport report = spectral_report(g);
    row.rho_w = report.rho_w;
    row.rho_k = report.rho_k_predicted;

    RunSettings st = settings_from(opt);
    st.seed = cell_seed(opt.seed, n);
    ProblemData data(default_inputs(g.node_count(), st.seed));
    RunTrace diffusion = run_experiment(Algorithm::Diffusion, g, data, st);
    RunTrace splitting = run_experiment(Algorithm::MinsumAux, g, data, st);
    row.t_diffusion = diffusion.meta.converged_at;
    row.t_splitting = splitting.meta.converged_at;
    if (diffusion.meta.status == "failed") row.note = "diffusion: " + diffusion.meta.failure;
    if (splitting.meta.status == "failed") {
        if (!row.note.empty()) row.note += "; ";
        row.note += "minsum-aux: " + splitting.meta.failure;
    }
    return row;
}

}  // namespace

int cmd_sweep(const HarnessOptions& opt) {
    if (opt.graph_kind != "cycle" && opt.graph_kind != "complete")
        throw std::invalid_argument("sweep varies n; use --graph cycle or complete");
    for (int n : opt.n_list)
        if (n < (opt.graph_kind == "cycle" ? 3 : 2))
            throw std::invalid_argument("n too small for the chosen graph: " +
                                        std::to_string(n));

    std::vector<std::future<SweepRow>> futures;
    futures.reserve(opt.n_list.size());
    for (int n : opt.n_list)
        futures.push_back(
            std::async(std::launch::async, [&opt, n] { return sweep_cell(opt, n); }));

    std::vector<SweepRow> rows;
    rows.reserve(futures.size());
    for (std::size_t i = 0; i < futures.size(); ++i) {
        try {
            rows.push_back(futures[i].get());
        } catch (const NumericalError& e) {
            SweepRow row;
            row.n = opt.n_list[i];
            row.note = e.what();
            rows.push_back(row);
        }
    }

    std::ostringstream csv;
    csv << "n,D,rho_w,rho_k,t_diffusion,t_splitting\n";
    std::printf("%8s %6s %12s %12s %12s %12s\n", "n", "D", "rho_w", "rho_k",
                "t_diffusion", "t_splitting");
    for (const auto& row : rows) {
        csv << row.n << "," << row.diameter << "," << format_double(row.rho_w) << ","
            << format_double(row.rho_k) << "," << row.t_diffusion << ","
            << row.t_splitting << "\n";
        std::printf("%8d %6d %12.8f %12.8f %12d %12d\n", row.n, row.diameter, row.rho_w,
                    row.rho_k, row.t_diffusion, row.t_splitting);
        if (!row.note.empty()) std::fprintf(stderr, "n=%d: %s\n", row.n, row.note.c_str());
    }
    auto path = out_path(opt, "sweep.csv");
    atomic_write(path.string(), csv.str());
    std::printf("wrote %s\n", path.string().c_str());
    return 0;
}

namespace {

void apply_config_value(HarnessOptions& opt, std::string& n_spec, std::string& algo_spec,
                        const std::string& key, const std::string& value) {
    if (key == "graph")
        opt.graph_kind = value;
    else if (key == "n")
        n_spec = value;
    else if (key == "side")
        opt.side = parse_int(key, value);
    else if (key == "dim")
        opt.dim = parse_int(key, value);
    else if (key == "radius")
        opt.radius = parse_double(key, value);
    else if (key == "graph-file")
        opt.graph_file = value;
    else if (key == "algos")
        algo_spec = value;
    else if (key == "policy")
        opt.policy = value;
    else if (key == "gamma")
        opt.gamma = parse_double(key, value);
    else if (key == "delta")
        opt.delta = parse_double(key, value);
    else if (key == "tmax")
        opt.t_max = parse_int(key, value);
    else if (key == "eps")
        opt.eps = parse_double(key, value);
    else if (key == "seed")
        opt.seed = parse_u64(key, value);
    else if (key == "out")
        opt.out_dir = value;
    else
        throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    HarnessOptions opt;
    std::string config_path, n_spec, algo_spec;

    CLI::App app{"min-sum splitting consensus: spectra, single runs and size sweeps"};
    app.add_option("command", opt.command, "spectra, run or sweep")
        ->required()
        ->check(CLI::IsMember({"spectra", "run", "sweep"}));
    app.add_option("--config", config_path, "defaults file with 'key = value' lines");
    std::map<std::string, CLI::Option*> flags;
    flags["graph"] = app.add_option("--graph", opt.graph_kind, "cycle, torus, complete, rgg or file")
                         ->check(CLI::IsMember({"cycle", "torus", "complete", "rgg", "file"}));
    flags["n"] = app.add_option("--n", n_spec, "node count; comma list for sweep");
    flags["side"] = app.add_option("--side", opt.side, "torus side length");
    flags["dim"] = app.add_option("--dim", opt.dim, "torus dimension (1, 2 or 3)");
    flags["radius"] = app.add_option("--radius", opt.radius, "connection radius for rgg");
    flags["graph-file"] = app.add_option("--graph-file", opt.graph_file, "edge list path for --graph file");
    flags["algos"] = app.add_option("--algos", algo_spec, "comma list of algorithms, or 'all'");
    flags["policy"] = app.add_option("--policy", opt.policy, "accelerated, ordinary or explicit")
                          ->check(CLI::IsMember({"accelerated", "ordinary", "explicit"}));
    flags["gamma"] = app.add_option("--gamma", opt.gamma, "coupling or momentum constant (explicit policy)");
    flags["delta"] = app.add_option("--delta", opt.delta, "splitting constant (explicit policy)");
    flags["tmax"] = app.add_option("--tmax", opt.t_max, "step budget (default 1000; sweep 20000)");
    flags["eps"] = app.add_option("--eps", opt.eps, "convergence threshold (default 1e-6; sweep 1e-4)");
    flags["seed"] = app.add_option("--seed", opt.seed, "seed for inputs and graph draws");
    flags["out"] = app.add_option("--out", opt.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (!config_path.empty())
            for (const auto& [key, value] : parse_config_file(config_path)) {
                auto it = flags.find(key);
                if (it == flags.end())
                    throw std::invalid_argument("unknown config key: " + key);
                if (it->second->count() > 0) continue;  // explicit flags win
                apply_config_value(opt, n_spec, algo_spec, key, value);
            }

        if (opt.graph_kind != "cycle" && opt.graph_kind != "torus" &&
            opt.graph_kind != "complete" && opt.graph_kind != "rgg" &&
            opt.graph_kind != "file")
            throw std::invalid_argument("unknown graph kind: " + opt.graph_kind);
        policy_from_name(opt.policy);

        if (!n_spec.empty()) opt.n_list = parse_int_list(n_spec);
        if (!algo_spec.empty()) {
            if (algo_spec == "all") {
                opt.algos.clear();
                for (Algorithm a : all_algorithms()) opt.algos.push_back(to_string(a));
            } else {
                opt.algos = split_list(algo_spec);
                if (opt.algos.empty()) throw std::invalid_argument("empty algorithm list");
            }
        }
        for (const auto& name : opt.algos) algorithm_from_name(name);

        if (opt.t_max < 0) opt.t_max = opt.command == "sweep" ? 20000 : 1000;
        if (opt.eps < 0.0) opt.eps = opt.command == "sweep" ? 1e-4 : 1e-6;
        if (opt.command != "sweep" && opt.n_list.size() != 1)
            throw std::invalid_argument("--n takes a single value for " + opt.command);

        if (opt.command == "spectra") return cmd_spectra(opt);
        if (opt.command == "run") return cmd_run(opt);
        return cmd_sweep(opt);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace minsum
