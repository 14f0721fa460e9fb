#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "minsum/analysis.hpp"
#include "minsum/graph.hpp"

namespace minsum {

// Effective options for one CLI invocation, after merging defaults, the
// optional config file and explicit flags (flags win over the file).
struct HarnessOptions {
    std::string command;  // spectra | run | sweep
    std::string graph_kind = "cycle";
    std::vector<int> n_list = {16};
    int side = 4;
    int dim = 2;
    double radius = 0.3;
    std::string graph_file;
    std::vector<std::string> algos = {"diffusion", "minsum-aux"};
    std::string policy = "accelerated";
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double delta = 1.0;
    int t_max = -1;    // -1 picks the command default (1000; sweep 20000)
    double eps = -1.0;  // -1 picks the command default (1e-6; sweep 1e-4)
    std::uint64_t seed = 1;
    std::string out_dir = "out";
};

// Lines of "key = value"; '#' starts a comment, blank lines are skipped.
// Keys use the long flag spellings without the leading dashes.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path);

Graph build_graph(const HarnessOptions& opt, int n);
std::string graph_label(const HarnessOptions& opt, int n);

int cmd_spectra(const HarnessOptions& opt);
int cmd_run(const HarnessOptions& opt);
int cmd_sweep(const HarnessOptions& opt);

// Full command line entry point; returns the process exit code
// (0 success, 1 usage or configuration error, 2 numerical failure).
int run_cli(int argc, const char* const* argv);

}  // namespace minsum
