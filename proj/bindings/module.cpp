#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "minsum/analysis.hpp"
#include "minsum/auxiliary.hpp"
#include "minsum/baselines.hpp"
#include "minsum/errors.hpp"
#include "minsum/graph.hpp"
#include "minsum/harness.hpp"
#include "minsum/spectral.hpp"
#include "minsum/splitting.hpp"

namespace py = pybind11;
using namespace minsum;

namespace {

RunSettings make_settings(const std::string& policy, double gamma, double delta,
                          int t_max, double eps, std::uint64_t seed) {
    RunSettings st;
    st.policy = policy_from_name(policy);
    st.gamma = gamma;
    st.delta = delta;
    st.t_max = t_max;
    st.eps = eps;
    st.seed = seed;
    return st;
}

py::dict trace_to_dict(const RunTrace& trace) {
    py::dict meta;
    const RunMeta& m = trace.meta;
    meta["algorithm"] = m.algorithm;
    meta["n"] = m.n;
    meta["policy"] = m.policy;
    meta["delta"] = m.delta;
    meta["gamma"] = m.gamma;
    meta["rho_w"] = m.rho_w;
    meta["eps"] = m.eps;
    meta["t_max"] = m.t_max;
    meta["seed"] = m.seed;
    meta["status"] = m.status;
    meta["converged_at"] = m.converged_at;
    meta["failure"] = m.failure;
    meta["failure_step"] = m.failure_step;
    meta["final_error"] = m.final_error;
    py::dict out;
    out["errors"] = trace.errors;
    out["bounds"] = trace.bounds.empty() ? py::object(py::none()) : py::cast(trace.bounds);
    out["meta"] = meta;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "consensus by min-sum splitting: graphs, spectra, protocols, runs";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

    py::class_<Graph>(m, "Graph")
        .def_static("cycle", &Graph::cycle, py::arg("n"))
        .def_static("complete", &Graph::complete, py::arg("n"))
        .def_static("torus", &Graph::torus, py::arg("side"), py::arg("dim"))
        .def_static("random_geometric", &Graph::random_geometric, py::arg("n"),
                    py::arg("radius"), py::arg("seed"))
        .def_static("from_edges", &Graph::from_edges, py::arg("n"), py::arg("edges"))
        .def_property_readonly("node_count", &Graph::node_count)
        .def_property_readonly("edge_count", &Graph::edge_count)
        .def("edges", &Graph::edges)
        .def("neighbors", &Graph::neighbors, py::arg("v"))
        .def("degree", &Graph::degree, py::arg("v"))
        .def("max_degree", &Graph::max_degree)
        .def("adjacent", &Graph::adjacent, py::arg("u"), py::arg("v"))
        .def("diameter", &Graph::diameter);

    m.def("load_edge_list", &load_edge_list, py::arg("path"));
    m.def("save_edge_list", &save_edge_list, py::arg("graph"), py::arg("path"));

    py::class_<DirectedEdgeIndex>(m, "DirectedEdgeIndex")
        .def(py::init<const Graph&>(), py::arg("graph"))
        .def_property_readonly("size", &DirectedEdgeIndex::size)
        .def("pairs", &DirectedEdgeIndex::pairs)
        .def("tail", &DirectedEdgeIndex::tail, py::arg("e"))
        .def("head", &DirectedEdgeIndex::head, py::arg("e"))
        .def("index_of", &DirectedEdgeIndex::index_of, py::arg("tail"), py::arg("head"))
        .def("reverse_of", &DirectedEdgeIndex::reverse_of, py::arg("e"));

    py::class_<WeightMatrix>(m, "WeightMatrix")
        .def(py::init<const Graph&, std::vector<double>, std::vector<double>>(),
             py::arg("graph"), py::arg("edge_values"), py::arg("diagonal"))
        .def_static("metropolis_hastings", &WeightMatrix::metropolis_hastings,
                    py::arg("graph"))
        .def_static("from_dense", &WeightMatrix::from_dense, py::arg("graph"),
                    py::arg("w"))
        .def_property_readonly("size", &WeightMatrix::size)
        .def("diagonal", &WeightMatrix::diagonal, py::arg("v"))
        .def("edge_value", &WeightMatrix::edge_value, py::arg("e"))
        .def("apply", &WeightMatrix::apply, py::arg("x"))
        .def("dense", &WeightMatrix::dense);

    m.def("second_eigenvalue_magnitude", &second_eigenvalue_magnitude, py::arg("w"));
    m.def("optimal_gamma", &optimal_gamma, py::arg("rho_w"));
    m.def("predicted_rho_k", &predicted_rho_k, py::arg("rho_w"));
    m.def("build_k", &build_k, py::arg("gamma"), py::arg("w"));
    m.def("build_k_infinity", &build_k_infinity, py::arg("gamma"), py::arg("n"));

    py::class_<SpectralReport>(m, "SpectralReport")
        .def_readonly("n", &SpectralReport::n)
        .def_readonly("rho_w", &SpectralReport::rho_w)
        .def_readonly("gamma", &SpectralReport::gamma)
        .def_readonly("rho_k_predicted", &SpectralReport::rho_k_predicted)
        .def_readonly("diffusive_time_scale", &SpectralReport::diffusive_time_scale)
        .def_readonly("accelerated_time_scale", &SpectralReport::accelerated_time_scale)
        .def("to_json", [](const SpectralReport& r) { return to_json(r); });
    m.def("spectral_report", &spectral_report, py::arg("graph"));

    py::class_<EdgeCoupling>(m, "EdgeCoupling")
        .def(py::init<const Graph&, std::vector<double>>(), py::arg("graph"),
             py::arg("per_edge"))
        .def_static("adjacency", &EdgeCoupling::adjacency, py::arg("graph"))
        .def_static("from_weight", &EdgeCoupling::from_weight, py::arg("w"),
                    py::arg("scale"))
        .def("value", &EdgeCoupling::value, py::arg("edge"))
        .def_property_readonly("node_count", &EdgeCoupling::node_count)
        .def_property_readonly("edge_count", &EdgeCoupling::edge_count);

    py::class_<SplittingParams>(m, "SplittingParams")
        .def(py::init<double, EdgeCoupling>(), py::arg("delta"), py::arg("gamma"))
        .def_static("ordinary", &SplittingParams::ordinary, py::arg("graph"))
        .def_static("from_weight", &SplittingParams::from_weight, py::arg("delta"),
                    py::arg("w"), py::arg("scale"))
        .def_readonly("delta", &SplittingParams::delta);

    py::class_<ProblemData>(m, "ProblemData")
        .def(py::init<Eigen::VectorXd>(), py::arg("values"))
        .def_readonly("b", &ProblemData::b)
        .def("mean", &ProblemData::mean);

    py::class_<EdgeState>(m, "EdgeState")
        .def_readwrite("R", &EdgeState::R)
        .def_readwrite("r", &EdgeState::r)
        .def_readonly("step", &EdgeState::step);
    m.def("zero_edge_state", &zero_edge_state, py::arg("directed_edge_count"));

    py::class_<EdgeProtocol>(m, "EdgeProtocol")
        .def(py::init<const Graph&, const SplittingParams&, const ProblemData&>(),
             py::arg("graph"), py::arg("params"), py::arg("data"))
        .def_property_readonly("index", &EdgeProtocol::index)
        .def_property_readonly("delta", &EdgeProtocol::delta)
        .def("step", &EdgeProtocol::step, py::arg("state"))
        .def("generic_step", &EdgeProtocol::generic_step, py::arg("state"))
        .def("output", &EdgeProtocol::output, py::arg("state"))
        .def("update_matrix_dense", &EdgeProtocol::update_matrix_dense);
    m.def("hhat_vector", &hhat_vector, py::arg("delta"), py::arg("data"),
          py::arg("index"));

    py::class_<NodeState>(m, "NodeState")
        .def_readwrite("r", &NodeState::r)
        .def_readwrite("q", &NodeState::q)
        .def_readwrite("R", &NodeState::R)
        .def_readwrite("Q", &NodeState::Q)
        .def_readonly("step", &NodeState::step);

    py::class_<AuxOperator>(m, "AuxOperator")
        .def_static("from_params", &AuxOperator::from_params, py::arg("params"))
        .def_static("with_weight", &AuxOperator::with_weight, py::arg("delta"),
                    py::arg("gamma"), py::arg("w"))
        .def_property_readonly("node_count", &AuxOperator::node_count)
        .def_property_readonly("delta", &AuxOperator::delta)
        .def("dense", &AuxOperator::dense);
    m.def("initial_node_state", &initial_node_state, py::arg("data"));
    m.def("init_from_edge", &init_from_edge, py::arg("params"), py::arg("data"),
          py::arg("index"), py::arg("state"));
    m.def("aux_step", &aux_step, py::arg("state"), py::arg("op"));
    m.def("aux_output", &aux_output, py::arg("state"));

    py::class_<TwoStepState>(m, "TwoStepState")
        .def_readwrite("curr", &TwoStepState::curr)
        .def_readwrite("prev", &TwoStepState::prev)
        .def_readonly("step", &TwoStepState::step);
    m.def("warm_start", &warm_start, py::arg("b"));
    m.def("diffusion_step", &diffusion_step, py::arg("w"), py::arg("x"));
    m.def("shift_register_step", &shift_register_step, py::arg("state"), py::arg("w"),
          py::arg("gamma"));
    m.def("heavy_ball_step", &heavy_ball_step, py::arg("state"), py::arg("w"),
          py::arg("gamma"));
    m.def("nesterov_step", &nesterov_step, py::arg("state"), py::arg("w"),
          py::arg("gamma"));

    m.def("error_norm", &error_norm, py::arg("x"), py::arg("mean"));
    m.def("error_bound_sequence", &error_bound_sequence, py::arg("gamma"), py::arg("w"),
          py::arg("t_max"));
    m.def(
        "convergence_time",
        [](const std::vector<double>& errors, double eps) -> py::object {
            auto t = convergence_time(errors, eps);
            return t ? py::cast(*t) : py::object(py::none());
        },
        py::arg("errors"), py::arg("eps"));
    m.def("empirical_rate", &empirical_rate, py::arg("errors"), py::arg("t0"),
          py::arg("t1"));
    m.def("default_fit_window", &default_fit_window, py::arg("errors"));
    m.def("default_inputs", &default_inputs, py::arg("n"), py::arg("seed"));

    m.def(
        "run_experiment",
        [](const std::string& algorithm, const Graph& g, const Eigen::VectorXd& b,
           const std::string& policy, double gamma, double delta, int t_max, double eps,
           std::uint64_t seed) {
            RunTrace trace =
                run_experiment(algorithm_from_name(algorithm), g, ProblemData(b),
                               make_settings(policy, gamma, delta, t_max, eps, seed));
            return trace_to_dict(trace);
        },
        py::arg("algorithm"), py::arg("graph"), py::arg("b"),
        py::arg("policy") = "accelerated",
        py::arg("gamma") = std::numeric_limits<double>::quiet_NaN(),
        py::arg("delta") = 1.0, py::arg("t_max") = 1000, py::arg("eps") = 1e-6,
        py::arg("seed") = 1);

    m.def("algorithms", [] {
        std::vector<std::string> names;
        for (Algorithm a : all_algorithms()) names.push_back(to_string(a));
        return names;
    });
}
