// Python bindings. Structured values cross the boundary as JSON text; the
// pure-Python layer in core_sched/__init__.py decodes them.

#include <coresched/cli.hpp>
#include <coresched/error.hpp>
#include <coresched/learnability.hpp>
#include <coresched/oracle.hpp>
#include <coresched/scenario.hpp>
#include <coresched/trace_io.hpp>

#include <json.hpp>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

namespace py = pybind11;
using namespace coresched;

namespace {

StrategyConfig pick_strategy(const ScenarioDoc& doc, const std::string& name) {
    if (name.empty() || name == to_string(doc.strategy.kind)) {
        return doc.strategy;
    }
    StrategyConfig s;
    s.kind = strategy_kind_from_string(name);
    s.quantum = doc.strategy.quantum;
    return s;
}

std::string simulate(const std::string& scenario, const std::string& strategy, std::optional<std::uint64_t> seed,
                     const std::string& format) {
    const auto doc = parse_scenario(scenario);
    auto params = doc.params;
    params.seed = seed.value_or(params.seed);
    const auto fmt = trace_format_from_string(format);
    Trace trace;
    {
        py::gil_scoped_release release;
        trace = run(doc.bundle, pick_strategy(doc, strategy), params);
    }
    return write_trace(trace, fmt);
}

std::string verify_scenario(const std::string& scenario, double eta, double kappa, double epsilon, double delta,
                            int replicates, const std::string& strategy, std::optional<std::uint64_t> seed) {
    const auto doc = parse_scenario(scenario);
    const VerifyParams p{eta, kappa, epsilon, delta, replicates};
    py::gil_scoped_release release;
    return write_verdict(verify_stochastic(doc.bundle, pick_strategy(doc, strategy), p, seed.value_or(doc.params.seed)));
}

std::string oracle(const std::string& scenario, double eta, double epsilon, int quantum) {
    const auto doc = parse_scenario(scenario);
    OracleResult r;
    {
        py::gil_scoped_release release;
        r = oracle_max_kappa(doc.bundle, eta, epsilon, quantum);
    }
    nlohmann::json j;
    j["kappa_star"] = r.kappa_star;
    j["successes"] = r.successes;
    j["witness"] = r.witness;
    j["nodes_explored"] = r.nodes_explored;
    return j.dump();
}

std::string frontier_json(const std::string& scenario, const std::vector<double>& eta_grid, double epsilon,
                          const std::string& strategy, std::optional<int> quantum, std::optional<std::uint64_t> seed) {
    const auto doc = parse_scenario(scenario);
    FrontierRequest req;
    req.eta_grid = eta_grid;
    req.epsilon = epsilon;
    req.quantum = quantum;
    req.seed = seed.value_or(doc.params.seed);
    std::vector<FrontierPoint> points;
    {
        py::gil_scoped_release release;
        points = frontier(doc.bundle, pick_strategy(doc, strategy), req);
    }
    auto j = nlohmann::json::array();
    for (const auto& pt : points) {
        j.push_back({{"eta", pt.eta}, {"kappa", pt.kappa}});
    }
    return j.dump();
}

py::tuple run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Simulator and verifier for resource-constrained learning thread bundles";

    auto base = py::register_exception<Error>(m, "CoreSchedError", PyExc_RuntimeError);
    py::register_exception<UsageError>(m, "UsageError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<BudgetViolation>(m, "BudgetViolation", base.ptr());
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<ScenarioError>(m, "ScenarioError", base.ptr());

    m.def("builtin_scenarios", &builtin_scenario_names);
    m.def("builtin_scenario", [](const std::string& name) { return serialize_scenario(builtin_scenario(name)); });
    m.def("normalize_scenario", [](const std::string& text) { return serialize_scenario(parse_scenario(text)); },
          "Parse, validate and re-serialize a scenario document.");
    m.def("simulate", &simulate, py::arg("scenario"), py::arg("strategy") = "", py::arg("seed") = py::none(),
          py::arg("format") = "structured");
    m.def("verify", &verify_scenario, py::arg("scenario"), py::arg("eta"), py::arg("kappa"), py::arg("epsilon"),
          py::arg("delta") = 0.05, py::arg("replicates") = 1, py::arg("strategy") = "", py::arg("seed") = py::none());
    m.def("oracle", &oracle, py::arg("scenario"), py::arg("eta"), py::arg("epsilon"), py::arg("quantum") = 2);
    m.def("frontier", &frontier_json, py::arg("scenario"), py::arg("eta_grid"), py::arg("epsilon"),
          py::arg("strategy") = "", py::arg("quantum") = py::none(), py::arg("seed") = py::none());
    m.def("run_cli", &run_cli, py::arg("args"), "Run the command-line tool in-process: (exit_code, stdout, stderr).");
}
