#include <coresched/cli.hpp>

#include <coresched/error.hpp>
#include <coresched/learnability.hpp>
#include <coresched/scenario.hpp>
#include <coresched/trace_io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace coresched {

namespace {

struct Options {
    std::string scenario;
    std::string strategy;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "csv";
    std::optional<double> eta;
    std::optional<double> kappa;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<int> replicates;
    std::optional<int> quantum;
    std::string eta_grid;
    std::string strategies;
    std::string show_name;
    OracleLimits limits;
};

ScenarioDoc load_scenario(const std::string& ref) {
    if (std::filesystem::is_regular_file(ref)) {
        std::ifstream in(ref, std::ios::binary);
        std::stringstream buf;
        buf << in.rdbuf();
        return parse_scenario(buf.str());
    }
    const auto names = builtin_scenario_names();
    if (std::find(names.begin(), names.end(), ref) != names.end()) {
        return builtin_scenario(ref);
    }
    throw UsageError("'" + ref + "' is neither a scenario file nor a built-in scenario (fig1, fig2, fig3, fig4)");
}

std::uint64_t resolve_seed(const Options& o, const ScenarioDoc& doc) {
    if (o.seed) {
        return *o.seed;
    }
    if (const char* env = std::getenv("CORE_SCHED_SEED"); env != nullptr && *env != '\0') {
        try {
            std::size_t used = 0;
            const auto value = std::stoull(env, &used);
            if (used == std::string(env).size()) {
                return value;
            }
        } catch (const std::exception&) {
        }
        throw UsageError("CORE_SCHED_SEED must be a nonnegative integer");
    }
    return doc.params.seed;
}

StrategyConfig pick_strategy(const ScenarioDoc& doc, const std::string& name) {
    if (name.empty() || name == to_string(doc.strategy.kind)) {
        return doc.strategy;
    }
    StrategyConfig s;
    s.kind = strategy_kind_from_string(name);
    s.quantum = doc.strategy.quantum;
    return s;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            items.push_back(item);
        }
    }
    return items;
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    for (const auto& item : split_list(text)) {
        try {
            std::size_t used = 0;
            grid.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw UsageError("eta grid entry '" + item + "' is not a number");
        }
    }
    if (grid.empty()) {
        throw UsageError("eta grid is empty");
    }
    return grid;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    const auto doc = load_scenario(o.scenario);
    auto params = doc.params;
    params.seed = resolve_seed(o, doc);
    const auto trace = run(doc.bundle, pick_strategy(doc, o.strategy), params);
    const auto text = write_trace(trace, trace_format_from_string(o.format));
    for (const auto& w : trace.warnings) {
        err << "warning: " << w << '\n';
    }
    err << "runtime_ms=" << format_double(trace.runtime_ms) << '\n';
    if (o.out_path.empty()) {
        out << text;
    } else {
        std::ofstream file(o.out_path, std::ios::binary);
        if (!file) {
            throw UsageError("cannot write '" + o.out_path + "'");
        }
        file << text;
    }
    return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream&) {
    const auto doc = load_scenario(o.scenario);
    const auto base = doc.verify.value_or(VerifyParams{doc.params.eta_cap, 1.0, doc.params.epsilon, 0.05, 1});
    if (!o.kappa && !doc.verify) {
        throw UsageError("--kappa is required (the scenario has no verify block)");
    }
    VerifyParams p;
    p.eta = o.eta.value_or(base.eta);
    p.kappa = o.kappa.value_or(base.kappa);
    p.epsilon = o.epsilon.value_or(base.epsilon);
    p.delta = o.delta.value_or(base.delta);
    p.replicates = o.replicates.value_or(base.replicates);
    validate_verify_params(p);
    const auto strategy = pick_strategy(doc, o.strategy);
    const auto seed = resolve_seed(o, doc);
    Verdict verdict;
    if (p.replicates == 1) {
        verdict = verify(run(doc.bundle, strategy, {p.eta, p.epsilon, seed, doc.params.record_observed}), p);
    } else {
        verdict = verify_stochastic(doc.bundle, strategy, p, seed);
    }
    out << write_verdict(verdict);
    return verdict.learnable ? kExitOk : kExitNotLearnable;
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream&) {
    const auto doc = load_scenario(o.scenario);
    const auto result = oracle_max_kappa(doc.bundle, o.eta.value_or(doc.params.eta_cap),
                                         o.epsilon.value_or(doc.params.epsilon), o.quantum.value_or(2), o.limits);
    nlohmann::json j;
    j["kappa_star"] = result.kappa_star;
    j["successes"] = result.successes;
    j["witness"] = result.witness;
    j["nodes_explored"] = result.nodes_explored;
    out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_frontier(const Options& o, std::ostream& out, std::ostream&) {
    const auto doc = load_scenario(o.scenario);
    FrontierRequest req;
    req.eta_grid = parse_grid(o.eta_grid);
    req.epsilon = o.epsilon.value_or(doc.params.epsilon);
    req.quantum = o.quantum;
    req.seed = resolve_seed(o, doc);
    req.limits = o.limits;
    const auto points = frontier(doc.bundle, pick_strategy(doc, o.strategy), req);
    out << "eta,kappa\n";
    for (const auto& pt : points) {
        out << format_double(pt.eta) << ',' << format_double(pt.kappa) << '\n';
    }
    return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream&) {
    const auto doc = load_scenario(o.scenario);
    auto params = doc.params;
    params.eta_cap = o.eta.value_or(params.eta_cap);
    params.epsilon = o.epsilon.value_or(params.epsilon);
    params.seed = resolve_seed(o, doc);
    const auto names = split_list(o.strategies);
    if (names.empty()) {
        throw UsageError("--strategies needs at least one strategy name");
    }
    std::ostringstream body;
    body << "strategy,kappa,average_error\n";
    for (const auto& name : names) {
        const auto trace = run(doc.bundle, pick_strategy(doc, name), params);
        body << name << ',' << format_double(thread_throughput(trace)) << ','
             << (trace.outcomes.empty() ? std::string() : format_double(average_error(trace))) << '\n';
    }
    out << body.str();
    return kExitOk;
}

int cmd_metrics(const Options& o, std::ostream& out, std::ostream& err) {
    const auto doc = load_scenario(o.scenario);
    auto params = doc.params;
    params.seed = resolve_seed(o, doc);
    const auto trace = run(doc.bundle, pick_strategy(doc, o.strategy), params);
    std::vector<std::string> warnings;
    nlohmann::json j;
    j["data_throughput"] = nlohmann::json::array();
    for (const auto& row : trace.rows) {
        j["data_throughput"].push_back(data_throughput(trace, row.timeslot, &warnings));
    }
    j["thread_throughput"] = thread_throughput(trace);
    if (!trace.outcomes.empty()) {
        j["average_error"] = average_error(trace);
        try {
            j["weighted_thread_throughput"] = weighted_thread_throughput(trace);
        } catch (const ConfigError& e) {
            warnings.emplace_back(e.what());
        }
    }
    for (const auto& w : warnings) {
        err << "warning: " << w << '\n';
    }
    out << j.dump(2) << '\n';
    return kExitOk;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulate and verify resource-constrained learning schedules", "core-sched"};
    app.require_subcommand(1);
    Options o;

    auto add_scenario = [&](CLI::App* cmd) {
        cmd->add_option("--scenario", o.scenario, "Scenario file or built-in name (fig1..fig4)")->required();
    };
    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", o.seed, "Seed (overrides CORE_SCHED_SEED and the scenario)");
    };
    auto add_limits = [&](CLI::App* cmd) {
        cmd->add_option("--max-threads", o.limits.max_threads, "Oracle limit on K");
        cmd->add_option("--max-horizon", o.limits.max_horizon, "Oracle limit on T");
        cmd->add_option("--max-quantum", o.limits.max_quantum, "Oracle limit on Q");
    };

    auto* simulate = app.add_subcommand("simulate", "Run a scenario and write its trace");
    add_scenario(simulate);
    simulate->add_option("--strategy", o.strategy, "Override the scenario's strategy kind");
    add_seed(simulate);
    simulate->add_option("--out", o.out_path, "Write the trace here instead of stdout");
    simulate->add_option("--format", o.format, "csv or structured")->check(CLI::IsMember({"csv", "structured"}));

    auto* verify_cmd = app.add_subcommand("verify", "Check (eta, kappa) learnability");
    add_scenario(verify_cmd);
    verify_cmd->add_option("--eta", o.eta);
    verify_cmd->add_option("--kappa", o.kappa);
    verify_cmd->add_option("--epsilon", o.epsilon);
    verify_cmd->add_option("--delta", o.delta);
    verify_cmd->add_option("--replicates", o.replicates);
    verify_cmd->add_option("--strategy", o.strategy);
    add_seed(verify_cmd);

    auto* oracle_cmd = app.add_subcommand("oracle", "Exact maximum kappa over the quantized allocation space");
    add_scenario(oracle_cmd);
    oracle_cmd->add_option("--eta", o.eta);
    oracle_cmd->add_option("--epsilon", o.epsilon);
    oracle_cmd->add_option("--quantum", o.quantum);
    add_limits(oracle_cmd);

    auto* frontier_cmd = app.add_subcommand("frontier", "Kappa achieved over a grid of eta values");
    add_scenario(frontier_cmd);
    frontier_cmd->add_option("--eta-grid", o.eta_grid, "Comma-separated ascending eta values")->required();
    frontier_cmd->add_option("--strategy", o.strategy, "Strategy kind, or 'oracle' for kappa*");
    frontier_cmd->add_option("--epsilon", o.epsilon);
    frontier_cmd->add_option("--quantum", o.quantum);
    add_seed(frontier_cmd);
    add_limits(frontier_cmd);

    auto* compare = app.add_subcommand("compare", "Side-by-side kappa and average error");
    add_scenario(compare);
    compare->add_option("--strategies", o.strategies, "Comma-separated strategy kinds")->required();
    compare->add_option("--eta", o.eta);
    compare->add_option("--epsilon", o.epsilon);
    add_seed(compare);

    auto* metrics = app.add_subcommand("metrics", "Throughput metrics of one run");
    add_scenario(metrics);
    metrics->add_option("--strategy", o.strategy);
    add_seed(metrics);

    auto* scenario = app.add_subcommand("scenario", "Built-in scenarios");
    scenario->require_subcommand(1);
    auto* list = scenario->add_subcommand("list", "List built-in scenario names");
    auto* show = scenario->add_subcommand("show", "Print a built-in scenario document");
    show->add_option("name", o.show_name)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(o, out, err);
        if (verify_cmd->parsed()) return cmd_verify(o, out, err);
        if (oracle_cmd->parsed()) return cmd_oracle(o, out, err);
        if (frontier_cmd->parsed()) return cmd_frontier(o, out, err);
        if (compare->parsed()) return cmd_compare(o, out, err);
        if (metrics->parsed()) return cmd_metrics(o, out, err);
        if (list->parsed()) {
            for (const auto& name : builtin_scenario_names()) {
                out << name << '\n';
            }
            return kExitOk;
        }
        if (show->parsed()) {
            out << serialize_scenario(builtin_scenario(o.show_name));
            return kExitOk;
        }
    } catch (const ScenarioError& e) {
        err << "error: invalid scenario: " << e.what() << '\n';
        return kExitInvalidScenario;
    } catch (const ValidationError& e) {
        err << "error: invalid scenario: " << e.what() << '\n';
        return kExitInvalidScenario;
    } catch (const BudgetViolation& e) {
        err << "error: invalid scenario: " << e.what() << '\n';
        return kExitInvalidScenario;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace coresched
