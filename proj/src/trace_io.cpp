#include <coresched/trace_io.hpp>

#include <coresched/error.hpp>
#include <coresched/scenario.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <sstream>

namespace coresched {

using nlohmann::json;

namespace {

constexpr std::string_view kTraceSchema = "core-trace/1";

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
T field(const json& node, const char* key) {
    try {
        return node.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ScenarioError(ScenarioError::Kind::schema, key, e.what());
    }
}

} // namespace

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

TraceFormat trace_format_from_string(std::string_view name) {
    if (name == "csv") return TraceFormat::csv;
    if (name == "structured") return TraceFormat::structured;
    throw UsageError("unknown trace format '" + std::string(name) + "' (valid: csv, structured)");
}

std::string write_trace(const Trace& trace, TraceFormat format, bool include_runtime) {
    if (format == TraceFormat::csv) {
        std::ostringstream out;
        out << kTraceCsvHeader << '\n';
        for (const auto& row : trace.rows) {
            for (const auto& e : row.entries) {
                out << row.timeslot << ',' << e.thread_id << ',' << format_double(e.fraction) << ','
                    << format_double(e.granted) << ',' << format_double(e.processed) << ','
                    << format_double(e.cumulative) << ',' << format_double(e.true_error) << ','
                    << (e.observed_error ? format_double(*e.observed_error) : "") << ",,\n";
            }
        }
        for (const auto& o : trace.outcomes) {
            out << ',' << o.thread_id << ",,,,," << format_double(o.final_error) << ",," << to_string(o.status) << ','
                << (o.switching_time ? std::to_string(*o.switching_time) : "") << '\n';
        }
        return out.str();
    }

    json rows = json::array();
    for (const auto& row : trace.rows) {
        json entries = json::array();
        for (const auto& e : row.entries) {
            entries.push_back({{"thread_id", e.thread_id},
                               {"fraction", e.fraction},
                               {"granted_units", e.granted},
                               {"processed_units", e.processed},
                               {"cumulative_units", e.cumulative},
                               {"true_error", e.true_error},
                               {"observed_error", optional_number(e.observed_error)}});
        }
        rows.push_back(
            {{"t", row.timeslot}, {"capacity", row.capacity}, {"received", row.received}, {"entries", entries}});
    }
    json outcomes = json::array();
    for (const auto& o : trace.outcomes) {
        outcomes.push_back({{"thread_id", o.thread_id},
                            {"status", to_string(o.status)},
                            {"switching_time", o.switching_time ? json(*o.switching_time) : json(nullptr)},
                            {"final_error", o.final_error},
                            {"deadline", o.deadline},
                            {"weight", o.weight}});
    }
    json j;
    j["schema_version"] = kTraceSchema;
    j["bundle_hash"] = trace.bundle_hash;
    j["strategy"] = trace.strategy;
    j["params"] = {{"eta_cap", trace.params.eta_cap},
                   {"epsilon", trace.params.epsilon},
                   {"seed", trace.params.seed},
                   {"record_observed", trace.params.record_observed}};
    j["rows"] = rows;
    j["outcomes"] = outcomes;
    j["warnings"] = trace.warnings;
    if (include_runtime) {
        j["runtime_ms"] = trace.runtime_ms;
    }
    return j.dump(2) + "\n";
}

Trace parse_trace(std::string_view structured) {
    json j;
    try {
        j = json::parse(structured.begin(), structured.end());
    } catch (const json::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::syntax, "", e.what());
    }
    if (field<std::string>(j, "schema_version") != kTraceSchema) {
        throw ScenarioError(ScenarioError::Kind::schema, "schema_version", "not a core-trace/1 document");
    }
    Trace t;
    t.bundle_hash = field<std::string>(j, "bundle_hash");
    t.strategy = field<std::string>(j, "strategy");
    const auto& p = j.at("params");
    t.params = {field<double>(p, "eta_cap"), field<double>(p, "epsilon"), field<std::uint64_t>(p, "seed"),
                field<bool>(p, "record_observed")};
    for (const auto& r : j.at("rows")) {
        TraceRow row;
        row.timeslot = field<int>(r, "t");
        row.capacity = field<double>(r, "capacity");
        row.received = field<double>(r, "received");
        for (const auto& e : r.at("entries")) {
            ThreadSlot s;
            s.thread_id = field<int>(e, "thread_id");
            s.fraction = field<double>(e, "fraction");
            s.granted = field<double>(e, "granted_units");
            s.processed = field<double>(e, "processed_units");
            s.cumulative = field<double>(e, "cumulative_units");
            s.true_error = field<double>(e, "true_error");
            if (!e.at("observed_error").is_null()) {
                s.observed_error = field<double>(e, "observed_error");
            }
            row.entries.push_back(s);
        }
        t.rows.push_back(std::move(row));
    }
    for (const auto& o : j.at("outcomes")) {
        ThreadOutcome out;
        out.thread_id = field<int>(o, "thread_id");
        out.status = thread_status_from_string(field<std::string>(o, "status"));
        if (!o.at("switching_time").is_null()) {
            out.switching_time = field<int>(o, "switching_time");
        }
        out.final_error = field<double>(o, "final_error");
        out.deadline = field<int>(o, "deadline");
        out.weight = field<double>(o, "weight");
        t.outcomes.push_back(out);
    }
    t.warnings = field<std::vector<std::string>>(j, "warnings");
    if (j.contains("runtime_ms")) {
        t.runtime_ms = field<double>(j, "runtime_ms");
    }
    return t;
}

std::string write_verdict(const Verdict& v) {
    json threads = json::array();
    for (const auto& c : v.threads) {
        threads.push_back({{"thread_id", c.thread_id},
                           {"status", to_string(c.status)},
                           {"meets_deadline", c.meets_deadline},
                           {"meets_error", c.meets_error},
                           {"violated", to_string(c.violated)}});
    }
    json j;
    j["learnable"] = v.learnable;
    j["achieved_kappa"] = v.achieved_kappa;
    j["budget_ok"] = v.budget_ok;
    j["budget_violations"] = v.budget_violations;
    j["threads"] = threads;
    j["confidence_fraction"] = v.confidence_fraction;
    j["replicates"] = v.replicates;
    if (v.witness) {
        j["witness"] = *v.witness;
    }
    return j.dump(2) + "\n";
}

Verdict parse_verdict(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ScenarioError(ScenarioError::Kind::syntax, "", e.what());
    }
    Verdict v;
    v.learnable = field<bool>(j, "learnable");
    v.achieved_kappa = field<double>(j, "achieved_kappa");
    v.budget_ok = field<bool>(j, "budget_ok");
    v.budget_violations = field<std::vector<Timeslot>>(j, "budget_violations");
    for (const auto& c : j.at("threads")) {
        ThreadCheck check;
        check.thread_id = field<int>(c, "thread_id");
        check.status = thread_status_from_string(field<std::string>(c, "status"));
        check.meets_deadline = field<bool>(c, "meets_deadline");
        check.meets_error = field<bool>(c, "meets_error");
        check.violated = condition_from_string(field<std::string>(c, "violated"));
        v.threads.push_back(check);
    }
    v.confidence_fraction = field<double>(j, "confidence_fraction");
    v.replicates = field<int>(j, "replicates");
    if (j.contains("witness")) {
        v.witness = field<AllocationMatrix>(j, "witness");
    }
    return v;
}

} // namespace coresched
