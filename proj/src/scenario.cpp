#include <coresched/scenario.hpp>

#include <coresched/error.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <set>

namespace coresched {

using nlohmann::json;

ScenarioError::ScenarioError(Kind kind, std::string path, const std::string& message, int line, int column)
    : Error(path.empty() ? message : path + ": " + message), kind_(kind), path_(std::move(path)), line_(line),
      column_(column) {}

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& message) {
    throw ScenarioError(ScenarioError::Kind::schema, path, message);
}

// Strict view over one JSON object: every key must be consumed.
class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) {
            schema_error(path_, "expected an object");
        }
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    const json& child(const std::string& key) {
        if (!node_.contains(key)) {
            schema_error(at(key), "missing required field");
        }
        seen_.insert(key);
        return node_.at(key);
    }

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    double number(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_number()) {
            schema_error(at(key), "expected a number");
        }
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    long integer(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_number_integer()) {
            schema_error(at(key), "expected an integer");
        }
        return v.get<long>();
    }

    std::uint64_t unsigned_integer(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_number_unsigned()) {
            schema_error(at(key), "expected a nonnegative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string string(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_string()) {
            schema_error(at(key), "expected a string");
        }
        return v.get<std::string>();
    }

    bool boolean(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_boolean()) {
            schema_error(at(key), "expected a boolean");
        }
        return v.get<bool>();
    }

    const json& array(const std::string& key) {
        const auto& v = child(key);
        if (!v.is_array()) {
            schema_error(at(key), "expected an array");
        }
        return v;
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!seen_.contains(key)) {
                schema_error(at(key), "unknown field");
            }
        }
    }

private:
    const json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<double> number_list(const json& arr, const std::string& path) {
    std::vector<double> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number()) {
            schema_error(path + "[" + std::to_string(i) + "]", "expected a number");
        }
        out.push_back(arr[i].get<double>());
    }
    return out;
}

template <typename Fn>
auto wrap_enum(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        schema_error(path, e.what());
    }
}

LearningCurve read_curve(const json& node, const std::string& path) {
    Reader r(node, path);
    LearningCurve c;
    const auto family = r.string("family");
    c.family = wrap_enum(r.at("family"), [&] { return curve_family_from_string(family); });
    c.initial_error = r.number_or("initial_error", 1.0);
    c.floor = r.number_or("floor", 0.0);
    switch (c.family) {
    case CurveFamily::exponential: c.rate = r.number("rate"); break;
    case CurveFamily::power: c.exponent = r.number("exponent"); break;
    case CurveFamily::linear_need: c.need = r.number("need"); break;
    case CurveFamily::piecewise: {
        const auto& pts = r.array("points");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto p = path + ".points[" + std::to_string(i) + "]";
            if (!pts[i].is_array() || pts[i].size() != 2 || !pts[i][0].is_number() || !pts[i][1].is_number()) {
                schema_error(p, "expected a [data, error] pair");
            }
            c.points.emplace_back(pts[i][0].get<double>(), pts[i][1].get<double>());
        }
        break;
    }
    }
    if (r.has("segments")) {
        const auto& segs = r.array("segments");
        for (std::size_t i = 0; i < segs.size(); ++i) {
            Reader s(segs[i], path + ".segments[" + std::to_string(i) + "]");
            c.segments.push_back({s.number("start"), s.number("end"), s.number("rate_multiplier")});
            s.finish();
        }
    }
    if (r.has("noise")) {
        Reader n(r.child("noise"), r.at("noise"));
        if (n.string("distribution") != "gaussian") {
            schema_error(n.at("distribution"), "only 'gaussian' noise is supported");
        }
        c.noise_sigma = n.number("sigma");
        n.finish();
    }
    r.finish();
    return c;
}

json write_curve(const LearningCurve& c) {
    json j;
    j["family"] = to_string(c.family);
    j["initial_error"] = c.initial_error;
    j["floor"] = c.floor;
    switch (c.family) {
    case CurveFamily::exponential: j["rate"] = c.rate; break;
    case CurveFamily::power: j["exponent"] = c.exponent; break;
    case CurveFamily::linear_need: j["need"] = c.need; break;
    case CurveFamily::piecewise: {
        json pts = json::array();
        for (const auto& [n, e] : c.points) {
            pts.push_back({n, e});
        }
        j["points"] = pts;
        break;
    }
    }
    if (!c.segments.empty()) {
        json segs = json::array();
        for (const auto& s : c.segments) {
            segs.push_back({{"start", s.start}, {"end", s.end}, {"rate_multiplier", s.rate_multiplier}});
        }
        j["segments"] = segs;
    }
    if (c.noise_sigma != 0.0) {
        j["noise"] = {{"distribution", "gaussian"}, {"sigma", c.noise_sigma}};
    }
    return j;
}

TaskBundle read_bundle(const json& node, const std::string& path) {
    Reader r(node, path);
    TaskBundle b;
    b.horizon = static_cast<int>(r.integer("horizon"));
    b.resources.capacities = number_list(r.array("resource_profile"), r.at("resource_profile"));
    const auto& threads = r.array("threads");
    for (std::size_t i = 0; i < threads.size(); ++i) {
        const auto p = r.at("threads") + "[" + std::to_string(i) + "]";
        Reader t(threads[i], p);
        ThreadSpec th;
        th.id = static_cast<ThreadId>(t.integer("id"));
        th.begin = static_cast<Timeslot>(t.integer("begin"));
        th.deadline = static_cast<Timeslot>(t.integer("deadline"));
        th.weight = t.number_or("weight", 1.0);
        if (t.has("arrival_cap")) {
            const auto& cap = t.child("arrival_cap");
            if (cap.is_number()) {
                th.arrival_cap = {cap.get<double>()};
            } else if (cap.is_array() && !cap.empty()) {
                th.arrival_cap = number_list(cap, t.at("arrival_cap"));
            } else {
                schema_error(t.at("arrival_cap"), "expected a number or a non-empty array of numbers");
            }
        }
        th.curve = read_curve(t.child("curve"), t.at("curve"));
        t.finish();
        b.threads.push_back(std::move(th));
    }
    r.finish();
    return b;
}

json write_bundle(const TaskBundle& b) {
    json threads = json::array();
    for (const auto& th : b.threads) {
        json t;
        t["id"] = th.id;
        t["begin"] = th.begin;
        t["deadline"] = th.deadline;
        t["weight"] = th.weight;
        if (th.arrival_cap.size() == 1) {
            t["arrival_cap"] = th.arrival_cap.front();
        } else if (!th.arrival_cap.empty()) {
            t["arrival_cap"] = th.arrival_cap;
        }
        t["curve"] = write_curve(th.curve);
        threads.push_back(std::move(t));
    }
    return {{"horizon", b.horizon}, {"resource_profile", b.resources.capacities}, {"threads", threads}};
}

StrategyConfig read_strategy(const json& node, const std::string& path) {
    Reader r(node, path);
    StrategyConfig s;
    const auto kind = r.string("kind");
    s.kind = wrap_enum(r.at("kind"), [&] { return strategy_kind_from_string(kind); });
    if (r.has("quantum")) {
        s.quantum = static_cast<int>(r.integer("quantum"));
    }
    switch (s.kind) {
    case StrategyKind::adaptive: {
        auto& a = s.adaptive;
        a.window = r.has("window") ? static_cast<int>(r.integer("window")) : a.window;
        a.min_rel_drop = r.number_or("min_rel_drop", a.min_rel_drop);
        a.step = r.number_or("step", a.step);
        a.hopeless_factor = r.number_or("hopeless_factor", a.hopeless_factor);
        a.lookback = r.has("lookback") ? static_cast<int>(r.integer("lookback")) : a.lookback;
        break;
    }
    case StrategyKind::exclusive_static:
        if (r.has("fractions")) {
            s.static_fractions = number_list(r.array("fractions"), r.at("fractions"));
        }
        break;
    case StrategyKind::scripted: {
        const auto& m = r.array("matrix");
        for (std::size_t i = 0; i < m.size(); ++i) {
            const auto p = r.at("matrix") + "[" + std::to_string(i) + "]";
            if (!m[i].is_array()) {
                schema_error(p, "expected an array of fractions");
            }
            s.matrix.push_back(number_list(m[i], p));
        }
        break;
    }
    default: break;
    }
    r.finish();
    return s;
}

json write_strategy(const StrategyConfig& s) {
    json j;
    j["kind"] = to_string(s.kind);
    if (s.quantum) {
        j["quantum"] = *s.quantum;
    }
    switch (s.kind) {
    case StrategyKind::adaptive:
        j["window"] = s.adaptive.window;
        j["min_rel_drop"] = s.adaptive.min_rel_drop;
        j["step"] = s.adaptive.step;
        j["hopeless_factor"] = s.adaptive.hopeless_factor;
        j["lookback"] = s.adaptive.lookback;
        break;
    case StrategyKind::exclusive_static:
        if (!s.static_fractions.empty()) {
            j["fractions"] = s.static_fractions;
        }
        break;
    case StrategyKind::scripted: j["matrix"] = s.matrix; break;
    default: break;
    }
    return j;
}

SimParams read_params(const json& node, const std::string& path) {
    Reader r(node, path);
    SimParams p;
    p.eta_cap = r.number("eta_cap");
    p.epsilon = r.number("epsilon");
    p.seed = r.has("seed") ? r.unsigned_integer("seed") : 0;
    p.record_observed = r.has("record_observed") ? r.boolean("record_observed") : true;
    r.finish();
    return p;
}

VerifyParams read_verify(const json& node, const std::string& path) {
    Reader r(node, path);
    VerifyParams v;
    v.eta = r.number("eta");
    v.kappa = r.number("kappa");
    v.epsilon = r.number("epsilon");
    v.delta = r.number("delta");
    v.replicates = r.has("replicates") ? static_cast<int>(r.integer("replicates")) : 1;
    r.finish();
    return v;
}

std::pair<int, int> line_column(std::string_view text, std::size_t byte) {
    int line = 1;
    int column = 1;
    const std::size_t end = std::min(text.size(), byte == 0 ? 0 : byte - 1);
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

template <typename Fn>
void semantic(const std::string& path, Fn&& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        throw ScenarioError(ScenarioError::Kind::semantic, path.empty() ? e.field() : path + "." + e.field(), e.what());
    } catch (const Error& e) {
        throw ScenarioError(ScenarioError::Kind::semantic, path, e.what());
    }
}

// Thread 5 in fig3 is short-lived; its data arrive at 16 units per slot,
// which is the most the schedule can feed it.
AllocationMatrix fig3_matrix() {
    return {
        {0.25, 0.0, 0.25, 0.0, 0.0},     // t0~t1: 32 units split between threads 1 and 3
        {0.25, 0.125, 0.125, 0.0, 0.0},  // t1~t2: thread 1 keeps 16, threads 2 and 3 share 16
        {0.25, 0.125, 0.125, 0.0, 0.0},  // t2~t3: thread 1 reaches 48 units and completes
        {0.0, 0.25, 0.25, 0.0, 0.0},     // t3~t4: threads 2 and 3 each get 16 more units
        {0.0, 0.0, 0.25, 0.25, 0.0},     // t4~t5: thread 4 arrives; thread 2 is dropped
        {0.0, 0.0, 0.125, 0.125, 0.25},  // t5~t6: thread 5 arrives and gets its full 16
        {0.0, 0.0, 0.25, 0.0, 0.25},     // t6~t7: thread 3 takes the rest and completes; 4 waits
        {0.0, 0.0, 0.0, 0.5, 0.0},       // t7~t8: only threads 2 and 4 remain
        {0.0, 0.0, 0.0, 0.5, 0.0},       // t8~t9: thread 4 completes; thread 2 expires unfed
        {0.0, 0.0, 0.0, 0.0, 0.0},
    };
}

ThreadSpec linear_thread(ThreadId id, Timeslot begin, Timeslot deadline, double need, double initial = 1.0) {
    ThreadSpec th;
    th.id = id;
    th.begin = begin;
    th.deadline = deadline;
    th.curve.family = CurveFamily::linear_need;
    th.curve.initial_error = initial;
    th.curve.need = need;
    return th;
}

ScenarioDoc fig1() {
    ScenarioDoc d;
    d.name = "fig1";
    d.description = "Data throughput: received volume doubles in slot 2, capacity doubles in slot 3.";
    d.bundle.horizon = 3;
    d.bundle.resources.capacities = {64.0, 64.0, 128.0};
    auto th = linear_thread(1, 1, 3, 100000.0);
    th.arrival_cap = {128.0, 256.0, 256.0};
    d.bundle.threads.push_back(th);
    d.strategy.kind = StrategyKind::uniform;
    d.params = {1.0, 0.01, 0, true};
    return d;
}

ScenarioDoc fig2() {
    ScenarioDoc d;
    d.name = "fig2";
    d.description = "Thread throughput: five threads with staggered lifespans, three succeed (illustrative).";
    d.bundle.horizon = 6;
    d.bundle.resources.capacities.assign(6, 60.0);
    d.bundle.threads = {linear_thread(1, 1, 3, 40.0), linear_thread(2, 2, 5, 1000.0), linear_thread(3, 1, 6, 60.0),
                        linear_thread(4, 3, 6, 50.0), linear_thread(5, 4, 6, 1000.0)};
    d.strategy.kind = StrategyKind::uniform;
    d.params = {1.0, 0.01, 0, true};
    d.verify = VerifyParams{1.0, 0.6, 0.01, 0.05, 1};
    return d;
}

ScenarioDoc fig3() {
    ScenarioDoc d;
    d.name = "fig3";
    d.description = "Five threads, N=64 per slot, eta=0.5, scripted schedule; threads 1, 3 and 4 succeed.";
    d.bundle.horizon = 10;
    d.bundle.resources.capacities.assign(10, 64.0);
    auto t5 = linear_thread(5, 6, 7, 64.0);
    t5.arrival_cap = {16.0};
    d.bundle.threads = {linear_thread(1, 1, 4, 48.0), linear_thread(2, 2, 9, 128.0), linear_thread(3, 1, 8, 88.0),
                        linear_thread(4, 5, 10, 88.0), t5};
    d.strategy.kind = StrategyKind::scripted;
    d.strategy.matrix = fig3_matrix();
    d.params = {0.5, 0.01, 0, true};
    d.verify = VerifyParams{0.5, 0.6, 0.01, 0.05, 1};
    return d;
}

ScenarioDoc fig4() {
    ScenarioDoc d;
    d.name = "fig4";
    d.description = "Two threads; thread 1 hits a flat region after 50 units, thread 2 keeps improving. "
                    "Compare adaptive with uniform at threshold 0.1.";
    d.bundle.horizon = 10;
    d.bundle.resources.capacities.assign(10, 100.0);
    ThreadSpec flat;
    flat.id = 1;
    flat.begin = 1;
    flat.deadline = 10;
    flat.curve.family = CurveFamily::exponential;
    flat.curve.rate = std::log(2.0) / 50.0;
    flat.curve.segments = {{50.0, 1e6, 0.0}};
    d.bundle.threads = {flat, linear_thread(2, 1, 10, 700.0, 0.9)};
    d.strategy.kind = StrategyKind::adaptive;
    d.params = {1.0, 0.1, 0, true};
    d.verify = VerifyParams{1.0, 0.5, 0.1, 0.05, 1};
    return d;
}

} // namespace

ScenarioDoc parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        throw ScenarioError(ScenarioError::Kind::syntax, "",
                            "syntax error at line " + std::to_string(line) + ", column " + std::to_string(column),
                            line, column);
    }
    Reader r(root, "");
    ScenarioDoc doc;
    const auto version = r.string("schema_version");
    if (version != kScenarioSchema) {
        schema_error("schema_version", "unrecognized schema '" + version + "' (expected " +
                                           std::string(kScenarioSchema) + ")");
    }
    doc.name = r.has("name") ? r.string("name") : "";
    doc.description = r.has("description") ? r.string("description") : "";
    doc.bundle = read_bundle(r.child("bundle"), "bundle");
    doc.strategy = read_strategy(r.child("strategy"), "strategy");
    doc.params = read_params(r.child("params"), "params");
    if (r.has("verify")) {
        doc.verify = read_verify(r.child("verify"), "verify");
    }
    r.finish();

    const auto report = validate_bundle(doc.bundle);
    if (!report.empty()) {
        throw ScenarioError(ScenarioError::Kind::semantic, "bundle." + report.front().field, describe(report.front()));
    }
    semantic("strategy", [&] { validate_strategy(doc.strategy); });
    semantic("params", [&] { validate_params(doc.params); });
    if (doc.verify) {
        semantic("verify", [&] { validate_verify_params(*doc.verify); });
    }
    return doc;
}

std::string serialize_scenario(const ScenarioDoc& doc) {
    json j;
    j["schema_version"] = kScenarioSchema;
    if (!doc.name.empty()) {
        j["name"] = doc.name;
    }
    if (!doc.description.empty()) {
        j["description"] = doc.description;
    }
    j["bundle"] = write_bundle(doc.bundle);
    j["strategy"] = write_strategy(doc.strategy);
    j["params"] = {{"eta_cap", doc.params.eta_cap},
                   {"epsilon", doc.params.epsilon},
                   {"seed", doc.params.seed},
                   {"record_observed", doc.params.record_observed}};
    if (doc.verify) {
        const auto& v = *doc.verify;
        j["verify"] = {{"eta", v.eta},
                       {"kappa", v.kappa},
                       {"epsilon", v.epsilon},
                       {"delta", v.delta},
                       {"replicates", v.replicates}};
    }
    return j.dump(2) + "\n";
}

std::vector<std::string> builtin_scenario_names() { return {"fig1", "fig2", "fig3", "fig4"}; }

ScenarioDoc builtin_scenario(std::string_view name) {
    if (name == "fig1") return fig1();
    if (name == "fig2") return fig2();
    if (name == "fig3") return fig3();
    if (name == "fig4") return fig4();
    throw UsageError("unknown scenario '" + std::string(name) + "' (valid: fig1, fig2, fig3, fig4)");
}

std::string bundle_content_hash(const TaskBundle& bundle) {
    const auto text = write_bundle(bundle).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace coresched
