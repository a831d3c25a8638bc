#include <coresched/engine.hpp>

#include <coresched/error.hpp>
#include <coresched/oracle.hpp>
#include <coresched/scenario.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace coresched {

void validate_params(const SimParams& p) {
    if (!(p.eta_cap >= 0.0 && p.eta_cap <= 1.0)) {
        throw UsageError("eta_cap must lie in [0, 1]");
    }
    if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) {
        throw UsageError("epsilon must lie in (0, 1]");
    }
}

std::string_view to_string(ThreadStatus status) noexcept {
    switch (status) {
    case ThreadStatus::pending: return "pending";
    case ThreadStatus::success: return "success";
    case ThreadStatus::fail_deadline: return "fail-deadline";
    case ThreadStatus::fail_error: return "fail-error";
    }
    return "unknown";
}

ThreadStatus thread_status_from_string(std::string_view name) {
    for (auto s : {ThreadStatus::pending, ThreadStatus::success, ThreadStatus::fail_deadline, ThreadStatus::fail_error}) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw UsageError("unknown thread status '" + std::string(name) + "'");
}

double TraceRow::fraction_sum() const {
    double sum = 0.0;
    for (const auto& e : entries) {
        sum += e.fraction;
    }
    return sum;
}

double TraceRow::processed_sum() const {
    double sum = 0.0;
    for (const auto& e : entries) {
        sum += e.processed;
    }
    return sum;
}

bool Trace::operator==(const Trace& other) const {
    return bundle_hash == other.bundle_hash && strategy == other.strategy && params == other.params &&
           rows == other.rows && outcomes == other.outcomes && warnings == other.warnings;
}

std::mt19937_64 thread_rng(std::uint64_t seed, ThreadId id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id)};
    return std::mt19937_64(seq);
}

SimState initial_state(const TaskBundle& bundle, const SimParams& params) {
    SimState state;
    state.threads.reserve(bundle.size());
    for (const auto& th : bundle.threads) {
        ThreadState ts;
        ts.id = th.id;
        ts.true_error = th.curve.initial_error;
        ts.rng = thread_rng(params.seed, th.id);
        state.threads.push_back(std::move(ts));
    }
    return state;
}

std::vector<ThreadId> effective_alive(const TaskBundle& bundle, const SimState& state, Timeslot t) {
    std::vector<ThreadId> alive;
    for (const auto& th : bundle.threads) {
        const auto& ts = state.threads.at(static_cast<std::size_t>(th.id - 1));
        if (th.begin <= t && t <= th.deadline && ts.status == ThreadStatus::pending) {
            alive.push_back(th.id);
        }
    }
    return alive;
}

SchedulerView build_view(const TaskBundle& bundle, const SimParams& params, const SimState& state) {
    SchedulerView view;
    view.timeslot = state.next_timeslot;
    view.eta_cap = params.eta_cap;
    view.capacity = bundle.resources.at(state.next_timeslot);
    view.epsilon = params.epsilon;
    view.bundle_size = bundle.size();
    for (ThreadId id : effective_alive(bundle, state, state.next_timeslot)) {
        const auto& spec = bundle.thread(id);
        const auto& ts = state.threads[static_cast<std::size_t>(id - 1)];
        view.threads.push_back({id, spec.begin, spec.deadline, spec.weight, ts.cumulative, ts.history});
    }
    return view;
}

namespace {

double received_at(const TaskBundle& bundle, Timeslot t) {
    const double capacity = bundle.resources.at(t);
    double total = 0.0;
    bool any = false;
    for (const auto& th : bundle.threads) {
        if (th.begin <= t && t <= th.deadline) {
            if (!th.has_arrival_cap()) {
                return capacity;
            }
            total += th.arrival_cap_at(t);
            any = true;
        }
    }
    return any ? total : capacity;
}

} // namespace

SimState step(const TaskBundle& bundle, const SimParams& params, SimState state, const AllocationRow& row) {
    const Timeslot t = state.next_timeslot;
    if (t > bundle.horizon) {
        throw UsageError("simulation already reached the horizon");
    }
    if (row.timeslot != t) {
        throw UsageError("allocation row is for timeslot " + std::to_string(row.timeslot) + " but the next slot is " +
                         std::to_string(t));
    }
    for (const auto& [id, f] : row.fractions) {
        if (id < 1 || static_cast<std::size_t>(id) > bundle.size()) {
            throw UsageError("allocation row references unknown thread " + std::to_string(id));
        }
        if (!std::isfinite(f) || f < 0.0) {
            throw ConfigError("allocation for thread " + std::to_string(id) + " at timeslot " + std::to_string(t) +
                              " is negative or not finite");
        }
    }
    if (row.sum() > params.eta_cap + kBudgetTolerance) {
        throw BudgetViolation("timeslot " + std::to_string(t) + ": fractions sum to " + std::to_string(row.sum()) +
                              " above eta " + std::to_string(params.eta_cap));
    }

    const auto alive = effective_alive(bundle, state, t);
    for (const auto& [id, f] : row.fractions) {
        if (f != 0.0 && !std::binary_search(alive.begin(), alive.end(), id)) {
            state.warnings.push_back("timeslot " + std::to_string(t) + ": thread " + std::to_string(id) +
                                     " is not effectively alive; fraction ignored");
        }
    }

    TraceRow out;
    out.timeslot = t;
    out.capacity = bundle.resources.at(t);
    out.received = received_at(bundle, t);
    for (ThreadId id : alive) {
        const auto& spec = bundle.thread(id);
        auto& ts = state.threads[static_cast<std::size_t>(id - 1)];
        ThreadSlot slot;
        slot.thread_id = id;
        slot.fraction = row.fraction(id);
        slot.granted = slot.fraction * out.capacity;
        slot.processed = std::min(slot.granted, spec.arrival_cap_at(t));
        ts.cumulative += slot.processed;
        slot.cumulative = ts.cumulative;
        ts.true_error = curve_true_error(spec.curve, ts.cumulative);
        slot.true_error = ts.true_error;
        const double observed = curve_observed_error(spec.curve, ts.cumulative, ts.rng);
        ts.history.push_back({t, observed, ts.cumulative});
        if (params.record_observed) {
            slot.observed_error = observed;
        }
        if (ts.true_error <= params.epsilon) {
            ts.status = ThreadStatus::success;
            ts.switching_time = t;
        } else if (t == spec.deadline) {
            ts.status = slot.fraction > 0.0 ? ThreadStatus::fail_deadline : ThreadStatus::fail_error;
        }
        out.entries.push_back(std::move(slot));
    }
    state.rows.push_back(std::move(out));
    ++state.next_timeslot;
    return state;
}

StrategyConfig resolve_strategy(const TaskBundle& bundle, const StrategyConfig& strategy, const SimParams& params) {
    if (strategy.kind != StrategyKind::oracle) {
        return strategy;
    }
    StrategyConfig resolved = strategy;
    resolved.kind = StrategyKind::scripted;
    resolved.quantum.reset();
    resolved.matrix = oracle_max_kappa(bundle, params.eta_cap, params.epsilon, strategy.quantum.value_or(2)).witness;
    return resolved;
}

Trace run(const TaskBundle& bundle, const StrategyConfig& strategy, const SimParams& params) {
    const auto started = std::chrono::steady_clock::now();
    require_valid(bundle);
    validate_params(params);
    validate_strategy(strategy);

    const StrategyConfig effective = resolve_strategy(bundle, strategy, params);
    if (effective.kind == StrategyKind::scripted && effective.matrix.size() < static_cast<std::size_t>(bundle.horizon)) {
        throw ConfigError("scripted matrix has " + std::to_string(effective.matrix.size()) +
                          " rows but the horizon is " + std::to_string(bundle.horizon));
    }

    SimState state = initial_state(bundle, params);
    for (Timeslot t = 1; t <= bundle.horizon; ++t) {
        const auto view = build_view(bundle, params, state);
        const auto row = allocate(effective, view);
        state = step(bundle, params, std::move(state), row);
    }

    Trace trace;
    trace.bundle_hash = bundle_content_hash(bundle);
    trace.strategy = std::string(to_string(strategy.kind));
    trace.params = params;
    trace.rows = std::move(state.rows);
    trace.warnings = std::move(state.warnings);
    for (const auto& spec : bundle.threads) {
        const auto& ts = state.threads[static_cast<std::size_t>(spec.id - 1)];
        trace.outcomes.push_back({spec.id, ts.status, ts.switching_time, ts.true_error, spec.deadline, spec.weight});
    }
    trace.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return trace;
}

AllocationMatrix matrix_from_trace(const Trace& trace, std::size_t thread_count) {
    AllocationMatrix matrix(trace.rows.size(), std::vector<double>(thread_count, 0.0));
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        for (const auto& e : trace.rows[i].entries) {
            matrix[i].at(static_cast<std::size_t>(e.thread_id - 1)) = e.fraction;
        }
    }
    return matrix;
}

} // namespace coresched
