#pragma once

#include <coresched/bundle.hpp>
#include <coresched/scheduler.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace coresched {

struct SimParams {
    double eta_cap = 1.0;
    double epsilon = 0.01;
    std::uint64_t seed = 0;
    bool record_observed = true;

    bool operator==(const SimParams&) const = default;
};

void validate_params(const SimParams& params);

enum class ThreadStatus { pending, success, fail_deadline, fail_error };

std::string_view to_string(ThreadStatus status) noexcept;
ThreadStatus thread_status_from_string(std::string_view name);

/// One thread's activity within one slot.
struct ThreadSlot {
    ThreadId thread_id = 0;
    double fraction = 0.0;
    double granted = 0.0;
    double processed = 0.0;
    double cumulative = 0.0;
    double true_error = 0.0;
    std::optional<double> observed_error;

    bool operator==(const ThreadSlot&) const = default;
};

/// One slot: entries for every thread that was effectively alive at its start.
struct TraceRow {
    Timeslot timeslot = 0;
    double capacity = 0.0;
    /// Data arriving this slot: sum of arrival caps when every formally alive
    /// thread is capped, otherwise the capacity N_t.
    double received = 0.0;
    std::vector<ThreadSlot> entries;

    double fraction_sum() const;
    double processed_sum() const;

    bool operator==(const TraceRow&) const = default;
};

struct ThreadOutcome {
    ThreadId thread_id = 0;
    ThreadStatus status = ThreadStatus::pending;
    std::optional<Timeslot> switching_time;
    double final_error = 1.0;
    Timeslot deadline = 0;
    double weight = 1.0;

    bool operator==(const ThreadOutcome&) const = default;
};

struct Trace {
    std::string bundle_hash;
    std::string strategy;
    SimParams params;
    std::vector<TraceRow> rows;
    std::vector<ThreadOutcome> outcomes;
    std::vector<std::string> warnings;
    /// Wall-clock of the run; informational and excluded from equality.
    double runtime_ms = 0.0;

    bool operator==(const Trace& other) const;
};

struct ThreadState {
    ThreadId id = 0;
    double cumulative = 0.0;
    double true_error = 1.0;
    ThreadStatus status = ThreadStatus::pending;
    std::optional<Timeslot> switching_time;
    std::vector<Observation> history;
    std::mt19937_64 rng;
};

/// Mutable simulation state between slots; `next_timeslot` is the slot the
/// next call to step() executes.
struct SimState {
    Timeslot next_timeslot = 1;
    std::vector<ThreadState> threads;
    std::vector<TraceRow> rows;
    std::vector<std::string> warnings;
};

SimState initial_state(const TaskBundle& bundle, const SimParams& params);

/// Threads with b_k <= t <= d_k that have neither completed nor failed.
std::vector<ThreadId> effective_alive(const TaskBundle& bundle, const SimState& state, Timeslot t);

SchedulerView build_view(const TaskBundle& bundle, const SimParams& params, const SimState& state);

/// Executes slot `state.next_timeslot` with `row`: grants min(eta_kt * N_t,
/// cap), advances cumulative data, records errors, then applies completion
/// (true error <= eps) and deadline checks. Nonzero fractions for known but
/// not effectively-alive threads are ignored with a warning.
SimState step(const TaskBundle& bundle, const SimParams& params, SimState state, const AllocationRow& row);

/// Replaces an oracle strategy by a scripted replay of its witness schedule
/// (quantum defaults to 2); other kinds are returned unchanged.
StrategyConfig resolve_strategy(const TaskBundle& bundle, const StrategyConfig& strategy, const SimParams& params);

/// Runs slots 1..T. An oracle strategy is first resolved to its witness.
Trace run(const TaskBundle& bundle, const StrategyConfig& strategy, const SimParams& params);

/// Allocation matrix (T rows x K columns) actually applied in `trace`.
AllocationMatrix matrix_from_trace(const Trace& trace, std::size_t thread_count);

/// Per-thread-seeded generator used for observation noise.
std::mt19937_64 thread_rng(std::uint64_t seed, ThreadId id);

} // namespace coresched
