#pragma once

#include <coresched/bundle.hpp>
#include <coresched/engine.hpp>
#include <coresched/oracle.hpp>
#include <coresched/scheduler.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace coresched {

// Throughput metrics.

/// Processed / received data at slot t. A slot with nothing received counts
/// as 1.0 and appends a note to `warnings` when given.
double data_throughput(const Trace& trace, Timeslot t, std::vector<std::string>* warnings = nullptr);
/// |I_succ| / K, 1.0 for an empty bundle.
double thread_throughput(const Trace& trace);
double weighted_thread_throughput(const Trace& trace);
/// Mean final true error. Throws UsageError for an empty bundle.
double average_error(const Trace& trace);

// Learnability check.

struct VerifyParams {
    double eta = 1.0;
    double kappa = 1.0;
    double epsilon = 0.01;
    double delta = 0.05;
    int replicates = 1;

    bool operator==(const VerifyParams&) const = default;
};

void validate_verify_params(const VerifyParams& p);

enum class Condition { none, deadline, error };

std::string_view to_string(Condition condition) noexcept;
Condition condition_from_string(std::string_view name);

struct ThreadCheck {
    ThreadId thread_id = 0;
    ThreadStatus status = ThreadStatus::pending;
    bool meets_deadline = false;
    bool meets_error = false;
    Condition violated = Condition::none;

    bool operator==(const ThreadCheck&) const = default;
};

struct Verdict {
    bool learnable = false;
    double achieved_kappa = 0.0;
    bool budget_ok = true;
    /// Slots where the fractions summed above eta.
    std::vector<Timeslot> budget_violations;
    std::vector<ThreadCheck> threads;
    double confidence_fraction = 0.0;
    int replicates = 1;
    std::optional<AllocationMatrix> witness;

    bool operator==(const Verdict&) const = default;
};

/// Deterministic check of one trace. Throws UsageError when the trace was
/// produced at a different epsilon.
Verdict verify(const Trace& trace, const VerifyParams& p);

using TraceObserver = std::function<void(const Trace&)>;

/// Runs `p.replicates` simulations at eta_cap = p.eta with derived seeds and
/// accepts iff the passing fraction reaches 1 - delta. `observer`, if set,
/// sees every replicate trace in replicate order.
Verdict verify_stochastic(const TaskBundle& bundle, const StrategyConfig& strategy, const VerifyParams& p,
                          std::uint64_t seed, const TraceObserver& observer = {});

/// Seed for replicate `index` of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Frontier.

struct FrontierPoint {
    double eta = 0.0;
    double kappa = 0.0;

    bool operator==(const FrontierPoint&) const = default;
};

struct FrontierRequest {
    std::vector<double> eta_grid;
    double epsilon = 0.01;
    /// Quantization for the oracle and for quantized strategies.
    std::optional<int> quantum;
    std::uint64_t seed = 0;
    OracleLimits limits;
};

/// Achieved kappa per grid point. A strategy of kind oracle yields kappa*.
std::vector<FrontierPoint> frontier(const TaskBundle& bundle, const StrategyConfig& strategy,
                                    const FrontierRequest& request, const TraceObserver& observer = {});

} // namespace coresched
