#pragma once

#include <coresched/bundle.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace coresched {

/// One noisy reading of a thread's error, taken at the end of a slot.
struct Observation {
    Timeslot timeslot = 0;
    double error = 0.0;
    double cumulative = 0.0;

    bool operator==(const Observation&) const = default;
};

/// What a strategy may see about one effectively-alive thread.
struct ThreadView {
    ThreadId id = 0;
    Timeslot begin = 0;
    Timeslot deadline = 0;
    double weight = 1.0;
    double cumulative = 0.0;
    std::vector<Observation> history;
};

/// Observable state at the start of slot t. Never carries curve parameters.
struct SchedulerView {
    Timeslot timeslot = 0;
    double eta_cap = 0.0;
    double capacity = 0.0;
    double epsilon = 0.0;
    std::size_t bundle_size = 0;
    std::vector<ThreadView> threads;
};

enum class StrategyKind { uniform, edf_greedy, adaptive, scripted, exclusive_static, oracle };

std::string_view to_string(StrategyKind kind) noexcept;
StrategyKind strategy_kind_from_string(std::string_view name);
std::vector<std::string> strategy_kind_names();

struct AdaptiveParams {
    int window = 5;
    double min_rel_drop = 0.01;
    /// Fraction of the eta cap moved away from a plateaued thread per slot.
    double step = 0.25;
    double hopeless_factor = 2.0;
    int lookback = 5;

    bool operator==(const AdaptiveParams&) const = default;
};

using AllocationMatrix = std::vector<std::vector<double>>;

struct StrategyConfig {
    StrategyKind kind = StrategyKind::uniform;
    std::optional<int> quantum;
    AdaptiveParams adaptive;
    /// exclusive-static: fixed fraction per thread (index id-1). Empty means
    /// eta/K for every thread.
    std::vector<double> static_fractions;
    /// scripted: row t-1 holds the fractions for slot t, column k-1 thread k.
    AllocationMatrix matrix;

    bool operator==(const StrategyConfig&) const = default;
};

/// Throws ConfigError when parameters fall outside their documented ranges.
void validate_strategy(const StrategyConfig& strategy);

/// Fraction granted by j quanta of size eta/Q. Every component that works on
/// the quantized grid goes through this function so values compare exactly.
double quantum_fraction(double eta, int quantum, int j) noexcept;

/// Rounds fractions onto multiples of eta/Q (largest remainder, lowest id
/// first) without increasing the total number of quanta.
std::map<ThreadId, double> quantize(const std::map<ThreadId, double>& fractions, double eta, int quantum);

/// True iff the last `window` observations dropped by less than
/// `min_rel_drop` relative to the first of them.
bool detect_plateau(std::span<const Observation> history, int window, double min_rel_drop);

/// Average per-slot error decrease over the last `lookback` observations;
/// 0 when the history is shorter or the error went up.
double estimate_marginal_gain(std::span<const Observation> history, int lookback);

/// Produces this slot's allocation. The oracle kind must be resolved to a
/// scripted witness before simulation (see sim::run).
AllocationRow allocate(const StrategyConfig& strategy, const SchedulerView& view);

} // namespace coresched
