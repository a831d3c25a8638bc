#pragma once

// Test-only helpers: seeded bundle generators, an independent brute-force
// oracle, and an audit of emitted traces. Nothing here calls the oracle or
// engine internals it is used to check.

#include <coresched/bundle.hpp>
#include <coresched/engine.hpp>

#include <optional>
#include <random>
#include <string>

namespace coresched::testing {

struct BundleShape {
    std::size_t max_threads = 4;
    int max_horizon = 6;
    bool allow_noise = false;
};

LearningCurve random_curve(std::mt19937_64& rng, bool allow_noise = false);
TaskBundle random_bundle(std::mt19937_64& rng, const BundleShape& shape);

/// Max successes over every matrix with entries j*eta/Q, sum_j <= Q per slot,
/// by exhaustive enumeration and a from-scratch replay of the slot loop.
std::size_t naive_max_successes(const TaskBundle& bundle, double eta, double epsilon, int quantum);

/// Re-derives the budget and alive-set invariants of a trace. Returns a
/// description of the first problem, or nullopt.
std::optional<std::string> audit_trace(const Trace& trace, const TaskBundle& bundle);

} // namespace coresched::testing
