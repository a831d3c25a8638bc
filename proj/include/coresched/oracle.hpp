#pragma once

#include <coresched/bundle.hpp>
#include <coresched/scheduler.hpp>

#include <cstddef>

namespace coresched {

struct OracleLimits {
    std::size_t max_threads = 4;
    int max_horizon = 6;
    int max_quantum = 4;
};

struct OracleResult {
    double kappa_star = 1.0;
    std::size_t successes = 0;
    /// T x K fractions on the eta/Q grid achieving kappa_star.
    AllocationMatrix witness;
    std::size_t nodes_explored = 0;
};

/// Exact maximum thread throughput over every allocation matrix whose
/// entries are multiples of eta/Q summing to at most eta per slot.
/// Throws OracleLimitError (with the instance size) beyond `limits`.
OracleResult oracle_max_kappa(const TaskBundle& bundle, double eta, double epsilon, int quantum,
                              const OracleLimits& limits = {});

} // namespace coresched
