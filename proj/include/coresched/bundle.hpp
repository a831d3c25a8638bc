#pragma once

#include <coresched/curve.hpp>

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace coresched {

using ThreadId = int;
using Timeslot = int;

constexpr double kBudgetTolerance = 1e-9;

/// One learning thread: lifespan [begin, deadline] in 1-based timeslots.
struct ThreadSpec {
    ThreadId id = 0;
    Timeslot begin = 1;
    Timeslot deadline = 1;
    LearningCurve curve;
    double weight = 1.0;
    /// Empty: unbounded. One entry: constant per-slot cap. T entries: per slot.
    std::vector<double> arrival_cap;

    bool has_arrival_cap() const noexcept { return !arrival_cap.empty(); }
    /// Data available to this thread at slot t; +inf when uncapped.
    double arrival_cap_at(Timeslot t) const;

    bool operator==(const ThreadSpec&) const = default;
};

struct ResourceProfile {
    std::vector<double> capacities;

    double at(Timeslot t) const { return capacities.at(static_cast<std::size_t>(t - 1)); }

    bool operator==(const ResourceProfile&) const = default;
};

struct TaskBundle {
    std::vector<ThreadSpec> threads;
    ResourceProfile resources;
    int horizon = 0;

    std::size_t size() const noexcept { return threads.size(); }
    const ThreadSpec& thread(ThreadId id) const { return threads.at(static_cast<std::size_t>(id - 1)); }

    bool operator==(const TaskBundle&) const = default;
};

/// Per-thread fractions of N_t for one slot. Absent threads receive 0.
struct AllocationRow {
    Timeslot timeslot = 0;
    std::map<ThreadId, double> fractions;

    double fraction(ThreadId id) const;
    double sum() const;

    bool operator==(const AllocationRow&) const = default;
};

struct Violation {
    std::string field;
    std::optional<ThreadId> thread_id;
    std::optional<Timeslot> timeslot;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

/// Lists every broken invariant; empty when the bundle is well formed.
ValidationReport validate_bundle(const TaskBundle& bundle);

/// Throws ValidationError carrying the first violation, if any.
void require_valid(const TaskBundle& bundle);

std::string describe(const Violation& violation);

/// Formal alive set {k | b_k <= t <= d_k}. Throws UsageError when t is
/// outside 1..T.
std::vector<ThreadId> alive_set(const TaskBundle& bundle, Timeslot t);

} // namespace coresched
