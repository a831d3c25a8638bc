#include <coresched/bundle.hpp>

#include <coresched/error.hpp>

#include <cmath>
#include <numeric>

namespace coresched {

double ThreadSpec::arrival_cap_at(Timeslot t) const {
    if (arrival_cap.empty()) {
        return std::numeric_limits<double>::infinity();
    }
    if (arrival_cap.size() == 1) {
        return arrival_cap.front();
    }
    return arrival_cap.at(static_cast<std::size_t>(t - 1));
}

double AllocationRow::fraction(ThreadId id) const {
    auto it = fractions.find(id);
    return it == fractions.end() ? 0.0 : it->second;
}

double AllocationRow::sum() const {
    return std::accumulate(fractions.begin(), fractions.end(), 0.0,
                           [](double acc, const auto& kv) { return acc + kv.second; });
}

ValidationReport validate_bundle(const TaskBundle& bundle) {
    ValidationReport report;
    const int horizon = bundle.horizon;
    if (horizon <= 0) {
        report.push_back({"horizon", std::nullopt, std::nullopt, "horizon must be a positive integer"});
    }
    const auto& caps = bundle.resources.capacities;
    if (static_cast<long>(caps.size()) != horizon) {
        report.push_back({"resource_profile", std::nullopt, std::nullopt,
                          "length " + std::to_string(caps.size()) + " does not match horizon " +
                              std::to_string(horizon)});
    }
    for (std::size_t i = 0; i < caps.size(); ++i) {
        if (!std::isfinite(caps[i]) || caps[i] < 0.0) {
            const auto t = static_cast<Timeslot>(i + 1);
            report.push_back({"resource_profile[" + std::to_string(t) + "]", std::nullopt, t,
                              "capacity at timeslot " + std::to_string(t) + " must be finite and >= 0"});
        }
    }

    for (std::size_t i = 0; i < bundle.threads.size(); ++i) {
        const auto& th = bundle.threads[i];
        const auto expected = static_cast<ThreadId>(i + 1);
        const std::string prefix = "threads[" + std::to_string(i) + "]";
        if (th.id != expected) {
            report.push_back({prefix + ".id", th.id, std::nullopt,
                              "ids must be consecutive from 1; expected " + std::to_string(expected)});
        }
        if (th.begin > th.deadline) {
            report.push_back({prefix + ".begin", th.id, std::nullopt, "begin > deadline"});
        }
        if (th.begin < 1) {
            report.push_back({prefix + ".begin", th.id, std::nullopt, "begin must be >= 1"});
        }
        if (th.deadline > horizon) {
            report.push_back({prefix + ".deadline", th.id, std::nullopt, "deadline beyond horizon"});
        }
        if (!std::isfinite(th.weight) || th.weight < 0.0) {
            report.push_back({prefix + ".weight", th.id, std::nullopt, "weight must be finite and >= 0"});
        }
        const auto ncap = th.arrival_cap.size();
        if (ncap > 1 && static_cast<long>(ncap) != horizon) {
            report.push_back({prefix + ".arrival_cap", th.id, std::nullopt,
                              "per-slot arrival caps must have one entry per timeslot"});
        }
        for (double cap : th.arrival_cap) {
            if (!std::isfinite(cap) || cap < 0.0) {
                report.push_back({prefix + ".arrival_cap", th.id, std::nullopt, "arrival caps must be finite and >= 0"});
                break;
            }
        }
        try {
            validate_curve(th.curve);
        } catch (const ValidationError& e) {
            report.push_back({prefix + ".curve." + e.field(), th.id, std::nullopt, e.what()});
        }
    }
    return report;
}

std::string describe(const Violation& v) {
    std::string out = v.field;
    if (v.thread_id) {
        out += " (thread " + std::to_string(*v.thread_id) + ")";
    }
    if (v.timeslot) {
        out += " (timeslot " + std::to_string(*v.timeslot) + ")";
    }
    return out + ": " + v.message;
}

void require_valid(const TaskBundle& bundle) {
    const auto report = validate_bundle(bundle);
    if (!report.empty()) {
        const auto& v = report.front();
        std::string message = v.message;
        if (v.thread_id) {
            message += " (thread " + std::to_string(*v.thread_id) + ")";
        }
        throw ValidationError(v.field, message);
    }
}

std::vector<ThreadId> alive_set(const TaskBundle& bundle, Timeslot t) {
    if (t < 1 || t > bundle.horizon) {
        throw UsageError("timeslot " + std::to_string(t) + " outside 1.." + std::to_string(bundle.horizon));
    }
    std::vector<ThreadId> alive;
    for (const auto& th : bundle.threads) {
        if (th.begin <= t && t <= th.deadline) {
            alive.push_back(th.id);
        }
    }
    return alive;
}

} // namespace coresched
