#include <coresched/learnability.hpp>

#include <coresched/error.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace coresched {

namespace {

const TraceRow& row_at(const Trace& trace, Timeslot t) {
    if (t < 1 || static_cast<std::size_t>(t) > trace.rows.size()) {
        throw UsageError("timeslot " + std::to_string(t) + " outside the trace horizon 1.." +
                         std::to_string(trace.rows.size()));
    }
    return trace.rows[static_cast<std::size_t>(t - 1)];
}

std::size_t success_count(const Trace& trace) {
    return static_cast<std::size_t>(std::count_if(trace.outcomes.begin(), trace.outcomes.end(),
                                                  [](const auto& o) { return o.status == ThreadStatus::success; }));
}

// Number of passing replicates needed for a 1 - delta fraction of `total`.
std::size_t required_passes(double delta, std::size_t total) {
    const double need = std::ceil((1.0 - delta) * static_cast<double>(total) - 1e-9);
    return static_cast<std::size_t>(std::max(0.0, need));
}

// Runs body(i) for i in [0, count) on up to hardware_concurrency workers.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace

double data_throughput(const Trace& trace, Timeslot t, std::vector<std::string>* warnings) {
    const auto& row = row_at(trace, t);
    if (row.received <= 0.0) {
        if (warnings != nullptr) {
            warnings->push_back("timeslot " + std::to_string(t) + ": no data received; data throughput taken as 1");
        }
        return 1.0;
    }
    return std::clamp(row.processed_sum() / row.received, 0.0, 1.0);
}

double thread_throughput(const Trace& trace) {
    if (trace.outcomes.empty()) {
        return 1.0;
    }
    return static_cast<double>(success_count(trace)) / static_cast<double>(trace.outcomes.size());
}

double weighted_thread_throughput(const Trace& trace) {
    double total = 0.0;
    double succeeded = 0.0;
    for (const auto& o : trace.outcomes) {
        if (!(o.weight >= 0.0)) {
            throw ConfigError("thread " + std::to_string(o.thread_id) + " has a negative weight");
        }
        total += o.weight;
        if (o.status == ThreadStatus::success) {
            succeeded += o.weight;
        }
    }
    if (!(total > 0.0)) {
        throw ConfigError("weighted thread throughput needs at least one positive weight");
    }
    return succeeded / total;
}

double average_error(const Trace& trace) {
    if (trace.outcomes.empty()) {
        throw UsageError("average error is undefined for an empty bundle");
    }
    double sum = 0.0;
    for (const auto& o : trace.outcomes) {
        sum += o.final_error;
    }
    return sum / static_cast<double>(trace.outcomes.size());
}

void validate_verify_params(const VerifyParams& p) {
    if (!(p.eta >= 0.0 && p.eta <= 1.0)) {
        throw UsageError("eta must lie in [0, 1]");
    }
    if (!(p.kappa >= 0.0 && p.kappa <= 1.0)) {
        throw UsageError("kappa must lie in [0, 1]");
    }
    if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) {
        throw UsageError("epsilon must lie in (0, 1]");
    }
    if (!(p.delta > 0.0 && p.delta < 1.0)) {
        throw UsageError("delta must lie in (0, 1)");
    }
    if (p.replicates < 1) {
        throw UsageError("replicates must be >= 1");
    }
}

std::string_view to_string(Condition condition) noexcept {
    switch (condition) {
    case Condition::none: return "none";
    case Condition::deadline: return "2a";
    case Condition::error: return "2b";
    }
    return "unknown";
}

Condition condition_from_string(std::string_view name) {
    for (auto c : {Condition::none, Condition::deadline, Condition::error}) {
        if (to_string(c) == name) {
            return c;
        }
    }
    throw UsageError("unknown condition '" + std::string(name) + "'");
}

Verdict verify(const Trace& trace, const VerifyParams& p) {
    validate_verify_params(p);
    if (std::abs(trace.params.epsilon - p.epsilon) > 1e-12) {
        throw UsageError("trace was run at epsilon " + std::to_string(trace.params.epsilon) +
                         " but verification asks for " + std::to_string(p.epsilon));
    }
    Verdict v;
    for (const auto& row : trace.rows) {
        if (row.fraction_sum() > p.eta + kBudgetTolerance) {
            v.budget_violations.push_back(row.timeslot);
        }
    }
    v.budget_ok = v.budget_violations.empty();

    std::size_t succeeded = 0;
    for (const auto& o : trace.outcomes) {
        ThreadCheck check;
        check.thread_id = o.thread_id;
        check.status = o.status;
        switch (o.status) {
        case ThreadStatus::success:
            check.meets_deadline = o.switching_time.has_value() && *o.switching_time <= o.deadline;
            check.meets_error = o.final_error <= p.epsilon;
            break;
        case ThreadStatus::fail_error:
            check.meets_deadline = true;
            check.meets_error = false;
            break;
        case ThreadStatus::fail_deadline:
        case ThreadStatus::pending:
            check.meets_deadline = false;
            check.meets_error = o.final_error <= p.epsilon;
            break;
        }
        if (!check.meets_deadline) {
            check.violated = Condition::deadline;
        } else if (!check.meets_error) {
            check.violated = Condition::error;
        }
        if (o.status == ThreadStatus::success && check.violated == Condition::none) {
            ++succeeded;
        }
        v.threads.push_back(check);
    }
    v.achieved_kappa = trace.outcomes.empty()
                           ? 1.0
                           : static_cast<double>(succeeded) / static_cast<double>(trace.outcomes.size());
    v.learnable = v.budget_ok && v.achieved_kappa + 1e-12 >= p.kappa;
    v.confidence_fraction = v.learnable ? 1.0 : 0.0;
    v.replicates = 1;
    return v;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Verdict verify_stochastic(const TaskBundle& bundle, const StrategyConfig& strategy, const VerifyParams& p,
                          std::uint64_t seed, const TraceObserver& observer) {
    validate_verify_params(p);
    SimParams base{p.eta, p.epsilon, seed, false};
    const StrategyConfig resolved = resolve_strategy(bundle, strategy, base);
    const auto total = static_cast<std::size_t>(p.replicates);

    std::vector<Trace> traces(total);
    std::vector<Verdict> verdicts(total);
    parallel_for(total, [&](std::size_t i) {
        SimParams params = base;
        params.seed = total == 1 ? seed : derive_seed(seed, i);
        traces[i] = run(bundle, resolved, params);
        verdicts[i] = verify(traces[i], p);
    });
    if (observer) {
        for (const auto& tr : traces) {
            observer(tr);
        }
    }

    std::size_t passes = 0;
    std::vector<double> kappas;
    for (const auto& v : verdicts) {
        passes += v.learnable ? 1 : 0;
        kappas.push_back(v.achieved_kappa);
    }
    std::sort(kappas.begin(), kappas.end(), std::greater<>());
    const std::size_t needed = required_passes(p.delta, total);
    Verdict out = verdicts.front();
    out.replicates = p.replicates;
    out.confidence_fraction = static_cast<double>(passes) / static_cast<double>(total);
    out.learnable = passes >= needed;
    out.achieved_kappa = kappas[std::min(total - 1, needed == 0 ? 0 : needed - 1)];
    out.budget_ok = std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.budget_ok; });
    return out;
}

std::vector<FrontierPoint> frontier(const TaskBundle& bundle, const StrategyConfig& strategy,
                                    const FrontierRequest& request, const TraceObserver& observer) {
    double previous = -1.0;
    for (double eta : request.eta_grid) {
        if (!(eta >= 0.0 && eta <= 1.0) || eta < previous) {
            throw UsageError("eta grid values must lie in [0, 1] and ascend");
        }
        previous = eta;
    }
    std::vector<FrontierPoint> points;
    for (double eta : request.eta_grid) {
        if (strategy.kind == StrategyKind::oracle) {
            const int q = request.quantum.value_or(strategy.quantum.value_or(2));
            points.push_back({eta, oracle_max_kappa(bundle, eta, request.epsilon, q, request.limits).kappa_star});
            continue;
        }
        StrategyConfig s = strategy;
        if (request.quantum) {
            s.quantum = request.quantum;
        }
        const auto trace = run(bundle, s, {eta, request.epsilon, request.seed, false});
        if (observer) {
            observer(trace);
        }
        points.push_back({eta, thread_throughput(trace)});
    }
    return points;
}

} // namespace coresched
