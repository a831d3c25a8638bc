#include <coresched/scheduler.hpp>

#include <coresched/error.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace coresched {

namespace {

constexpr StrategyKind kAllKinds[] = {StrategyKind::uniform,  StrategyKind::edf_greedy,
                                      StrategyKind::adaptive, StrategyKind::scripted,
                                      StrategyKind::exclusive_static, StrategyKind::oracle};

std::map<ThreadId, double> allocate_uniform(const SchedulerView& view) {
    std::map<ThreadId, double> out;
    const double share = view.eta_cap / static_cast<double>(view.threads.size());
    for (const auto& th : view.threads) {
        out[th.id] = share;
    }
    return out;
}

std::map<ThreadId, double> allocate_exclusive(const StrategyConfig& s, const SchedulerView& view) {
    std::map<ThreadId, double> out;
    const double fallback = view.bundle_size == 0 ? 0.0 : view.eta_cap / static_cast<double>(view.bundle_size);
    for (const auto& th : view.threads) {
        const auto idx = static_cast<std::size_t>(th.id - 1);
        if (s.static_fractions.empty()) {
            out[th.id] = fallback;
        } else {
            out[th.id] = idx < s.static_fractions.size() ? s.static_fractions[idx] : 0.0;
        }
    }
    return out;
}

// Fraction of N_t per slot that the last two observations say the thread
// needs to reach epsilon by its deadline; nullopt when the slope is unknown.
std::optional<double> extrapolated_need(const ThreadView& th, const SchedulerView& view) {
    const auto& h = th.history;
    if (h.size() < 2) {
        return std::nullopt;
    }
    const auto& a = h[h.size() - 2];
    const auto& b = h.back();
    const double du = b.cumulative - a.cumulative;
    const double de = a.error - b.error;
    if (!(du > 0.0) || !(de > 0.0)) {
        return std::nullopt;
    }
    const double units = std::max(0.0, b.error - view.epsilon) * du / de;
    const double per_slot = units / static_cast<double>(th.deadline - view.timeslot + 1);
    return view.capacity > 0.0 ? per_slot / view.capacity : 0.0;
}

std::map<ThreadId, double> allocate_edf(const SchedulerView& view) {
    std::vector<const ThreadView*> order;
    for (const auto& th : view.threads) {
        order.push_back(&th);
    }
    std::stable_sort(order.begin(), order.end(), [](const ThreadView* a, const ThreadView* b) {
        return a->deadline != b->deadline ? a->deadline < b->deadline : a->id < b->id;
    });
    const double fair = view.eta_cap / static_cast<double>(order.size());
    double remaining = view.eta_cap;
    std::map<ThreadId, double> out;
    for (const auto* th : order) {
        const double want = extrapolated_need(*th, view).value_or(fair);
        const double grant = std::clamp(want, 0.0, remaining);
        out[th->id] = grant;
        remaining = std::max(0.0, remaining - grant);
    }
    return out;
}

int plateau_streak(const std::vector<Observation>& h, const AdaptiveParams& p) {
    int streak = 0;
    for (std::size_t j = h.size(); j >= static_cast<std::size_t>(p.window); --j) {
        if (!detect_plateau(std::span<const Observation>(h.data(), j), p.window, p.min_rel_drop)) {
            break;
        }
        ++streak;
    }
    return streak;
}

bool hopeless(const ThreadView& th, const SchedulerView& view, const AdaptiveParams& p) {
    const auto& h = th.history;
    if (h.size() < static_cast<std::size_t>(p.lookback)) {
        return false;
    }
    const double last = h.back().error;
    if (last <= view.epsilon) {
        return false;
    }
    const double required = (last - view.epsilon) / static_cast<double>(th.deadline - view.timeslot + 1);
    return required > p.hopeless_factor * estimate_marginal_gain(h, p.lookback);
}

std::map<ThreadId, double> allocate_adaptive(const StrategyConfig& s, const SchedulerView& view) {
    const auto& p = s.adaptive;
    std::map<ThreadId, double> out;
    std::vector<const ThreadView*> active;
    for (const auto& th : view.threads) {
        if (hopeless(th, view, p)) {
            out[th.id] = 0.0;
        } else {
            active.push_back(&th);
        }
    }
    if (active.empty()) {
        return out;
    }
    const double base = view.eta_cap / static_cast<double>(active.size());
    for (const auto* th : active) {
        out[th->id] = base;
    }

    const ThreadView* recipient = nullptr;
    double best_gain = -1.0;
    double moved = 0.0;
    std::vector<std::pair<ThreadId, double>> shifts;
    for (const auto* th : active) {
        const int streak = plateau_streak(th->history, p);
        if (streak > 0) {
            shifts.emplace_back(th->id, std::min(base, p.step * view.eta_cap * streak));
            continue;
        }
        const double gain = estimate_marginal_gain(th->history, p.lookback);
        if (gain > best_gain) {
            best_gain = gain;
            recipient = th;
        }
    }
    if (recipient == nullptr) {
        return out;
    }
    for (const auto& [id, shift] : shifts) {
        out[id] = base - shift;
        moved += shift;
    }
    out[recipient->id] += moved;
    return out;
}

std::map<ThreadId, double> allocate_scripted(const StrategyConfig& s, const SchedulerView& view) {
    const auto row_index = static_cast<std::size_t>(view.timeslot - 1);
    if (view.timeslot < 1 || row_index >= s.matrix.size()) {
        throw ConfigError("scripted matrix has no row for timeslot " + std::to_string(view.timeslot));
    }
    const auto& row = s.matrix[row_index];
    std::map<ThreadId, double> out;
    for (const auto& th : view.threads) {
        const auto col = static_cast<std::size_t>(th.id - 1);
        const double f = col < row.size() ? row[col] : 0.0;
        if (f != 0.0) {
            out[th.id] = f;
        }
    }
    return out;
}

} // namespace

std::string_view to_string(StrategyKind kind) noexcept {
    switch (kind) {
    case StrategyKind::uniform: return "uniform";
    case StrategyKind::edf_greedy: return "edf-greedy";
    case StrategyKind::adaptive: return "adaptive";
    case StrategyKind::scripted: return "scripted";
    case StrategyKind::exclusive_static: return "exclusive-static";
    case StrategyKind::oracle: return "oracle";
    }
    return "unknown";
}

StrategyKind strategy_kind_from_string(std::string_view name) {
    for (auto k : kAllKinds) {
        if (to_string(k) == name) {
            return k;
        }
    }
    std::string valid;
    for (const auto& n : strategy_kind_names()) {
        valid += (valid.empty() ? "" : ", ") + n;
    }
    throw UsageError("unknown strategy '" + std::string(name) + "' (valid: " + valid + ")");
}

std::vector<std::string> strategy_kind_names() {
    std::vector<std::string> names;
    for (auto k : kAllKinds) {
        names.emplace_back(to_string(k));
    }
    return names;
}

void validate_strategy(const StrategyConfig& s) {
    if (s.quantum && *s.quantum < 1) {
        throw ConfigError("strategy.quantum must be a positive integer");
    }
    const auto& a = s.adaptive;
    if (a.window < 2) {
        throw ConfigError("strategy.window must be >= 2");
    }
    if (a.lookback < 2) {
        throw ConfigError("strategy.lookback must be >= 2");
    }
    if (!(a.min_rel_drop >= 0.0) || !std::isfinite(a.min_rel_drop)) {
        throw ConfigError("strategy.min_rel_drop must be finite and >= 0");
    }
    if (!(a.step > 0.0 && a.step <= 1.0)) {
        throw ConfigError("strategy.step must lie in (0, 1]");
    }
    if (!(a.hopeless_factor > 0.0) || !std::isfinite(a.hopeless_factor)) {
        throw ConfigError("strategy.hopeless_factor must be positive");
    }
    for (double f : s.static_fractions) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw ConfigError("strategy.fractions entries must lie in [0, 1]");
        }
    }
    if (s.kind == StrategyKind::scripted && s.matrix.empty()) {
        throw ConfigError("scripted strategy requires a non-empty allocation matrix");
    }
    for (std::size_t t = 0; t < s.matrix.size(); ++t) {
        for (double f : s.matrix[t]) {
            if (!(f >= 0.0 && f <= 1.0)) {
                throw ConfigError("strategy.matrix[" + std::to_string(t) + "] entries must lie in [0, 1]");
            }
        }
    }
}

double quantum_fraction(double eta, int quantum, int j) noexcept {
    return eta * static_cast<double>(j) / static_cast<double>(quantum);
}

std::map<ThreadId, double> quantize(const std::map<ThreadId, double>& fractions, double eta, int quantum) {
    std::map<ThreadId, double> out;
    if (!(eta > 0.0)) {
        for (const auto& [id, f] : fractions) {
            out[id] = 0.0;
        }
        return out;
    }
    constexpr double slack = 1e-9;
    const double q = static_cast<double>(quantum);
    double total_raw = 0.0;
    std::map<ThreadId, int> units;
    std::vector<std::pair<double, ThreadId>> remainders;
    for (const auto& [id, f] : fractions) {
        const double raw = std::max(0.0, f) * q / eta;
        total_raw += raw;
        const int whole = static_cast<int>(std::floor(raw + slack));
        units[id] = whole;
        if (raw - whole > slack) {
            remainders.emplace_back(raw - whole, id);
        }
    }
    const int total = std::min(quantum, static_cast<int>(std::floor(total_raw + slack)));
    int assigned = std::accumulate(units.begin(), units.end(), 0, [](int acc, const auto& kv) { return acc + kv.second; });
    // Larger remainder first, lower id on ties.
    std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (const auto& [rem, id] : remainders) {
        if (assigned >= total) {
            break;
        }
        ++units[id];
        ++assigned;
    }
    // Inputs summing above eta cannot be fixed by rounding; trim from the
    // highest ids so the row stays on the grid and within the cap.
    for (auto it = units.rbegin(); it != units.rend() && assigned > quantum; ++it) {
        const int cut = std::min(it->second, assigned - quantum);
        it->second -= cut;
        assigned -= cut;
    }
    for (const auto& [id, u] : units) {
        out[id] = quantum_fraction(eta, quantum, u);
    }
    return out;
}

bool detect_plateau(std::span<const Observation> history, int window, double min_rel_drop) {
    if (window < 2 || history.size() < static_cast<std::size_t>(window)) {
        return false;
    }
    const double first = history[history.size() - static_cast<std::size_t>(window)].error;
    const double last = history.back().error;
    if (first <= 0.0) {
        return true;
    }
    return (first - last) / first < min_rel_drop;
}

double estimate_marginal_gain(std::span<const Observation> history, int lookback) {
    if (lookback < 2 || history.size() < static_cast<std::size_t>(lookback)) {
        return 0.0;
    }
    const auto& a = history[history.size() - static_cast<std::size_t>(lookback)];
    const auto& b = history.back();
    const double slots = static_cast<double>(b.timeslot - a.timeslot);
    if (!(slots > 0.0)) {
        return 0.0;
    }
    return std::max(0.0, (a.error - b.error) / slots);
}

AllocationRow allocate(const StrategyConfig& strategy, const SchedulerView& view) {
    AllocationRow row;
    row.timeslot = view.timeslot;
    if (strategy.kind == StrategyKind::oracle) {
        throw ConfigError("oracle strategy must be resolved to its witness schedule before allocation");
    }
    if (strategy.kind == StrategyKind::scripted) {
        row.fractions = allocate_scripted(strategy, view);
        return row;
    }
    if (view.threads.empty()) {
        return row;
    }
    switch (strategy.kind) {
    case StrategyKind::uniform: row.fractions = allocate_uniform(view); break;
    case StrategyKind::exclusive_static: row.fractions = allocate_exclusive(strategy, view); break;
    case StrategyKind::edf_greedy: row.fractions = allocate_edf(view); break;
    case StrategyKind::adaptive: row.fractions = allocate_adaptive(strategy, view); break;
    default: break;
    }
    if (strategy.quantum) {
        row.fractions = quantize(row.fractions, view.eta_cap, *strategy.quantum);
    }
    return row;
}

} // namespace coresched
