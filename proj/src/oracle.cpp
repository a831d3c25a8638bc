#include <coresched/oracle.hpp>

#include <coresched/error.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <unordered_set>

namespace coresched {

namespace {

struct KeyHash {
    std::size_t operator()(const std::vector<std::uint64_t>& key) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (auto v : key) {
            h ^= v;
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

// Feasibility search for one candidate success set. Rows always spend
// exactly Q quanta on the unfinished members that are alive, because extra
// data can only bring a thread's completion forward.
class SubsetSearch {
public:
    SubsetSearch(const TaskBundle& bundle, double epsilon, int quantum,
                 const std::vector<std::vector<std::vector<double>>>& processed, const std::vector<double>& need_lower,
                 const std::vector<double>& supply_from, std::vector<ThreadId> members)
        : bundle_(bundle), epsilon_(epsilon), quantum_(quantum), processed_(processed), need_lower_(need_lower),
          supply_from_(supply_from), members_(std::move(members)), cumulative_(members_.size(), 0.0),
          done_(members_.size(), false),
          path_(static_cast<std::size_t>(bundle.horizon), std::vector<int>(bundle.size(), 0)) {}

    bool feasible() { return search(1); }

    const std::vector<std::vector<int>>& path() const noexcept { return path_; }
    std::size_t nodes() const noexcept { return nodes_; }

private:
    const ThreadSpec& spec(std::size_t m) const { return bundle_.thread(members_[m]); }

    double proc(std::size_t m, Timeslot t, int j) const {
        return processed_[static_cast<std::size_t>(members_[m] - 1)][static_cast<std::size_t>(t - 1)]
                         [static_cast<std::size_t>(j)];
    }

    bool hopeless(Timeslot t) const {
        double shortfall = 0.0;
        for (std::size_t m = 0; m < members_.size(); ++m) {
            if (done_[m]) {
                continue;
            }
            const auto& th = spec(m);
            if (t > th.deadline) {
                return true;
            }
            // Best case for this thread alone: every remaining quantum.
            double c = cumulative_[m];
            bool reachable = false;
            for (Timeslot s = std::max(t, th.begin); s <= th.deadline; ++s) {
                c += proc(m, s, quantum_);
                if (curve_true_error(th.curve, c) <= epsilon_) {
                    reachable = true;
                    break;
                }
            }
            if (!reachable) {
                return true;
            }
            shortfall += std::max(0.0, need_lower_[static_cast<std::size_t>(members_[m] - 1)] - cumulative_[m]);
        }
        const double supply = supply_from_[static_cast<std::size_t>(t - 1)];
        return shortfall > 0.0 && shortfall >= supply * (1.0 + 1e-9) + 1e-9;
    }

    std::vector<std::uint64_t> key(Timeslot t) const {
        std::vector<std::uint64_t> k;
        k.reserve(members_.size() + 1);
        k.push_back(static_cast<std::uint64_t>(t));
        for (std::size_t m = 0; m < members_.size(); ++m) {
            k.push_back(done_[m] ? ~0ull : std::bit_cast<std::uint64_t>(cumulative_[m]));
        }
        return k;
    }

    bool all_done() const {
        return std::all_of(done_.begin(), done_.end(), [](bool d) { return d; });
    }

    bool search(Timeslot t) {
        ++nodes_;
        if (all_done()) {
            return true;
        }
        if (t > bundle_.horizon || hopeless(t)) {
            return false;
        }
        auto k = key(t);
        if (failed_.contains(k)) {
            return false;
        }

        std::vector<std::size_t> active;
        for (std::size_t m = 0; m < members_.size(); ++m) {
            if (!done_[m] && spec(m).begin <= t && t <= spec(m).deadline) {
                active.push_back(m);
            }
        }
        std::stable_sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) {
            return spec(a).deadline != spec(b).deadline ? spec(a).deadline < spec(b).deadline
                                                        : members_[a] < members_[b];
        });

        auto& row = path_[static_cast<std::size_t>(t - 1)];
        std::fill(row.begin(), row.end(), 0);
        if (active.empty()) {
            if (search(t + 1)) {
                return true;
            }
            failed_.insert(std::move(k));
            return false;
        }

        std::unordered_set<std::vector<std::uint64_t>, KeyHash> tried;
        std::vector<int> split(active.size(), 0);
        const bool found = enumerate(t, active, split, 0, quantum_, tried);
        if (!found) {
            std::fill(row.begin(), row.end(), 0);
            failed_.insert(std::move(k));
        }
        return found;
    }

    // Splits `left` quanta over active[pos..], earliest deadline first and
    // largest share first.
    bool enumerate(Timeslot t, const std::vector<std::size_t>& active, std::vector<int>& split, std::size_t pos,
                   int left, std::unordered_set<std::vector<std::uint64_t>, KeyHash>& tried) {
        if (pos + 1 == active.size()) {
            split[pos] = left;
            return try_split(t, active, split, tried);
        }
        for (int j = left; j >= 0; --j) {
            split[pos] = j;
            if (enumerate(t, active, split, pos + 1, left - j, tried)) {
                return true;
            }
        }
        return false;
    }

    bool try_split(Timeslot t, const std::vector<std::size_t>& active, const std::vector<int>& split,
                   std::unordered_set<std::vector<std::uint64_t>, KeyHash>& tried) {
        const auto saved_cumulative = cumulative_;
        const auto saved_done = done_;
        bool missed_deadline = false;
        for (std::size_t i = 0; i < active.size(); ++i) {
            const std::size_t m = active[i];
            cumulative_[m] += proc(m, t, split[i]);
            if (curve_true_error(spec(m).curve, cumulative_[m]) <= epsilon_) {
                done_[m] = true;
            } else if (t == spec(m).deadline) {
                missed_deadline = true;
            }
        }
        bool ok = false;
        if (!missed_deadline && tried.insert(key(t + 1)).second) {
            ok = search(t + 1);
        }
        if (ok) {
            auto& row = path_[static_cast<std::size_t>(t - 1)];
            std::fill(row.begin(), row.end(), 0);
            for (std::size_t i = 0; i < active.size(); ++i) {
                row[static_cast<std::size_t>(members_[active[i]] - 1)] = split[i];
            }
        } else {
            cumulative_ = saved_cumulative;
            done_ = saved_done;
        }
        return ok;
    }

    const TaskBundle& bundle_;
    double epsilon_;
    int quantum_;
    const std::vector<std::vector<std::vector<double>>>& processed_;
    const std::vector<double>& need_lower_;
    const std::vector<double>& supply_from_;
    std::vector<ThreadId> members_;
    std::vector<double> cumulative_;
    std::vector<bool> done_;
    std::vector<std::vector<int>> path_;
    std::unordered_set<std::vector<std::uint64_t>, KeyHash> failed_;
    std::size_t nodes_ = 0;
};

// Calls `visit` with every size-`size` subset of `pool` in lexicographic
// order until it returns true.
template <typename Visit>
bool for_each_subset(const std::vector<ThreadId>& pool, std::size_t size, Visit&& visit) {
    std::vector<std::size_t> idx(size);
    for (std::size_t i = 0; i < size; ++i) {
        idx[i] = i;
    }
    while (true) {
        std::vector<ThreadId> subset;
        for (auto i : idx) {
            subset.push_back(pool[i]);
        }
        if (visit(std::move(subset))) {
            return true;
        }
        std::size_t i = size;
        while (i > 0 && idx[i - 1] == pool.size() - size + (i - 1)) {
            --i;
        }
        if (i == 0) {
            return false;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < size; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

} // namespace

OracleResult oracle_max_kappa(const TaskBundle& bundle, double eta, double epsilon, int quantum,
                              const OracleLimits& limits) {
    if (bundle.size() > limits.max_threads || bundle.horizon > limits.max_horizon || quantum > limits.max_quantum ||
        quantum < 1) {
        throw OracleLimitError("oracle instance K=" + std::to_string(bundle.size()) +
                               ", T=" + std::to_string(bundle.horizon) + ", Q=" + std::to_string(quantum) +
                               " is outside the search limits K<=" + std::to_string(limits.max_threads) +
                               ", T<=" + std::to_string(limits.max_horizon) +
                               ", 1<=Q<=" + std::to_string(limits.max_quantum));
    }
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw UsageError("eta must lie in [0, 1]");
    }
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw UsageError("epsilon must lie in (0, 1]");
    }
    require_valid(bundle);

    const auto K = bundle.size();
    const auto T = static_cast<std::size_t>(bundle.horizon);
    OracleResult result;
    result.witness.assign(T, std::vector<double>(K, 0.0));
    if (K == 0) {
        return result;
    }

    std::vector<std::vector<std::vector<double>>> processed(K, std::vector<std::vector<double>>(T));
    for (const auto& th : bundle.threads) {
        for (Timeslot t = 1; t <= bundle.horizon; ++t) {
            auto& cell = processed[static_cast<std::size_t>(th.id - 1)][static_cast<std::size_t>(t - 1)];
            for (int j = 0; j <= quantum; ++j) {
                cell.push_back(std::min(quantum_fraction(eta, quantum, j) * bundle.resources.at(t), th.arrival_cap_at(t)));
            }
        }
    }
    std::vector<double> supply_from(T + 1, 0.0);
    for (std::size_t t = T; t-- > 0;) {
        supply_from[t] = supply_from[t + 1] + quantum_fraction(eta, quantum, quantum) * bundle.resources.capacities[t];
    }

    std::size_t automatic = 0;
    std::vector<ThreadId> candidates;
    std::vector<double> need_lower(K, 0.0);
    for (const auto& th : bundle.threads) {
        if (curve_true_error(th.curve, 0.0) <= epsilon) {
            ++automatic;
            continue;
        }
        double c = 0.0;
        bool reachable = false;
        for (Timeslot t = th.begin; t <= th.deadline && !reachable; ++t) {
            c += processed[static_cast<std::size_t>(th.id - 1)][static_cast<std::size_t>(t - 1)].back();
            reachable = curve_true_error(th.curve, c) <= epsilon;
        }
        if (!reachable) {
            continue;
        }
        candidates.push_back(th.id);
        // Largest data amount known to miss epsilon; any success needs more.
        double lo = 0.0;
        double hi = c;
        for (int i = 0; i < 200 && lo < hi; ++i) {
            const double mid = lo + (hi - lo) / 2.0;
            if (mid <= lo || mid >= hi) {
                break;
            }
            (curve_true_error(th.curve, mid) <= epsilon ? hi : lo) = mid;
        }
        need_lower[static_cast<std::size_t>(th.id - 1)] = lo;
    }

    std::size_t best = 0;
    for (std::size_t size = candidates.size(); size > 0 && best == 0; --size) {
        for_each_subset(candidates, size, [&](std::vector<ThreadId> members) {
            SubsetSearch search(bundle, epsilon, quantum, processed, need_lower, supply_from, std::move(members));
            const bool ok = search.feasible();
            result.nodes_explored += search.nodes();
            if (ok) {
                best = size;
                for (std::size_t t = 0; t < T; ++t) {
                    for (std::size_t k = 0; k < K; ++k) {
                        result.witness[t][k] = quantum_fraction(eta, quantum, search.path()[t][k]);
                    }
                }
            }
            return ok;
        });
    }
    result.successes = automatic + best;
    result.kappa_star = static_cast<double>(result.successes) / static_cast<double>(K);
    return result;
}

} // namespace coresched
