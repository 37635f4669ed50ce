// Exact evaluation of the correlators <tau_{d1}...tau_{dn}>_{g,n} via the
// Virasoro constraints in Dijkgraaf-Verlinde-Verlinde form, specialized to
// the string equation (k = -1) and dilaton equation (k = 0) whenever a part
// equal to 0 or 1 is present.
//
// Rule priority is string -> dilaton -> Virasoro: the first two have linear
// branching while the full relation carries the separating sum over subsets,
// so they are always preferred. Each rule strictly decreases (sum of parts,
// then n), which bounds the recursion depth by 3g-2+n for an on-shell root.
//
// Every computed value is memoized on the canonical key (genus, sorted
// parts). The cache tolerates concurrent readers and idempotent concurrent
// inserts, so sweeps may fan out over worker threads; values are identical
// regardless of scheduling.
#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psi/arith.hpp"
#include "psi/partition.hpp"

namespace psi {

// Which part plays tau_{k+1} in the full Virasoro relation. The value is
// pivot-independent (tested); the smallest part keeps the non-separating
// and separating sums short, and is the only policy that scales to large
// genus. LargestPart is retained for cross-checks.
enum class PivotPolicy { SmallestPart, LargestPart };

inline constexpr std::uint64_t kDefaultWorkBudget = std::uint64_t{1} << 62;

struct EngineOptions {
    PivotPolicy pivot = PivotPolicy::SmallestPart;
    std::uint64_t work_budget = kDefaultWorkBudget;  // recursion node cap
    bool record_trace = false;
};

class WorkBudgetExhausted : public std::runtime_error {
  public:
    explicit WorkBudgetExhausted(std::uint64_t budget)
        : std::runtime_error("correlator work budget exhausted (" + std::to_string(budget) +
                             " nodes)") {}
};

enum class RecursionRule { Base, String, Dilaton, Virasoro, Zero };

struct TraceEntry {
    RecursionRule rule;
    CorrelatorKey key;
    int depth;
};

// Memo table from canonical keys to exact values. Inserts are idempotent:
// re-inserting a key with a different value is a logic error and throws.
class MemoCache {
  public:
    std::optional<ExactRational> lookup(const CorrelatorKey& key) const {
        std::shared_lock lock(mu_);
        auto it = map_.find(key);
        if (it == map_.end()) {
            misses_.fetch_add(1, std::memory_order_relaxed);
            return std::nullopt;
        }
        hits_.fetch_add(1, std::memory_order_relaxed);
        return it->second;
    }

    void insert(const CorrelatorKey& key, const ExactRational& value) {
        std::unique_lock lock(mu_);
        auto [it, fresh] = map_.try_emplace(key, value);
        if (!fresh && !(it->second == value))
            throw std::logic_error("MemoCache: conflicting value for key g=" +
                                   std::to_string(key.genus) + ", d=" + to_text(key.parts));
    }

    std::size_t size() const {
        std::shared_lock lock(mu_);
        return map_.size();
    }
    std::uint64_t hits() const { return hits_.load(std::memory_order_relaxed); }
    std::uint64_t misses() const { return misses_.load(std::memory_order_relaxed); }

    void clear() {
        std::unique_lock lock(mu_);
        map_.clear();
    }

    // Snapshot in deterministic (sorted-key) order, for persistence.
    std::vector<std::pair<CorrelatorKey, ExactRational>> sorted_entries() const {
        std::vector<std::pair<CorrelatorKey, ExactRational>> out;
        {
            std::shared_lock lock(mu_);
            out.reserve(map_.size());
            for (const auto& kv : map_)
                out.push_back(kv);
        }
        std::sort(out.begin(), out.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        return out;
    }

  private:
    mutable std::shared_mutex mu_;
    std::unordered_map<CorrelatorKey, ExactRational, CorrelatorKeyHash> map_;
    mutable std::atomic<std::uint64_t> hits_{0};
    mutable std::atomic<std::uint64_t> misses_{0};
};

class CorrelatorEngine {
  public:
    explicit CorrelatorEngine(EngineOptions opts = {}) : opts_(opts) {}

    // <tau_{d1}...tau_{dn}>_{g,n}. Off the dimension shell (or for the
    // unstable (0,1), (0,2) cases) the value is 0.
    ExactRational correlator(long long g, const Partition& d) {
        validate(g, d);
        return eval(g, canonicalize(d), 1);
    }

    // One application of the full Virasoro relation with the pivot forced
    // to the given index of the canonical form; recursion below the first
    // step follows the engine policy. Exposed to test pivot independence.
    ExactRational correlator_with_pivot(long long g, const Partition& d,
                                        std::size_t pivot_index) {
        validate(g, d);
        const Partition sorted = canonicalize(d);
        if (pivot_index >= sorted.size())
            throw std::invalid_argument("correlator_with_pivot: pivot index out of range");
        if (!dimension_ok(g, sorted))
            return 0;
        return virasoro_sum(g, sorted, pivot_index, 1);
    }

    MemoCache& cache() { return cache_; }
    const MemoCache& cache() const { return cache_; }

    std::uint64_t nodes() const { return nodes_.load(std::memory_order_relaxed); }
    const EngineOptions& options() const { return opts_; }

    std::vector<TraceEntry> trace() const {
        std::lock_guard lock(trace_mu_);
        return trace_;
    }
    void clear_trace() {
        std::lock_guard lock(trace_mu_);
        trace_.clear();
    }

  private:
    static void validate(long long g, const Partition& d) {
        if (g < 0)
            throw std::invalid_argument("correlator: genus must be >= 0");
        if (d.empty())
            throw std::invalid_argument("correlator: partition must be nonempty");
        for (Part p : d)
            if (p < 0)
                throw std::invalid_argument("correlator: parts must be >= 0");
    }

    void record(RecursionRule rule, long long g, const Partition& parts, int depth) {
        if (!opts_.record_trace)
            return;
        std::lock_guard lock(trace_mu_);
        trace_.push_back({rule, CorrelatorKey{g, parts}, depth});
    }

    // parts must already be canonical (sorted non-increasing).
    ExactRational eval(long long g, Partition parts, int depth) {
        if (!dimension_ok(g, parts)) {
            record(RecursionRule::Zero, g, parts, depth);
            return 0;
        }
        const CorrelatorKey key{g, std::move(parts)};
        if (auto hit = cache_.lookup(key))
            return *hit;

        if (nodes_.fetch_add(1, std::memory_order_relaxed) + 1 > opts_.work_budget)
            throw WorkBudgetExhausted(opts_.work_budget);

        const Partition& d = key.parts;
        const auto n = d.size();
        ExactRational value;
        RecursionRule rule;

        if (g == 0 && n == 3 && d[0] == 0) {
            value = 1;  // <tau_0^3> = 1
            rule = RecursionRule::Base;
        } else if (g == 1 && n == 1 && d[0] == 1) {
            value = ExactRational(1, 24);  // <tau_1> = 1/24
            rule = RecursionRule::Base;
        } else if (d.back() == 0) {
            // string equation: drop one tau_0, lower each remaining index;
            // terms whose index would become negative are missing
            Partition rest(d.begin(), d.end() - 1);
            for (std::size_t j = 0; j < rest.size(); ++j) {
                if (rest[j] == 0)
                    continue;
                Partition child = rest;
                child[j] -= 1;
                value += eval(g, canonicalize(std::move(child)), depth + 1);
            }
            rule = RecursionRule::String;
        } else if (d.back() == 1) {
            // dilaton equation: <tau_1 d>_{g,m+1} = (2g-2+m) <d>_{g,m}
            Partition rest(d.begin(), d.end() - 1);
            const auto m = static_cast<long long>(rest.size());
            value = make_integer(2 * g - 2 + m) * eval(g, std::move(rest), depth + 1);
            rule = RecursionRule::Dilaton;
        } else {
            const std::size_t pivot =
                opts_.pivot == PivotPolicy::SmallestPart ? n - 1 : std::size_t{0};
            value = virasoro_sum(g, d, pivot, depth);
            rule = RecursionRule::Virasoro;
        }

        record(rule, g, d, depth);
        cache_.insert(key, value);
        return value;
    }

    // Full three-term relation for <tau_{k+1} tau_{d1}...tau_{dm}>_g with
    // tau_{k+1} at pivot_index of the sorted tuple. Handles k = -1 and
    // k = 0 too (they degenerate to string/dilaton, with empty sums).
    ExactRational virasoro_sum(long long g, const Partition& sorted, std::size_t pivot_index,
                               int depth) {
        const long long k = sorted[pivot_index] - 1;
        Partition rest;
        rest.reserve(sorted.size() - 1);
        for (std::size_t i = 0; i < sorted.size(); ++i)
            if (i != pivot_index)
                rest.push_back(sorted[i]);
        const auto m = rest.size();

        ExactRational acc;

        // join term: sum over j of (2k+2dj+1)!!/(2dj-1)!! <...tau_{dj+k}...>_g
        for (std::size_t j = 0; j < m; ++j) {
            const long long dj = rest[j];
            if (dj + k < 0)
                continue;
            Integer coeff;
            mpz_divexact(coeff.get_mpz_t(), double_factorial(2 * k + 2 * dj + 1).get_mpz_t(),
                         double_factorial(2 * dj - 1).get_mpz_t());
            Partition child = rest;
            child[j] += k;
            acc += coeff * eval(g, canonicalize(std::move(child)), depth + 1);
        }

        if (k >= 1) {
            // genus-lowering term: (1/2) sum_{r+s=k-1} (2r+1)!!(2s+1)!!
            // <tau_r tau_s d>_{g-1}
            ExactRational lowering;
            if (g >= 1) {
                for (long long r = 0; r < k; ++r) {
                    const long long s = k - 1 - r;
                    Partition child = rest;
                    child.push_back(r);
                    child.push_back(s);
                    lowering += (double_factorial(2 * r + 1) * double_factorial(2 * s + 1)) *
                                eval(g - 1, canonicalize(std::move(child)), depth + 1);
                }
            }

            // separating term: (1/2) sum over I+J = {1..m}, r+s = k-1 and
            // g' of <tau_r d_I>_{g'} <tau_s d_J>_{g-g'}. For fixed (I, r)
            // at most one g' gives two on-shell factors; all other
            // summands (off-shell or unstable) are zero and are skipped.
            ExactRational separating;
            if (m >= 64)
                throw std::logic_error("virasoro_sum: separating sum over >= 2^64 subsets");
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
                Part sum_i = 0;
                int len_i = 0;
                for (std::size_t b = 0; b < m; ++b)
                    if (mask >> b & 1) {
                        sum_i += rest[b];
                        ++len_i;
                    }
                const int len_j = static_cast<int>(m) - len_i;
                for (long long r = 0; r < k; ++r) {
                    const long long s = k - 1 - r;
                    const long long t = r + sum_i + 2 - len_i;
                    if (t % 3 != 0)
                        continue;
                    const long long gp = t / 3;
                    if (gp < 0 || gp > g)
                        continue;
                    if ((gp == 0 && len_i + 1 <= 2) || (g - gp == 0 && len_j + 1 <= 2))
                        continue;  // unstable factor
                    Partition left, right;
                    left.reserve(static_cast<std::size_t>(len_i) + 1);
                    right.reserve(static_cast<std::size_t>(len_j) + 1);
                    left.push_back(r);
                    right.push_back(s);
                    for (std::size_t b = 0; b < m; ++b)
                        (mask >> b & 1 ? left : right).push_back(rest[b]);
                    const ExactRational f1 = eval(gp, canonicalize(std::move(left)), depth + 1);
                    const ExactRational f2 =
                        eval(g - gp, canonicalize(std::move(right)), depth + 1);
                    separating +=
                        (double_factorial(2 * r + 1) * double_factorial(2 * s + 1)) * (f1 * f2);
                }
            }

            acc += (lowering + separating) / 2;
        }

        return acc / ExactRational(double_factorial(2 * k + 3));
    }

    EngineOptions opts_;
    MemoCache cache_;
    std::atomic<std::uint64_t> nodes_{0};
    mutable std::mutex trace_mu_;
    std::vector<TraceEntry> trace_;
};

// Classical closed form at genus 0: <tau_{d1}...tau_{dn}>_{0,n} =
// (n-3)! / (d_1! ... d_n!). Kept independent of the recursion so the two
// routes can be compared against each other.
inline ExactRational genus0_oracle(const Partition& d) {
    const auto n = static_cast<long long>(d.size());
    if (n < 3 || part_sum(d) != n - 3)
        throw std::domain_error("genus0_oracle: need n >= 3 and sum(d) = n-3");
    Integer den = 1;
    for (Part p : d) {
        if (p < 0)
            throw std::invalid_argument("genus0_oracle: parts must be >= 0");
        den *= factorial(p);
    }
    return ExactRational(factorial(n - 3), den);
}

}  // namespace psi
