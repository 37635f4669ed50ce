// Verification sweeps: the uniform lower bound epsilon(d) >= lambda(g,L)-1
// over Pi_L families, the two-point sandwich, and the structural checks on
// lambda (monotonicity chain, shift identity, approach to 1).
//
// Sweeps deduplicate partitions by canonical form before computing (epsilon
// is permutation-invariant) but count both the ordered and the canonical
// family for auditability. Fan-out over worker threads shares the engine's
// memo cache; summaries merge associatively, so results are independent of
// the worker count.
#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "psi/arith.hpp"
#include "psi/bounds.hpp"
#include "psi/correlator.hpp"
#include "psi/partition.hpp"

namespace psi {

struct EpsilonReport {
    CorrelatorKey key;
    ExactRational exact_value;
    ExactRational floor_value;
    ExactRational epsilon;
    std::optional<ExactRational> lambda_bound;  // present when a Pi_L bound applies
    bool bound_satisfied = true;
};

inline EpsilonReport make_epsilon_report(CorrelatorEngine& engine, long long g,
                                         const Partition& d,
                                         std::optional<ExactRational> lambda) {
    EpsilonReport r;
    r.key = CorrelatorKey::of(g, d);
    r.exact_value = engine.correlator(g, d);
    r.floor_value = floor_bracket(g, d);
    r.epsilon = r.exact_value / r.floor_value - ExactRational(1);
    r.lambda_bound = std::move(lambda);
    r.bound_satisfied =
        !r.lambda_bound || r.epsilon >= *r.lambda_bound - ExactRational(1);
    return r;
}

struct SweepSummary {
    long long g = 0;
    long long n = 0;  // largest n covered
    long long L = 0;
    std::uint64_t ordered_checked = 0;    // tuples of the ordered family
    std::uint64_t canonical_checked = 0;  // canonical forms actually computed
    std::optional<ExactRational> min_epsilon;
    std::optional<ExactRational> max_epsilon;
    std::vector<Partition> violations;
    bool complete = true;  // false when the work budget ran out mid-sweep
};

namespace detail {

inline void fold_epsilon(SweepSummary& s, const ExactRational& eps) {
    if (!s.min_epsilon || eps < *s.min_epsilon)
        s.min_epsilon = eps;
    if (!s.max_epsilon || eps > *s.max_epsilon)
        s.max_epsilon = eps;
}

}  // namespace detail

// Canonical representatives of the union of Pi_L(3g-3+n, n) over
// n = 1..n_max, sorted, plus the ordered-family cardinality.
struct CanonicalFamily {
    std::vector<Partition> keys;
    std::uint64_t ordered_count = 0;
};

inline CanonicalFamily canonical_pi_l_family(long long g, long long n_max, long long L) {
    CanonicalFamily family;
    std::set<Partition> canonical;
    for (long long n = 1; n <= n_max; ++n) {
        PiLEnumerator stream(3 * g - 3 + n, static_cast<int>(n), L);
        Partition d;
        while (stream.next(d)) {
            ++family.ordered_count;
            canonical.insert(canonicalize(d));
        }
    }
    family.keys.assign(canonical.begin(), canonical.end());
    return family;
}

inline std::vector<Partition> canonical_two_point_family(long long g) {
    std::vector<Partition> keys;
    for (long long k = 0; 2 * k <= 3 * g - 1; ++k)
        keys.push_back(Partition{3 * g - 1 - k, k});
    return keys;
}

// Checks epsilon(d) >= lambda(g,L) - 1 for every canonical
// d in Pi_L(3g-3+n, n), n = 1..n_max. Budget exhaustion yields a partial
// summary flagged incomplete instead of an exception.
inline SweepSummary verify_theorem(CorrelatorEngine& engine, long long g, long long n_max,
                                   long long L, int workers = 1) {
    if (L < 0 || g <= L)
        throw std::domain_error("verify_theorem: need g > L >= 0");
    if (n_max < 1)
        throw std::domain_error("verify_theorem: need n_max >= 1");
    if (workers < 1)
        throw std::domain_error("verify_theorem: need workers >= 1");

    SweepSummary summary;
    summary.g = g;
    summary.n = n_max;
    summary.L = L;
    const ExactRational bound = lambda_bound(g, L) - ExactRational(1);

    const CanonicalFamily family = canonical_pi_l_family(g, n_max, L);
    const std::vector<Partition>& keys = family.keys;
    summary.ordered_checked = family.ordered_count;
    summary.canonical_checked = keys.size();

    const std::size_t nworkers =
        std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(keys.size(), 1));
    std::vector<SweepSummary> partial(nworkers);
    auto run_chunk = [&](std::size_t w) {
        SweepSummary& local = partial[w];
        for (std::size_t i = w; i < keys.size(); i += nworkers) {
            try {
                const ExactRational eps = epsilon(engine, g, keys[i]);
                detail::fold_epsilon(local, eps);
                if (eps < bound)
                    local.violations.push_back(keys[i]);
            } catch (const WorkBudgetExhausted&) {
                local.complete = false;
                return;
            }
        }
    };
    if (nworkers == 1) {
        run_chunk(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nworkers);
        for (std::size_t w = 0; w < nworkers; ++w)
            pool.emplace_back(run_chunk, w);
        for (auto& t : pool)
            t.join();
    }
    for (const auto& local : partial) {
        if (local.min_epsilon)
            detail::fold_epsilon(summary, *local.min_epsilon);
        if (local.max_epsilon)
            detail::fold_epsilon(summary, *local.max_epsilon);
        summary.violations.insert(summary.violations.end(), local.violations.begin(),
                                  local.violations.end());
        summary.complete = summary.complete && local.complete;
    }
    std::sort(summary.violations.begin(), summary.violations.end());
    return summary;
}

// Two-point family at genus g: epsilon(0,3g-1) = 0 and
// epsilon(1,3g-2) = -2/(6g-1) exactly, with every interior
// epsilon(k,3g-1-k), 2 <= k <= (3g-1)/2, strictly between them.
inline SweepSummary verify_two_point(CorrelatorEngine& engine, long long g) {
    if (g < 1)
        throw std::domain_error("verify_two_point: need g >= 1");
    SweepSummary summary;
    summary.g = g;
    summary.n = 2;
    summary.L = 0;
    const ExactRational lower(-2, 6 * g - 1);
    summary.ordered_checked = static_cast<std::uint64_t>(3 * g);  // |Pi(3g-1, 2)|
    try {
        for (long long k = 0; 2 * k <= 3 * g - 1; ++k) {
            const Partition d{k, 3 * g - 1 - k};
            const ExactRational eps = epsilon(engine, g, d);
            ++summary.canonical_checked;
            detail::fold_epsilon(summary, eps);
            const bool ok = k == 0   ? eps.is_zero()
                            : k == 1 ? eps == lower
                                     : (lower < eps && eps.sign() < 0);
            if (!ok)
                summary.violations.push_back(canonicalize(d));
        }
    } catch (const WorkBudgetExhausted&) {
        summary.complete = false;
    }
    return summary;
}

inline long long integer_sqrt(long long v) {
    long long r = 0;
    while ((r + 1) * (r + 1) <= v)
        ++r;
    return r;
}

// Strict chain 1 > lambda(g+1,L) > lambda(g,L) > lambda(g,L+1) > 0 on the
// whole domain up to g_max, together with the exact shift identity
// (1 - 1/(6g+1)) * lambda(g-1,L-1) = lambda(g,L). Rows are evaluated from
// the defining product, so the identity check is not circular.
inline bool lambda_monotonicity_check(long long g_max) {
    if (g_max < 2)
        throw std::domain_error("lambda_monotonicity_check: need g_max >= 2");
    std::vector<ExactRational> prev;  // lambda(g-1, .)
    for (long long g = 1; g <= g_max; ++g) {
        std::vector<ExactRational> row;
        row.reserve(static_cast<std::size_t>(g));
        ExactRational prefix = 1;
        for (long long L = 0; L < g; ++L) {
            row.push_back(prefix * ExactRational(6 * (g - L) - 3, 6 * (g - L) - 1));
            prefix *= ExactRational(6 * (g - L), 6 * (g - L) + 1);
        }
        const ExactRational one = 1;
        for (long long L = 0; L < g; ++L) {
            const auto& v = row[static_cast<std::size_t>(L)];
            if (!(v.sign() > 0 && v < one))
                return false;
            if (L + 1 < g && !(v > row[static_cast<std::size_t>(L + 1)]))
                return false;
            if (L < g - 1 && g >= 2 && !(v > prev[static_cast<std::size_t>(L)]))
                return false;  // lambda(g,L) > lambda(g-1,L)
            if (L >= 1 && g >= 2) {
                const ExactRational lhs =
                    ExactRational(6 * g, 6 * g + 1) * prev[static_cast<std::size_t>(L - 1)];
                if (!(lhs == v))
                    return false;
            }
        }
        prev = std::move(row);
    }
    return true;
}

// Finite surrogate for lambda(g, L(g)) -> 1 with slowly growing L:
// lambda(g, floor(sqrt(g))) > 1 - 10/(6 sqrt(g)) for 2 <= g <= g_max,
// compared exactly via 36 g (1 - lambda)^2 < 100.
inline bool lambda_limit_check(long long g_max) {
    for (long long g = 2; g <= g_max; ++g) {
        const ExactRational gap = ExactRational(1) - lambda_bound(g, integer_sqrt(g));
        if (!(make_integer(36 * g) * (gap * gap) < ExactRational(100)))
            return false;
    }
    return true;
}

// --- rendering ---------------------------------------------------------

inline nlohmann::ordered_json summary_to_json(const SweepSummary& s) {
    nlohmann::ordered_json j;
    j["g"] = s.g;
    j["n"] = s.n;
    j["L"] = s.L;
    j["checked"] = s.canonical_checked;
    j["ordered_checked"] = s.ordered_checked;
    j["min_epsilon"] = s.min_epsilon ? s.min_epsilon->str() : "";
    j["max_epsilon"] = s.max_epsilon ? s.max_epsilon->str() : "";
    auto viol = nlohmann::ordered_json::array();
    for (const auto& d : s.violations)
        viol.push_back(to_text(d));
    j["violations"] = viol;
    j["complete"] = s.complete;
    return j;
}

inline void write_report_csv_header(std::ostream& out) {
    out << "g,n,partition,correlator,floor,epsilon,lambda,satisfied\n";
}

inline void write_report_csv_row(std::ostream& out, const EpsilonReport& r) {
    out << r.key.genus << ',' << r.key.parts.size() << ',' << '"' << to_text(r.key.parts) << '"'
        << ',' << r.exact_value.str() << ',' << r.floor_value.str() << ',' << r.epsilon.str()
        << ',';
    if (r.lambda_bound)
        out << r.lambda_bound->str() << ',' << (r.bound_satisfied ? "true" : "false");
    else
        out << ',';
    out << '\n';
}

}  // namespace psi
