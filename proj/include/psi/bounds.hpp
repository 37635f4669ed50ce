// Closed-form quantities surrounding the correlators: the floor-bracket
// approximant, the relative error epsilon, the lower-bound factor
// lambda(g,L), the delta terms measuring how the string / dilaton /
// Virasoro relations act on floor brackets, and the closed-form product
// for epsilon((1^{n-1}, 3g-2)).
//
// Everything here is exact rational arithmetic; there are no tolerances.
#pragma once

#include <stdexcept>
#include <string>

#include "psi/arith.hpp"
#include "psi/correlator.hpp"
#include "psi/partition.hpp"

namespace psi {

// |tau_{d1}...tau_{dn}|_{g,n} = (6g-5+2n)!! / prod (2di+1)!! * 1/(g! 24^g).
// Defined by the formula alone; no dimension constraint. The normalization
// targets g >= 1, so g = 0 is rejected.
inline ExactRational floor_bracket(long long g, const Partition& d) {
    if (g < 1)
        throw std::domain_error("floor_bracket: genus must be >= 1");
    if (d.empty())
        throw std::invalid_argument("floor_bracket: partition must be nonempty");
    const auto n = static_cast<long long>(d.size());
    Integer den = factorial(g) * int_pow(24, g);
    for (Part p : d) {
        if (p < 0)
            throw std::invalid_argument("floor_bracket: parts must be >= 0");
        den *= double_factorial(2 * p + 1);
    }
    return ExactRational(double_factorial(6 * g - 5 + 2 * n), den);
}

// epsilon(d) defined by <d>_{g,n} = |d|_{g,n} * (1 + epsilon(d)).
// Only meaningful on the dimension shell; off-shell queries are errors,
// not zeros.
inline ExactRational epsilon(CorrelatorEngine& engine, long long g, const Partition& d) {
    if (!dimension_ok(g, d))
        throw std::domain_error("epsilon: partition is off the dimension shell (need sum = " +
                                std::to_string(3 * g - 3 + static_cast<long long>(d.size())) +
                                ")");
    return engine.correlator(g, d) / floor_bracket(g, d) - ExactRational(1);
}

// epsilon((1^{n-1}, 3g-2)) as the telescoped product
//   prod_{j=0}^{n-2} (6g-3+3j)/(6g-1+2j)  -  1,
// with the empty product (n = 1) giving 0.
inline ExactRational epsilon_ones_closed_form(long long g, long long n) {
    if (g < 1 || n < 1)
        throw std::domain_error("epsilon_ones_closed_form: need g >= 1 and n >= 1");
    ExactRational prod = 1;
    for (long long j = 0; j + 2 <= n; ++j)
        prod *= ExactRational(6 * g - 3 + 3 * j, 6 * g - 1 + 2 * j);
    return prod - ExactRational(1);
}

// lambda(g,L) = (prod_{i=0}^{L-1} (1 - 1/(6(g-i)+1))) * (1 - 2/(6(g-L)-1)),
// defined for g > L >= 0 and always in (0,1). lambda(g,0) = 1 - 2/(6g-1).
inline ExactRational lambda_bound(long long g, long long L) {
    if (L < 0 || g <= L)
        throw std::domain_error("lambda_bound: need g > L >= 0");
    ExactRational v = 1;
    for (long long i = 0; i < L; ++i)
        v *= ExactRational(6 * (g - i), 6 * (g - i) + 1);
    v *= ExactRational(6 * (g - L) - 3, 6 * (g - L) - 1);
    return v;
}

// delta_string(0^{k+1}, d) = (n - k - 1) / (6g - 3 + 2n), where d has
// n - k strictly positive entries summing to 3g - 2 + n.
inline ExactRational delta_string(long long g, long long n, long long k) {
    if (g < 1 || k < 0 || n - k < 1)
        throw std::domain_error("delta_string: need g >= 1, k >= 0, n - k >= 1");
    return ExactRational(n - k - 1, 6 * g - 3 + 2 * n);
}

// delta_dilaton(1, d) = (n - 3) / (6g - 3 + 2n).
inline ExactRational delta_dilaton(long long g, long long n) {
    if (g < 1 || n < 1)
        throw std::domain_error("delta_dilaton: need g >= 1 and n >= 1");
    return ExactRational(n - 3, 6 * g - 3 + 2 * n);
}

// delta_Virasoro(k+1, d) = (n-3)/(6g-3+2n) - 2k(2n-5)/((6g-3+2n)(6g-5+2n)).
inline ExactRational delta_virasoro(long long g, long long n, long long k) {
    if (g < 1 || n < 1 || k < 0)
        throw std::domain_error("delta_virasoro: need g >= 1, n >= 1, k >= 0");
    const long long a = 6 * g - 3 + 2 * n;
    const long long b = 6 * g - 5 + 2 * n;
    return ExactRational(n - 3, a) - ExactRational(2 * k * (2 * n - 5), a * b);
}

}  // namespace psi
