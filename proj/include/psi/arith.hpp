// Exact integer and rational primitives backing every formula in the
// library: arbitrary-precision integers (GMP), canonical reduced
// rationals, and memoized factorial / double-factorial tables.
#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace psi {

using Integer = mpz_class;

// gmpxx constructs from long but not long long; identical on this target
static_assert(sizeof(long) == sizeof(long long), "LP64 target expected");

inline Integer make_integer(long long v) { return Integer(static_cast<long>(v)); }

// k!! = k(k-2)(k-4)..., with (-1)!! = 0!! = 1 (empty product).
// Arguments below -1 are rejected; nothing in the recursion needs them.
inline Integer double_factorial(long long k) {
    if (k < -1)
        throw std::invalid_argument("double_factorial: argument must be >= -1, got " +
                                    std::to_string(k));
    // table[i] = (i-1)!!, so table[0] = (-1)!! = 1
    static thread_local std::vector<Integer> table{1, 1};
    const std::size_t idx = static_cast<std::size_t>(k + 1);
    while (table.size() <= idx) {
        const std::size_t i = table.size();
        table.push_back(Integer(static_cast<long>(i - 1)) * table[i - 2]);
    }
    return table[idx];
}

inline Integer factorial(long long k) {
    if (k < 0)
        throw std::invalid_argument("factorial: argument must be >= 0, got " + std::to_string(k));
    static thread_local std::vector<Integer> table{1};
    const std::size_t idx = static_cast<std::size_t>(k);
    while (table.size() <= idx) {
        const std::size_t i = table.size();
        table.push_back(Integer(static_cast<long>(i)) * table[i - 1]);
    }
    return table[idx];
}

inline Integer binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n)
        return 0;
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

inline Integer int_pow(long long base, long long exp) {
    if (exp < 0)
        throw std::invalid_argument("int_pow: negative exponent");
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base),
                  static_cast<unsigned long>(exp));
    return r;
}

// Signed rational kept in canonical form at all times: denominator > 0,
// gcd(|num|, den) = 1. No floating point is involved anywhere; approx()
// exists only for report columns that are explicitly labeled approximate.
class ExactRational {
  public:
    ExactRational() : q_(0) {}
    ExactRational(long long v) : q_(static_cast<long>(v)) {}  // NOLINT: implicit by design
    explicit ExactRational(const Integer& v) : q_(v) {}
    ExactRational(const Integer& num, const Integer& den) {
        if (den == 0)
            throw std::domain_error("ExactRational: zero denominator");
        q_ = mpq_class(num, den);
        q_.canonicalize();
    }
    ExactRational(long long num, long long den)
        : ExactRational(Integer(static_cast<long>(num)), Integer(static_cast<long>(den))) {}

    // Accepts the canonical text forms "num" and "num/den".
    static ExactRational parse(std::string_view text) {
        const auto slash = text.find('/');
        const std::string num_part(text.substr(0, slash));
        mpq_class q;
        if (slash == std::string_view::npos) {
            if (num_part.empty() || mpz_set_str(mpq_numref(q.get_mpq_t()), num_part.c_str(), 10) != 0)
                throw std::invalid_argument("ExactRational::parse: bad integer '" +
                                            std::string(text) + "'");
        } else {
            const std::string den_part(text.substr(slash + 1));
            if (num_part.empty() || den_part.empty() ||
                mpz_set_str(mpq_numref(q.get_mpq_t()), num_part.c_str(), 10) != 0 ||
                mpz_set_str(mpq_denref(q.get_mpq_t()), den_part.c_str(), 10) != 0)
                throw std::invalid_argument("ExactRational::parse: bad rational '" +
                                            std::string(text) + "'");
            if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
                throw std::invalid_argument("ExactRational::parse: zero denominator in '" +
                                            std::string(text) + "'");
        }
        q.canonicalize();
        ExactRational r;
        r.q_ = std::move(q);
        return r;
    }

    Integer numerator() const { return q_.get_num(); }
    Integer denominator() const { return q_.get_den(); }
    bool is_zero() const { return mpq_sgn(q_.get_mpq_t()) == 0; }
    int sign() const { return mpq_sgn(q_.get_mpq_t()); }

    // Canonical text form: "num/den", shortened to "num" when den = 1.
    std::string str() const {
        if (q_.get_den() == 1)
            return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    double approx() const { return q_.get_d(); }

    ExactRational& operator+=(const ExactRational& o) { q_ += o.q_; return *this; }
    ExactRational& operator-=(const ExactRational& o) { q_ -= o.q_; return *this; }
    ExactRational& operator*=(const ExactRational& o) { q_ *= o.q_; return *this; }
    ExactRational& operator/=(const ExactRational& o) {
        if (o.is_zero())
            throw std::domain_error("ExactRational: division by zero");
        q_ /= o.q_;
        return *this;
    }

    friend ExactRational operator+(ExactRational a, const ExactRational& b) { return a += b; }
    friend ExactRational operator-(ExactRational a, const ExactRational& b) { return a -= b; }
    friend ExactRational operator*(ExactRational a, const ExactRational& b) { return a *= b; }
    friend ExactRational operator/(ExactRational a, const ExactRational& b) { return a /= b; }
    friend ExactRational operator-(ExactRational a) {
        a.q_ = -a.q_;
        return a;
    }

    friend ExactRational operator*(const Integer& a, ExactRational b) {
        b.q_ *= a;
        return b;
    }

    friend bool operator==(const ExactRational& a, const ExactRational& b) {
        return mpq_equal(a.q_.get_mpq_t(), b.q_.get_mpq_t()) != 0;
    }
    friend std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b) {
        const int c = mpq_cmp(a.q_.get_mpq_t(), b.q_.get_mpq_t());
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

  private:
    mpq_class q_;
};

}  // namespace psi
