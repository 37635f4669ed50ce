#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "psi/arith.hpp"

using psi::ExactRational;
using psi::Integer;

namespace {

// independent oracle: plain descending product
Integer dfact_by_product(long long k) {
    Integer r = 1;
    for (long long i = k; i >= 2; i -= 2)
        r *= static_cast<long>(i);
    return r;
}

Integer fact_by_product(long long k) {
    Integer r = 1;
    for (long long i = 2; i <= k; ++i)
        r *= static_cast<long>(i);
    return r;
}

}  // namespace

TEST_CASE("double factorial: small values and empty-product convention") {
    CHECK(psi::double_factorial(-1) == 1);
    CHECK(psi::double_factorial(0) == 1);
    CHECK(psi::double_factorial(1) == 1);
    CHECK(psi::double_factorial(5) == 15);
    CHECK(psi::double_factorial(9) == dfact_by_product(9));
    CHECK(psi::double_factorial(9) == 945);
    CHECK_THROWS_AS(psi::double_factorial(-2), std::invalid_argument);
}

TEST_CASE("double factorial agrees with the direct product up to 600") {
    for (long long k = -1; k <= 600; ++k)
        REQUIRE(psi::double_factorial(k) == dfact_by_product(k));
}

TEST_CASE("factorial: small values and errors") {
    CHECK(psi::factorial(0) == 1);
    CHECK(psi::factorial(5) == 120);
    CHECK(psi::factorial(20) == fact_by_product(20));
    CHECK(psi::factorial(20) == Integer("2432902008176640000"));
    CHECK_THROWS_AS(psi::factorial(-1), std::invalid_argument);
}

TEST_CASE("(2m+1)!! * (2m)!! = (2m+1)! for all m <= 200") {
    for (long long m = 0; m <= 200; ++m)
        REQUIRE(psi::double_factorial(2 * m + 1) * psi::double_factorial(2 * m) ==
                psi::factorial(2 * m + 1));
}

TEST_CASE("rational construction normalizes sign and gcd") {
    CHECK(ExactRational(2, -4).str() == "-1/2");
    CHECK(ExactRational(0, 7).str() == "0");
    CHECK(ExactRational(0, 7).numerator() == 0);
    CHECK(ExactRational(0, 7).denominator() == 1);
    CHECK(ExactRational(6, 4).str() == "3/2");
    CHECK(ExactRational(-6, -4).str() == "3/2");
    CHECK_THROWS_AS(ExactRational(1, 0), std::domain_error);
}

TEST_CASE("rational text round trip") {
    for (const char* s : {"0", "1", "-1", "3/2", "-35/143", "2432902008176640000"}) {
        CHECK(ExactRational::parse(s).str() == s);
    }
    CHECK(ExactRational::parse("6/4").str() == "3/2");  // parse canonicalizes
    CHECK_THROWS_AS(ExactRational::parse(""), std::invalid_argument);
    CHECK_THROWS_AS(ExactRational::parse("1/"), std::invalid_argument);
    CHECK_THROWS_AS(ExactRational::parse("/2"), std::invalid_argument);
    CHECK_THROWS_AS(ExactRational::parse("a/2"), std::invalid_argument);
    CHECK_THROWS_AS(ExactRational::parse("1/0"), std::invalid_argument);
}

TEST_CASE("rational arithmetic is exact on random inputs") {
    std::mt19937_64 rng(20240817);
    std::uniform_int_distribution<long long> num(-1000000, 1000000);
    std::uniform_int_distribution<long long> den(1, 1000000);
    for (int i = 0; i < 500; ++i) {
        const long long a = num(rng), b = den(rng), c = num(rng), d = den(rng);
        const ExactRational x(a, b), y(c, d);
        // (a/b + c/d) * b * d = a*d + c*b, exactly
        const ExactRational lhs = (x + y) * ExactRational(b) * ExactRational(d);
        CHECK(lhs == ExactRational(psi::make_integer(a) * psi::make_integer(d) + psi::make_integer(c) * psi::make_integer(b)));
        // results of +,-,*,/ stay in lowest terms with positive denominator
        for (const ExactRational& v :
             {x + y, x - y, x * y, c != 0 ? x / y : x, -x}) {
            REQUIRE(v.denominator() > 0);
            Integer g;
            mpz_gcd(g.get_mpz_t(), v.numerator().get_mpz_t(), v.denominator().get_mpz_t());
            REQUIRE(g == 1);
        }
    }
}

TEST_CASE("rational comparison and division guards") {
    CHECK(ExactRational(1, 3) < ExactRational(1, 2));
    CHECK(ExactRational(-1, 2) < ExactRational(-1, 3));
    CHECK(ExactRational(2, 4) == ExactRational(1, 2));
    CHECK(ExactRational(5, 7).sign() == 1);
    CHECK(ExactRational(-5, 7).sign() == -1);
    CHECK(ExactRational(0).is_zero());
    CHECK_THROWS_AS(ExactRational(1) / ExactRational(0), std::domain_error);
}
