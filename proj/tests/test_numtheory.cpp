#include <doctest.h>

#include <stdexcept>

#include "densitylab/numtheory.hpp"
#include "densitylab/rational.hpp"
#include "oracles.hpp"

using namespace densitylab;

TEST_CASE("linear sieve agrees with trial division") {
    ArithTables t = build_arith_tables(5000);
    auto naive = oracle::primes(5000);
    REQUIRE(t.primes.size() == naive.size());
    for (std::size_t i = 0; i < naive.size(); ++i) CHECK(t.primes[i] == naive[i]);
    for (std::uint64_t n = 2; n <= 5000; ++n) {
        CHECK(t.is_prime(n) == oracle::is_prime(n));
        // Smallest prime factor really divides and really is smallest.
        std::uint32_t p = t.spf[n];
        CHECK(n % p == 0);
        CHECK(t.is_prime(p));
        for (std::uint32_t q = 2; q < p; ++q) CHECK(n % q != 0);
    }
}

TEST_CASE("factorize rebuilds its input, ascending") {
    ArithTables t = build_arith_tables(100000);
    for (std::uint64_t n : {2ull, 97ull, 360ull, 1024ull, 99991ull, 99900ull}) {
        auto f = factorize(n, t);
        std::uint64_t prod = 1;
        for (std::size_t i = 0; i < f.size(); ++i) {
            prod *= f[i];
            CHECK(t.is_prime(f[i]));
            if (i) CHECK(f[i - 1] <= f[i]);
        }
        CHECK(prod == n);
        CHECK(f.size() == omega(n, t));
    }
}

TEST_CASE("prime-count is additive over products") {
    ArithTables t = build_arith_tables(40000);
    for (std::uint64_t a = 2; a <= 200; ++a)
        for (std::uint64_t b = a; b <= 200; b += 17)
            CHECK(omega(a * b, t) == omega(a, t) + omega(b, t));
    for (std::uint64_t n = 1; n <= 2000; ++n) CHECK(omega(n, t) == oracle::omega(n));
    CHECK_THROWS_AS(omega(40001, t), std::out_of_range);
}

TEST_CASE("largest prime factor") {
    ArithTables t = build_arith_tables(10000);
    CHECK(largest_prime_factor(2310, t) == 11);
    CHECK(largest_prime_factor(9973, t) == 9973);
    CHECK(largest_prime_factor(1024, t) == 2);
    CHECK_THROWS_AS(largest_prime_factor(1, t), std::domain_error);
}

TEST_CASE("power-free predicates match the oracle") {
    ArithTables t = build_arith_tables(3000);
    for (std::uint64_t n = 1; n <= 3000; ++n) {
        CHECK(is_kth_power_free(n, 2, t) == oracle::squarefree(n));
        CHECK(is_kth_power_free(n, 3, t) == oracle::cubefree(n));
    }
}

TEST_CASE("euler phi matches the gcd count and the prime product") {
    ArithTables t = build_arith_tables(500);
    for (std::uint64_t k = 1; k <= 300; ++k) CHECK(euler_phi(k) == oracle::phi(k));
    // phi(k)/k equals the product of (1 - 1/p) over the distinct primes of k.
    for (std::uint64_t k : {6ull, 12ull, 30ull, 360ull, 497ull}) {
        auto ps = distinct_prime_factors(k, t);
        Rational expect = mertens_product_exact(ps);
        CHECK(Rational(static_cast<long long>(euler_phi(k)), static_cast<long long>(k)) == expect);
    }
}

TEST_CASE("sieve-product helpers") {
    std::vector<std::uint32_t> ps{2, 3, 5};
    // (1/2)(2/3)(4/5) = 4/15
    CHECK(mertens_product_exact(ps) == Rational(4, 15));
    CHECK(mertens_product(ps) == doctest::Approx(4.0 / 15.0));
    std::vector<std::uint32_t> dup{2, 2};
    CHECK_THROWS_AS(mertens_product_exact(dup), std::invalid_argument);
    std::vector<std::uint32_t> comp{6};
    CHECK_THROWS_AS(mertens_product(comp), std::invalid_argument);
}

TEST_CASE("rational parsing and arithmetic") {
    CHECK(Rational::parse("0.1") == Rational(1, 10));
    CHECK(Rational::parse("3/7") == Rational(3, 7));
    CHECK(Rational::parse("0.3") == Rational(3, 10));
    CHECK(Rational::parse("1") == Rational(1));
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK((Rational(1, 3) + Rational(1, 6)) == Rational(1, 2));
    CHECK((Rational(1, 2) - Rational(1, 3)) == Rational(1, 6));
    CHECK(Rational(7, 2).floor_u64() == 3);
    CHECK(Rational(1, 10).str() == "1/10");
    CHECK(Rational(1, 2) < Rational(2, 3));
    CHECK_THROWS_AS(Rational::parse("x"), std::invalid_argument);
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
}
