#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "densitylab/rational.hpp"

namespace densitylab {

// Smallest-prime-factor table plus the prime list, built once by a linear
// sieve and immutable afterwards.  spf[n] is defined for 2 <= n <= limit;
// spf[0] = spf[1] = 0.
struct ArithTables {
    std::uint32_t limit = 0;
    std::vector<std::uint32_t> spf;
    std::vector<std::uint32_t> primes;

    bool is_prime(std::uint64_t n) const;
};

// Linear sieve: every composite is struck exactly once.  limit >= 2 required.
ArithTables build_arith_tables(std::uint32_t limit);

// Number of prime factors counted with multiplicity; omega(1) == 0.
// n must lie in [1, tables.limit].
std::uint32_t omega(std::uint64_t n, const ArithTables& tables);

// P+(n): the largest prime factor.  Undefined for n < 2 (std::domain_error).
std::uint32_t largest_prime_factor(std::uint64_t n, const ArithTables& tables);

// True iff no prime divides n to the k-th power.  k >= 2 required; n >= 1.
bool is_kth_power_free(std::uint64_t n, std::uint32_t k, const ArithTables& tables);

// Primes <= limit, ascending.  Standalone (does not need ArithTables).
std::vector<std::uint32_t> primes_up_to(std::uint32_t limit);

// Euler totient by trial division; k >= 1 required.
std::uint64_t euler_phi(std::uint64_t k);

// prod (1 - 1/p) over the given primes.  Inputs must be distinct primes
// (std::invalid_argument otherwise); the empty product is 1.  The exact form
// is for short lists (overflow-guarded); the double form for long ones.
double mertens_product(std::span<const std::uint32_t> primes);
Rational mertens_product_exact(std::span<const std::uint32_t> primes);

// Distinct prime divisors of n, ascending.  n in [1, tables.limit].
std::vector<std::uint32_t> distinct_prime_factors(std::uint64_t n, const ArithTables& tables);

// All prime factors of n with multiplicity, ascending.  n in [2, tables.limit].
std::vector<std::uint32_t> factorize(std::uint64_t n, const ArithTables& tables);

}  // namespace densitylab
