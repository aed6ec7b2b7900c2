#include "densitylab/numtheory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace densitylab {

namespace {

void check_in_table(std::uint64_t n, const ArithTables& tables, const char* who) {
    if (n < 1 || n > tables.limit)
        throw std::out_of_range(std::string(who) + ": n=" + std::to_string(n) +
                                " outside table range [1, " + std::to_string(tables.limit) + "]");
}

// Trial-division primality for inputs that may exceed any table.
bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

void check_prime_list(std::span<const std::uint32_t> primes, const char* who) {
    for (std::size_t i = 0; i < primes.size(); ++i) {
        if (!is_prime_u64(primes[i]))
            throw std::invalid_argument(std::string(who) + ": " + std::to_string(primes[i]) + " is not prime");
        for (std::size_t j = i + 1; j < primes.size(); ++j)
            if (primes[i] == primes[j])
                throw std::invalid_argument(std::string(who) + ": duplicate prime " + std::to_string(primes[i]));
    }
}

}  // namespace

bool ArithTables::is_prime(std::uint64_t n) const {
    if (n > limit) throw std::out_of_range("ArithTables::is_prime: n exceeds table limit");
    return n >= 2 && spf[n] == n;
}

ArithTables build_arith_tables(std::uint32_t limit) {
    if (limit < 2) throw std::invalid_argument("build_arith_tables: limit must be >= 2");
    ArithTables t;
    t.limit = limit;
    t.spf.assign(static_cast<std::size_t>(limit) + 1, 0);
    t.primes.reserve(limit > 100 ? static_cast<std::size_t>(limit / std::max(1.0, std::log(limit) - 1.1)) : 32);
    for (std::uint32_t n = 2; n <= limit; ++n) {
        if (t.spf[n] == 0) {
            t.spf[n] = n;
            t.primes.push_back(n);
        }
        for (std::uint32_t p : t.primes) {
            if (p > t.spf[n]) break;
            std::uint64_t np = static_cast<std::uint64_t>(p) * n;
            if (np > limit) break;
            t.spf[np] = p;
        }
    }
    return t;
}

std::uint32_t omega(std::uint64_t n, const ArithTables& tables) {
    check_in_table(n, tables, "omega");
    std::uint32_t count = 0;
    while (n > 1) {
        std::uint32_t p = tables.spf[n];
        while (n % p == 0) {
            n /= p;
            ++count;
        }
    }
    return count;
}

std::uint32_t largest_prime_factor(std::uint64_t n, const ArithTables& tables) {
    if (n < 2) throw std::domain_error("largest_prime_factor: undefined for n=" + std::to_string(n));
    check_in_table(n, tables, "largest_prime_factor");
    std::uint32_t best = 0;
    while (n > 1) {
        std::uint32_t p = tables.spf[n];
        best = std::max(best, p);
        while (n % p == 0) n /= p;
    }
    return best;
}

bool is_kth_power_free(std::uint64_t n, std::uint32_t k, const ArithTables& tables) {
    if (k < 2) throw std::invalid_argument("is_kth_power_free: k must be >= 2");
    check_in_table(n, tables, "is_kth_power_free");
    while (n > 1) {
        std::uint32_t p = tables.spf[n];
        std::uint32_t e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e >= k) return false;
    }
    return true;
}

std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
    std::vector<std::uint32_t> primes;
    if (limit < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
    for (std::uint32_t n = 2; n <= limit; ++n) {
        if (composite[n]) continue;
        primes.push_back(n);
        for (std::uint64_t m = static_cast<std::uint64_t>(n) * n; m <= limit; m += n) composite[m] = true;
    }
    return primes;
}

std::uint64_t euler_phi(std::uint64_t k) {
    if (k < 1) throw std::invalid_argument("euler_phi: k must be >= 1");
    std::uint64_t result = k;
    for (std::uint64_t d = 2; d * d <= k; ++d) {
        if (k % d == 0) {
            result -= result / d;
            while (k % d == 0) k /= d;
        }
    }
    if (k > 1) result -= result / k;
    return result;
}

double mertens_product(std::span<const std::uint32_t> primes) {
    check_prime_list(primes, "mertens_product");
    double prod = 1.0;
    for (std::uint32_t p : primes) prod *= 1.0 - 1.0 / static_cast<double>(p);
    return prod;
}

Rational mertens_product_exact(std::span<const std::uint32_t> primes) {
    check_prime_list(primes, "mertens_product_exact");
    Rational prod(1);
    // Reduced denominators multiply to at most prod(p); guard the 128-bit range.
    __int128 den_bound = 1;
    for (std::uint32_t p : primes) {
        den_bound *= p;
        if (den_bound > (static_cast<__int128>(1) << 100))
            throw std::invalid_argument("mertens_product_exact: prime list too long for exact arithmetic");
        prod *= Rational(p - 1, p);
    }
    return prod;
}

std::vector<std::uint32_t> distinct_prime_factors(std::uint64_t n, const ArithTables& tables) {
    check_in_table(n, tables, "distinct_prime_factors");
    std::vector<std::uint32_t> out;
    while (n > 1) {
        std::uint32_t p = tables.spf[n];
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    return out;
}

std::vector<std::uint32_t> factorize(std::uint64_t n, const ArithTables& tables) {
    if (n < 2) throw std::domain_error("factorize: n must be >= 2");
    check_in_table(n, tables, "factorize");
    std::vector<std::uint32_t> out;
    while (n > 1) {
        std::uint32_t p = tables.spf[n];
        while (n % p == 0) {
            out.push_back(p);
            n /= p;
        }
    }
    return out;
}

}  // namespace densitylab
