#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "densitylab/numtheory.hpp"
#include "densitylab/prefix_set.hpp"
#include "densitylab/rational.hpp"

namespace densitylab {

// {0, 1, ..., floor(1/alpha)} ∪ {floor(n/alpha) : n >= 1}, truncated to
// [0, limit].  Density alpha, and A+A covers every integer in [0, limit].
// alpha must lie in (0, 1]; it is exact-rational so floor(n/alpha) is exact.
PrefixSet prop1_set(const Rational& alpha, std::uint64_t limit);

// Block boundaries N_0 = 0 < N_1 = 1 < N_2 < ... for the mod-7 construction.
// Rules: "default" grows N_{k+1} = (k+2) * N_k (ratio -> infinity);
// "ratio:R" grows N_{k+1} = R * N_k (fixed ratio, R >= 2); "explicit" takes
// the caller's list.  materialize() extends until 7*N_m >= limit.
struct BlockSchedule {
    enum class Kind { Default, FixedRatio, Explicit };

    Kind kind = Kind::Default;
    std::uint64_t ratio = 4;
    std::vector<std::uint64_t> points;

    static BlockSchedule default_rule();
    static BlockSchedule fixed_ratio(std::uint64_t ratio);
    static BlockSchedule explicit_points(std::vector<std::uint64_t> points);
    static BlockSchedule parse(std::string_view text);

    std::vector<std::uint64_t> materialize(std::uint64_t limit) const;
    std::string describe() const;
};

// Alternating mod-7 residue patterns on blocks [7*N_m, 7*N_{m+1}]: residues
// {0,2,3} on even-indexed blocks, {0,1,2} on odd ones, plus the base
// {0,1,2,3}.  Density 3/7; the sumset misses exactly residue 6 of 7 inside
// deep odd-pattern windows, so it has no asymptotic density.
PrefixSet prop3_set(const BlockSchedule& schedule, std::uint64_t limit);

// The residue patterns and modulus, exposed for tests and reports.
inline constexpr std::uint64_t kBlockModulus = 7;
inline constexpr std::uint64_t kEvenBlockResidues[] = {0, 2, 3};  // "U"
inline constexpr std::uint64_t kOddBlockResidues[] = {0, 1, 2};   // "V"

// Classical multiplicatively-flavored sets over [1, limit] (never contain 0).
enum class ClassicalKind {
    NonSquarefree1,  // {1} ∪ {n : n not squarefree}; closed under products
    Squarefree,      // squarefree numbers; products land in the cubefree set
    Coprime,         // {n : gcd(n, k) = 1}; closed under products
    Multiples,       // {n : k | n}
    PrimeUnion,      // {n : some p_i | n, i <= r} for the first r primes
    OmegaBounded,    // {1, 2} ∪ {n >= 3 : Omega(n) <= 0.75*loglog n + 1}
};

ClassicalKind parse_classical_kind(std::string_view text);
std::string classical_kind_name(ClassicalKind kind);

// param is k for Coprime/Multiples, r for PrimeUnion, ignored otherwise.
PrefixSet classical_set(ClassicalKind kind, std::uint64_t param, std::uint64_t limit,
                        const ArithTables& tables);

// Closed forms over the first r primes p_1..p_r:
//   gamma_r = 1 - prod(1 - 1/p_i)          (density of the r-prime union)
//   beta_r  = 1 - (1 + sum 1/p_i) * prod(1 - 1/p_i)   (density of its product set)
// r >= 1; exact rationals.  beta_1 = 1/4, gamma_1 = 1/2.
std::pair<Rational, Rational> beta_gamma_closed_form(std::uint32_t r);

// Balanced two-factor split of n by prime count: with the factorization
// q_1 <= ... <= q_t (multiplicity), u = floor((t-1)/2),
//   n1 = q_1 * ... * q_{u-1} * q_t   (the u smallest-but-one plus the largest)
//   n2 = q_u * ... * q_{t-1}
// so n1*n2 = n, Omega(n1) = u for t >= 3, Omega(n2) = t - u.  No split for
// primes or 1 (t < 2).
struct OmegaSplit {
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    std::uint32_t t = 0;
    std::uint32_t u = 0;
};

std::optional<OmegaSplit> split_by_omega(std::uint64_t n, const ArithTables& tables);

// How much of [1, x] is covered by {a*b : a in divisors, b in A}, against the
// sieve prediction x * prod(1 - 1/a).  divisors must be >= 2 and pairwise
// coprime.  `expansion` is the inclusion-exclusion evaluation of the covered
// count over subsets of divisors; it must equal `covered` exactly.
struct CoverReport {
    std::uint64_t covered = 0;
    std::uint64_t uncovered = 0;
    std::int64_t expansion = 0;
    double predicted_uncovered = 0.0;
};

CoverReport inclusion_exclusion_cover(const PrefixSet& a, std::span<const std::uint64_t> divisors,
                                      std::uint64_t x);

// {0} ∪ blocks [2^(2m), 2^(2m+1)]: lower density 1/3, upper 2/3, sumset of
// density 1.  The standard no-density-but-normalized example set.
PrefixSet power_block_set(std::uint64_t limit);

}  // namespace densitylab
