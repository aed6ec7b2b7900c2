#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "densitylab/numtheory.hpp"
#include "densitylab/prefix_set.hpp"
#include "densitylab/rational.hpp"

namespace densitylab {

// Greedy split of the primes up to prime_bound: p joins P0 while the running
// product of (1 - 1/p) over P0 stays >= beta.  The remaining primes are dealt
// by their index parity: odd-indexed (p_1 = 2, p_3 = 5, ...) to P1,
// even-indexed to P2, each minus P0.
struct PrimePartition {
    std::vector<std::uint32_t> p0, p1, p2;
    double beta_target = 0.0;
    double beta_achieved = 1.0;
    std::uint32_t prime_bound = 0;
};

// beta in (0, 1); achieved product must land in [beta, beta + tol], else
// ConstructionError reporting the achieved value.
PrimePartition prime_partition(double beta, std::uint32_t prime_bound, double tol);

// Q1 = {n : every prime factor of n is in P1} (1 included), likewise Q2/P2,
// Q = Q1 ∪ Q2.  Requires partition.prime_bound >= limit so every prime <=
// limit is classified.
PrefixSet build_q_component(const PrimePartition& partition, int which, std::uint64_t limit);
PrefixSet build_q_set(const PrimePartition& partition, std::uint64_t limit);

// One stage of the alternating refinement.  Odd stages (Case I) find the
// smallest prune depth s whose removal breaks the product-count floor
// somewhere, then keep the prune one short of that; even stages (Case II)
// find the smallest s where the product count climbs back above
// (beta - 1/j) * s.  The witness records the inequality each stage was
// selected by, so a replay can re-verify the trace.
struct CascadeMilestone {
    unsigned stage = 0;             // j
    std::string case_tag = "?";     // "I" or "II"
    std::uint64_t n_before = 0;     // n_j
    std::uint64_t n_after = 0;      // n_{j+1}
    std::uint64_t drop_lo = 0;      // dropped interval [drop_lo, drop_hi]; 0/0 = none
    std::uint64_t drop_hi = 0;
    std::uint64_t witness_n = 0;    // where the selecting inequality holds
    std::uint64_t witness_count = 0;
    std::uint64_t search_bound = 0; // Case I: floor(n_j^2/alpha) + 1
    bool truncated = false;         // search window clipped by the set limit
};

struct CascadeTrace {
    std::string alpha;              // exact, as parsed
    double beta = 0.0;              // achieved product over P0
    std::uint64_t n0 = 0;           // product-count floor holds for all n >= n0
    std::uint64_t limit = 0;
    unsigned stages_run = 0;
    bool stopped_early = false;     // ran out of room before max_stages
    std::string stop_reason;
    std::vector<CascadeMilestone> milestones;
};

struct CascadeResult {
    PrefixSet a_final;
    CascadeTrace trace;
};

// alpha must be < beta_achieved.  The floor |(A·A)(n)| >= alpha*n is
// established at n0 for A_1 = Q and preserved by every accepted prune.
CascadeResult theorem_cascade(const Rational& alpha, const PrimePartition& partition,
                              std::uint64_t limit, unsigned max_stages);

}  // namespace densitylab
