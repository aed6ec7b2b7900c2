#include "densitylab/cascade.hpp"

#include <algorithm>
#include <stdexcept>

#include "densitylab/errors.hpp"
#include "densitylab/set_ops.hpp"

namespace densitylab {

PrimePartition prime_partition(double beta, std::uint32_t prime_bound, double tol) {
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("prime_partition: beta must be in (0, 1)");
    if (!(tol >= 0.0)) throw std::invalid_argument("prime_partition: tol must be >= 0");
    if (prime_bound < 2) throw std::invalid_argument("prime_partition: prime_bound must be >= 2");
    PrimePartition part;
    part.beta_target = beta;
    part.prime_bound = prime_bound;
    auto primes = primes_up_to(prime_bound);
    double prod = 1.0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        std::uint32_t p = primes[i];
        double with_p = prod * (1.0 - 1.0 / static_cast<double>(p));
        bool take = with_p >= beta;
        if (take) {
            part.p0.push_back(p);
            prod = with_p;
        } else if (i % 2 == 0) {  // p_1, p_3, ... (odd 1-based index)
            part.p1.push_back(p);
        } else {
            part.p2.push_back(p);
        }
    }
    part.beta_achieved = prod;
    if (prod > beta + tol)
        throw ConstructionError("prime_partition: achieved product " + std::to_string(prod) +
                                " misses target window [" + std::to_string(beta) + ", " +
                                std::to_string(beta + tol) + "]");
    return part;
}

namespace {

// 0 = in P0, 1 = in P1, 2 = in P2 for each prime <= limit.
std::vector<std::uint8_t> classify_primes(const PrimePartition& partition, std::uint64_t limit) {
    std::vector<std::uint8_t> cls(static_cast<std::size_t>(limit) + 1, 0);
    auto mark = [&](const std::vector<std::uint32_t>& ps, std::uint8_t c) {
        for (std::uint32_t p : ps)
            if (p <= limit) cls[p] = c;
    };
    mark(partition.p1, 1);
    mark(partition.p2, 2);
    return cls;  // P0 and anything unlisted stay 0
}

}  // namespace

PrefixSet build_q_component(const PrimePartition& partition, int which, std::uint64_t limit) {
    if (which != 1 && which != 2) throw std::invalid_argument("build_q_component: which must be 1 or 2");
    if (limit > (std::uint64_t(1) << 31))
        throw ResourceError("build_q_component: limit " + std::to_string(limit) + " beyond sieve capacity");
    if (partition.prime_bound < limit)
        throw std::invalid_argument("build_q_component: partition classifies primes only up to " +
                                    std::to_string(partition.prime_bound));
    auto tables = build_arith_tables(static_cast<std::uint32_t>(std::max<std::uint64_t>(limit, 2)));
    auto cls = classify_primes(partition, limit);
    PrefixSet q(limit, which == 1 ? "Q1" : "Q2");
    if (limit >= 1) q.insert(1);
    // member[n] = spf(n) has the right class and member[n / spf(n)].
    std::vector<std::uint8_t> member(static_cast<std::size_t>(limit) + 1, 0);
    if (limit >= 1) member[1] = 1;
    for (std::uint64_t n = 2; n <= limit; ++n) {
        std::uint32_t p = tables.spf[n];
        if (cls[p] == which && member[n / p]) {
            member[n] = 1;
            q.insert(n);
        }
    }
    return q;
}

PrefixSet build_q_set(const PrimePartition& partition, std::uint64_t limit) {
    PrefixSet q1 = build_q_component(partition, 1, limit);
    PrefixSet q2 = build_q_component(partition, 2, limit);
    auto w1 = q1.mutable_words();
    auto w2 = q2.words();
    for (std::size_t i = 0; i < w1.size(); ++i) w1[i] |= w2[i];
    q1.set_label("Q");
    return q1;
}

namespace {

// count(n) >= alpha*n for all n in [n_lo, limit]?  Returns the first failing
// n (0 if none).  Exact: count*den >= num*n in integers.
std::uint64_t first_floor_failure(const PrefixSet& products, const Rational& alpha,
                                  std::uint64_t n_lo, std::uint64_t limit) {
    const auto num = static_cast<std::uint64_t>(alpha.num());
    const auto den = static_cast<std::uint64_t>(alpha.den());
    std::uint64_t count = n_lo >= 1 ? products.count_prefix(n_lo - 1) : 0;
    for (std::uint64_t n = std::max<std::uint64_t>(n_lo, 1); n <= limit; ++n) {
        if (products.contains(n)) ++count;
        if (static_cast<__uint128_t>(count) * den < static_cast<__uint128_t>(num) * n) return n;
    }
    return 0;
}

PrefixSet pruned_copy(const PrefixSet& base, std::uint64_t lo, std::uint64_t hi) {
    PrefixSet copy = base;
    if (lo <= hi) copy.erase_range(lo, hi);
    return copy;
}

}  // namespace

CascadeResult theorem_cascade(const Rational& alpha, const PrimePartition& partition,
                              std::uint64_t limit, unsigned max_stages) {
    if (!(alpha > Rational(0) && alpha < Rational(1)))
        throw std::invalid_argument("theorem_cascade: alpha must be in (0, 1)");
    if (alpha.to_double() >= partition.beta_achieved)
        throw std::invalid_argument("theorem_cascade: alpha must be below the partition's product density");
    if (max_stages < 1) throw std::invalid_argument("theorem_cascade: max_stages must be >= 1");

    PrefixSet a = build_q_set(partition, limit);

    CascadeTrace trace;
    trace.alpha = alpha.str();
    trace.beta = partition.beta_achieved;
    trace.limit = limit;

    // Establish the floor for A_1 = Q: n0 is one past the last failure.
    {
        PrefixSet products = product_set(a, a, limit);
        std::uint64_t last_fail = 0;
        const auto num = static_cast<std::uint64_t>(alpha.num());
        const auto den = static_cast<std::uint64_t>(alpha.den());
        std::uint64_t count = 0;
        for (std::uint64_t n = 1; n <= limit; ++n) {
            if (products.contains(n)) ++count;
            if (static_cast<__uint128_t>(count) * den < static_cast<__uint128_t>(num) * n) last_fail = n;
        }
        if (last_fail == limit)
            throw ConstructionError("theorem_cascade: the product-count floor fails at the limit itself; "
                                    "no n0 exists in range");
        trace.n0 = last_fail + 1;
    }

    std::uint64_t n_j = 1;
    for (unsigned j = 1; j <= max_stages; ++j) {
        CascadeMilestone m;
        m.stage = j;
        m.n_before = n_j;
        if (j % 2 == 1) {
            // Case I: deepest safe prune.  P(s) = "pruning (n_j, s] breaks the
            // floor somewhere" is monotone in s, so binary search the smallest
            // breaking s in (n_j, min(bound, limit)].
            m.case_tag = "I";
            __uint128_t bound128 =
                (static_cast<__uint128_t>(n_j) * n_j * static_cast<std::uint64_t>(alpha.den())) /
                    static_cast<std::uint64_t>(alpha.num()) + 1;
            std::uint64_t bound = bound128 > limit ? limit : static_cast<std::uint64_t>(bound128);
            m.search_bound = static_cast<std::uint64_t>(std::min<__uint128_t>(bound128, ~std::uint64_t(0)));
            m.truncated = bound128 > limit;
            if (n_j + 1 > bound) {
                trace.stopped_early = true;
                trace.stop_reason = "case I window empty at stage " + std::to_string(j);
                break;
            }
            auto breaks = [&](std::uint64_t s) -> std::uint64_t {
                PrefixSet pruned = pruned_copy(a, n_j + 1, s);
                PrefixSet products = product_set(pruned, pruned, limit);
                return first_floor_failure(products, alpha, trace.n0, limit);
            };
            if (breaks(bound) == 0) {
                // Even the deepest prune in range keeps the floor: the stage
                // cannot complete at this limit.
                trace.stopped_early = true;
                trace.stop_reason = "case I found no breaking prune up to " + std::to_string(bound) +
                                    " at stage " + std::to_string(j);
                break;
            }
            std::uint64_t lo = n_j + 1, hi = bound;  // invariant: breaks(hi) != 0
            while (lo < hi) {
                std::uint64_t mid = lo + (hi - lo) / 2;
                if (breaks(mid) != 0)
                    hi = mid;
                else
                    lo = mid + 1;
            }
            std::uint64_t s = lo;
            m.witness_n = breaks(s);
            {
                PrefixSet pruned = pruned_copy(a, n_j + 1, s);
                PrefixSet products = product_set(pruned, pruned, limit);
                m.witness_count = products.count_prefix(m.witness_n);
            }
            if (s - 1 >= n_j + 1) {
                a.erase_range(n_j + 1, s - 1);
                m.drop_lo = n_j + 1;
                m.drop_hi = s - 1;
            }
            n_j = s - 1;
        } else {
            // Case II: wait for the product count to climb back above
            // (beta - 1/j) * s.
            m.case_tag = "II";
            double threshold = partition.beta_achieved - 1.0 / static_cast<double>(j);
            PrefixSet products = product_set(a, a, limit);
            std::uint64_t found = 0;
            std::uint64_t count = products.count_prefix(n_j);
            for (std::uint64_t s = n_j + 1; s <= limit; ++s) {
                if (products.contains(s)) ++count;
                if (static_cast<double>(count) > threshold * static_cast<double>(s)) {
                    found = s;
                    break;
                }
            }
            if (found == 0) {
                trace.stopped_early = true;
                trace.stop_reason = "case II count never exceeded (beta - 1/" + std::to_string(j) +
                                    ")*s below the limit at stage " + std::to_string(j);
                break;
            }
            m.witness_n = found;
            m.witness_count = products.count_prefix(found);
            n_j = found;
        }
        m.n_after = n_j;
        trace.milestones.push_back(m);
        trace.stages_run = j;
    }

    return {std::move(a), std::move(trace)};
}

}  // namespace densitylab
