#include <doctest.h>

#include <cstdint>
#include <vector>

#include "densitylab/cascade.hpp"
#include "densitylab/errors.hpp"
#include "densitylab/set_ops.hpp"
#include "oracles.hpp"

using namespace densitylab;

namespace {

// Smallest n in [n0, limit] where |(A·A) ∩ [1, n]| < alpha * n, or 0 if none.
std::uint64_t first_floor_failure(const PrefixSet& a, const Rational& alpha, std::uint64_t n0) {
    auto prod = product_set(a, a, a.limit());
    const auto num = static_cast<std::uint64_t>(alpha.num());
    const auto den = static_cast<std::uint64_t>(alpha.den());
    std::uint64_t count = prod.count_prefix(n0 > 0 ? n0 - 1 : 0);
    for (std::uint64_t n = n0; n <= a.limit(); ++n) {
        if (prod.contains(n)) ++count;
        if (static_cast<__uint128_t>(count) * den < static_cast<__uint128_t>(num) * n) return n;
    }
    return 0;
}

}  // namespace

TEST_CASE("prime partition: greedy keeps the product at the target") {
    auto part = prime_partition(0.5, 10000, 0.01);
    CHECK(part.p0 == std::vector<std::uint32_t>{2});
    CHECK(part.beta_achieved == doctest::Approx(0.5));
    // Remaining primes alternate into the two reserve classes by index.
    REQUIRE(part.p1.size() >= 4);
    REQUIRE(part.p2.size() >= 4);
    CHECK(std::vector<std::uint32_t>(part.p1.begin(), part.p1.begin() + 4) ==
          std::vector<std::uint32_t>{5, 11, 17, 23});
    CHECK(std::vector<std::uint32_t>(part.p2.begin(), part.p2.begin() + 4) ==
          std::vector<std::uint32_t>{3, 7, 13, 19});
    // Classes are disjoint and cover all primes in range.
    std::vector<std::uint32_t> all;
    all.insert(all.end(), part.p0.begin(), part.p0.end());
    all.insert(all.end(), part.p1.begin(), part.p1.end());
    all.insert(all.end(), part.p2.begin(), part.p2.end());
    std::sort(all.begin(), all.end());
    CHECK(all == primes_up_to(10000));
}

TEST_CASE("prime partition: unreachable window is an error, not a silent miss") {
    // Greedy lands just above 0.3 and no prime <= 10000 can close the gap.
    CHECK_THROWS_AS(prime_partition(0.3, 10000, 0.0), ConstructionError);
    CHECK_THROWS_AS(prime_partition(0.0, 100, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(prime_partition(1.0, 100, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(prime_partition(0.5, 1, 0.01), std::invalid_argument);
    CHECK_THROWS_AS(prime_partition(0.5, 100, -0.5), std::invalid_argument);
}

TEST_CASE("reserved-class sets contain exactly the numbers built from their primes") {
    const std::uint64_t limit = 2000;
    auto part = prime_partition(0.5, 2000, 0.01);
    auto q1 = build_q_component(part, 1, limit);
    auto q2 = build_q_component(part, 2, limit);
    auto q = build_q_set(part, limit);

    auto in_class = [](std::uint64_t n, const std::vector<std::uint32_t>& cls) {
        if (n == 1) return true;
        for (std::uint64_t f : oracle::factorize(n)) {
            bool found = false;
            for (auto p : cls)
                if (p == f) { found = true; break; }
            if (!found) return false;
        }
        return true;
    };

    for (std::uint64_t n = 1; n <= limit; ++n) {
        CHECK(q1.contains(n) == in_class(n, part.p1));
        CHECK(q2.contains(n) == in_class(n, part.p2));
        CHECK(q.contains(n) == (q1.contains(n) || q2.contains(n)));
    }
    // Spot membership: pure powers/products within one class, mixes excluded.
    CHECK(q1.contains(55));   // 5 * 11
    CHECK(q2.contains(21));   // 3 * 7
    CHECK_FALSE(q.contains(15));  // 3 * 5 straddles the classes
    CHECK_FALSE(q.contains(2));   // reserved prime
    CHECK(q.contains(1));

    CHECK_THROWS_AS(build_q_component(part, 3, limit), std::invalid_argument);
    CHECK_THROWS_AS(build_q_component(part, 1, 5000), std::invalid_argument);  // bound < limit
}

TEST_CASE("cascade trace at laboratory scale: frozen milestones") {
    const std::uint64_t limit = 10000;
    auto part = prime_partition(0.5, static_cast<std::uint32_t>(limit), 0.01);
    auto res = theorem_cascade(Rational(1, 10), part, limit, 6);
    const auto& tr = res.trace;

    CHECK(tr.n0 == 1);
    CHECK(tr.stages_run == 5);
    CHECK(tr.stopped_early);  // stage 6's rebound never happens below 10000
    REQUIRE(tr.milestones.size() == 5);

    struct Row { unsigned stage; const char* tag; std::uint64_t nb, na, wn, wc, bound; };
    const Row expected[] = {
        {1, "I", 1, 10, 11, 1, 11},
        {2, "II", 10, 11, 11, 2, 0},
        {3, "I", 11, 20, 21, 2, 1211},
        {4, "II", 20, 31, 31, 8, 0},
        {5, "I", 31, 80, 81, 8, 9611},
    };
    for (std::size_t i = 0; i < 5; ++i) {
        const auto& m = tr.milestones[i];
        CHECK(m.stage == expected[i].stage);
        CHECK(m.case_tag == expected[i].tag);
        CHECK(m.n_before == expected[i].nb);
        CHECK(m.n_after == expected[i].na);
        CHECK(m.witness_n == expected[i].wn);
        CHECK(m.witness_count == expected[i].wc);
        CHECK(m.search_bound == expected[i].bound);
        // Case I search bound is floor(n^2 / alpha) + 1 by definition.
        if (m.case_tag == "I") CHECK(m.search_bound == m.n_before * m.n_before * 10 + 1);
    }
}

TEST_CASE("cascade milestones replay from scratch") {
    const std::uint64_t limit = 10000;
    const Rational alpha(1, 10);
    auto part = prime_partition(0.5, static_cast<std::uint32_t>(limit), 0.01);
    auto res = theorem_cascade(alpha, part, limit, 6);

    PrefixSet a = build_q_set(part, limit);
    // The floor holds on the unpruned base set from n0 on.
    CHECK(first_floor_failure(a, alpha, res.trace.n0) == 0);

    for (const auto& m : res.trace.milestones) {
        if (m.case_tag == "I") {
            // Probing one deeper than the accepted prune breaks the floor at
            // the recorded witness, with the recorded product count.
            PrefixSet probe = a;
            probe.erase_range(m.n_before + 1, m.n_after + 1);
            auto prod = product_set(probe, probe, limit);
            CHECK(prod.count_prefix(m.witness_n) == m.witness_count);
            CHECK(m.witness_count * 10 < m.witness_n);  // floor broken
            // The accepted prune preserves the floor everywhere.
            if (m.drop_lo || m.drop_hi) a.erase_range(m.drop_lo, m.drop_hi);
            CHECK(first_floor_failure(a, alpha, res.trace.n0) == 0);
        } else {
            // Case II: the witness is the first s where the product count
            // climbs back above (beta - 1/j) * s.
            auto prod = product_set(a, a, limit);
            const double thr = res.trace.beta - 1.0 / double(m.stage);
            for (std::uint64_t s = m.n_before + 1; s < m.n_after; ++s)
                CHECK(double(prod.count_prefix(s)) <= thr * double(s));
            CHECK(prod.count_prefix(m.n_after) == m.witness_count);
            CHECK(double(m.witness_count) > thr * double(m.n_after));
        }
    }
    CHECK(a == res.a_final);
}

TEST_CASE("cascade input contracts") {
    auto part = prime_partition(0.5, 1000, 0.01);
    CHECK_THROWS_AS(theorem_cascade(Rational(3, 5), part, 1000, 4), std::invalid_argument);
    CHECK_THROWS_AS(theorem_cascade(Rational(1, 2), part, 1000, 4), std::invalid_argument);
    CHECK_THROWS_AS(theorem_cascade(Rational(0), part, 1000, 4), std::invalid_argument);
    CHECK_THROWS_AS(theorem_cascade(Rational(1, 10), part, 1000, 0), std::invalid_argument);
}
