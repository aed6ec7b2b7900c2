#include <doctest.h>

#include <stdexcept>

#include "densitylab/density.hpp"
#include "densitylab/prefix_set.hpp"

using namespace densitylab;

TEST_CASE("geometric checkpoints are floor powers, deduped and clipped") {
    auto pts = CheckpointSchedule::geometric(2.0).materialize(100);
    CHECK(pts == std::vector<std::uint64_t>{1, 2, 4, 8, 16, 32, 64});
    // eta close to 1 repeats early floors; duplicates must collapse.
    auto slow = CheckpointSchedule::geometric(1.3).materialize(10);
    for (std::size_t i = 1; i < slow.size(); ++i) CHECK(slow[i - 1] < slow[i]);
    CHECK_THROWS_AS(CheckpointSchedule::geometric(1.0).materialize(10), std::invalid_argument);
}

TEST_CASE("explicit checkpoints are sorted, deduped, clipped") {
    auto pts = CheckpointSchedule::explicit_points({50, 10, 10, 900, 0, 30}).materialize(100);
    CHECK(pts == std::vector<std::uint64_t>{10, 30, 50});
}

TEST_CASE("density report counts and tail estimates") {
    // Multiples of 4 up to 1000: ratio at n is floor(n/4)/n.
    PrefixSet s(1000, "mult4");
    for (std::uint64_t n = 4; n <= 1000; n += 4) s.insert(n);
    DensityReport r = density_report(s, CheckpointSchedule::explicit_points({10, 100, 500, 1000}), 0.5);
    CHECK(r.checkpoints == std::vector<std::uint64_t>{10, 100, 500, 1000});
    CHECK(r.counts == std::vector<std::uint64_t>{2, 25, 125, 250});
    CHECK(r.ratios[0] == doctest::Approx(0.2));
    CHECK(r.ratios[3] == doctest::Approx(0.25));
    // Tail window = last two checkpoints; both ratios are exactly 0.25.
    CHECK(r.lower_est == doctest::Approx(0.25));
    CHECK(r.upper_est == doctest::Approx(0.25));
    CHECK(r.label == "mult4");

    CHECK_THROWS_AS(density_report(s, CheckpointSchedule::explicit_points({10, 100, 500}), 0.5),
                    std::invalid_argument);
    CHECK_THROWS_AS(density_report(s, CheckpointSchedule::explicit_points({10, 20, 50, 100}), 0.0),
                    std::invalid_argument);
}

TEST_CASE("zero never enters the density numerator") {
    PrefixSet s(100);
    s.insert(0);
    s.insert(10);
    DensityReport r = density_report(s, CheckpointSchedule::explicit_points({10, 20, 50, 100}));
    CHECK(r.counts == std::vector<std::uint64_t>{1, 1, 1, 1});
}

TEST_CASE("periodic density is exact") {
    // Residues {0, 2, 3} mod 7 carry density 3/7 regardless of the zero class.
    std::vector<std::uint64_t> res{0, 2, 3};
    CHECK(periodic_density_exact(res, 7) == Rational(3, 7));
    std::vector<std::uint64_t> dup{1, 8, 2};  // 1 and 8 collapse mod 7
    CHECK(periodic_density_exact(dup, 7) == Rational(2, 7));
    std::vector<std::uint64_t> none;
    CHECK(periodic_density_exact(none, 5) == Rational(0));
    CHECK_THROWS_AS(periodic_density_exact(res, 0), std::invalid_argument);
}

TEST_CASE("sumset-density inequality gap") {
    // alpha = 3/7 < 1/2, gamma = 6/7: gap = 6/7 - (3/14 + 3/7) = 3/14.
    CHECK(freiman_gap(3.0 / 7.0, 6.0 / 7.0) == doctest::Approx(3.0 / 14.0));
    // alpha >= 1/2 saturates the min term: gamma - alpha/2 - 1/2.
    CHECK(freiman_gap(0.8, 1.0) == doctest::Approx(0.1));
    CHECK(freiman_gap(0.5, 0.75) == doctest::Approx(0.0));
}
