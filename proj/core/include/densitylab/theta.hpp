#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace densitylab {

// Per-step choice of a_n = s_{n-1} + theta(s_{n-1}) or s_{n-1} - theta(s_{n-1}).
// Alternate starts with plus on the first generated term.
enum class SignPolicy { Plus, Minus, Alternate };

SignPolicy parse_sign_policy(std::string_view text);
std::string to_string(SignPolicy policy);

// Perturbation rule k -> theta(k).  Presets:
//   zero             theta == 0 (pure doubling)
//   k_over_log2[:c]  theta(k) = floor(c * k / (log k)^2), natural log
//   constant:c       theta == c
struct ThetaSpec {
    enum class Kind { Zero, KOverLogSq, Constant };

    Kind kind = Kind::Zero;
    double scale = 1.0;      // c for k_over_log2
    std::uint64_t value = 0; // c for constant

    std::uint64_t operator()(std::uint64_t k) const;

    static ThetaSpec parse(std::string_view text);
    std::string describe() const;
};

// Strictly increasing positive terms where each generated term sits exactly
// theta(s_{n-1}) away from the previous partial sum.  sums[i] is the sum of
// the first i terms (sums[0] = 0), so sums.size() == terms.size() + 1.
struct ThetaSequence {
    std::vector<std::uint64_t> terms;
    std::vector<std::uint64_t> sums;
    ThetaSpec theta;
    SignPolicy sign = SignPolicy::Plus;
    std::size_t seed_count = 0;

    std::uint64_t partial_sum(std::size_t i) const { return sums.at(i); }
    std::size_t count() const { return terms.size(); }
};

// Generates terms after the seed until `count` terms exist or the next term
// would push the partial sum past sum_cap.  Failures are loud
// (ConstructionError naming the offending step): theta(s) >= s/2, or a
// generated term that fails to exceed its predecessor.
ThetaSequence theta_sequence(std::span<const std::uint64_t> seed, const ThetaSpec& theta,
                             SignPolicy sign, std::size_t count, std::uint64_t sum_cap);

// delta_n = |P(A) ∩ [1, s_n]| / s_n for n = 1..count(), where P(A) is the set
// of all finite subset sums.  Counts are exact: the only tail term that can
// reach below s_n is a_{n+1}, so the bitmap DP carries one lookahead term
// (and, for the final index, the would-be next term from the generation rule).
struct DeltaSeries {
    std::vector<std::size_t> n;        // term index, 1-based
    std::vector<std::uint64_t> s;      // s_n
    std::vector<std::uint64_t> counts; // |P(A) ∩ [1, s_n]|
    std::vector<double> deltas;
    // Smallest C with |delta_n - delta_{n-1}| <= C * theta(s_n)/s_n over the
    // series (theta clamped to >= 1); reported, never asserted.
    double fitted_c = 0.0;
};

DeltaSeries delta_series(const ThetaSequence& seq, std::uint64_t bit_cap = (std::uint64_t(1) << 31));

// Greedy representation x = sum of distinct terms + remainder z, scanning
// from the largest term <= x down, never touching positions <= cutoff.
// positions are 0-based indices into seq.terms, strictly decreasing.
// Preconditions: cutoff + 2 <= count (std::invalid_argument) and
// x < last term (std::out_of_range).
struct GreedyDecomposition {
    std::vector<std::size_t> positions;
    std::uint64_t remainder = 0;
};

GreedyDecomposition greedy_decompose(const ThetaSequence& seq, std::uint64_t x, std::size_t cutoff);

}  // namespace densitylab
