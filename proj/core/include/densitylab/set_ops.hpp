#pragma once

#include <cstdint>
#include <span>

#include "densitylab/prefix_set.hpp"

namespace densitylab {

// {a+b : a in A, b in B, a+b <= limit}.  Word-level shift-OR over the denser
// operand, iterating elements of the sparser one.  With threads > 1 the outer
// element loop is partitioned and the per-thread bitmaps OR-merged; OR is
// associative and commutative, so the result is bit-identical for any thread
// count.
PrefixSet sumset(const PrefixSet& a, const PrefixSet& b, std::uint64_t limit, unsigned threads = 1);

// {a*b : a in A, b in B, a*b <= limit}.  0 in either operand (within its
// limit) is std::invalid_argument: a truncated product set cannot represent
// the 0-row honestly.
PrefixSet product_set(const PrefixSet& a, const PrefixSet& b, std::uint64_t limit, unsigned threads = 1);

// All sums of sub-multisets of terms, truncated to [0, limit]; 0 (the empty
// sum) is always a member.  Any zero term is std::invalid_argument.
// Bitmap DP: start {0}, OR in a term-shifted copy per term.
PrefixSet subset_sums(std::span<const std::uint64_t> terms, std::uint64_t limit);

}  // namespace densitylab
