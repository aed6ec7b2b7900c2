#include "densitylab/set_ops.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <vector>

namespace densitylab {

namespace {

// result |= src << shift, over raw words, truncated to result's extent.
void or_shifted(std::span<std::uint64_t> result, std::span<const std::uint64_t> src, std::uint64_t shift,
                std::uint64_t src_bit_count) {
    const std::size_t word_off = static_cast<std::size_t>(shift >> 6);
    const unsigned bit_off = static_cast<unsigned>(shift & 63);
    const std::size_t n_result = result.size();
    if (word_off >= n_result) return;
    // Only the words holding bits [0, src_bit_count) matter.
    std::size_t n_src = std::min(src.size(), static_cast<std::size_t>((src_bit_count + 63) >> 6));
    n_src = std::min(n_src, n_result - word_off);
    if (bit_off == 0) {
        for (std::size_t i = 0; i < n_src; ++i) result[i + word_off] |= src[i];
        return;
    }
    const unsigned inv = 64 - bit_off;
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < n_src; ++i) {
        result[i + word_off] |= (src[i] << bit_off) | carry;
        carry = src[i] >> inv;
    }
    if (word_off + n_src < n_result) result[word_off + n_src] |= carry;
}

void sumset_range(const std::vector<std::uint64_t>& outer, std::size_t begin, std::size_t end,
                  std::span<const std::uint64_t> inner_words, std::uint64_t inner_bits,
                  PrefixSet& result, bool allow_early_exit) {
    auto words = result.mutable_words();
    for (std::size_t i = begin; i < end; ++i) {
        or_shifted(words, inner_words, outer[i], inner_bits);
        // Saturation probe: once everything <= limit is present, later shifts
        // are no-ops.  Cheap relative to the shift loop; checked sparsely.
        if (allow_early_exit && (i - begin) % 64 == 63 && result.is_full()) break;
    }
    result.mask_tail();
}

}  // namespace

PrefixSet sumset(const PrefixSet& a, const PrefixSet& b, std::uint64_t limit, unsigned threads) {
    // Iterate the operand with fewer members <= limit; shift the other.
    std::uint64_t bound_a = std::min(a.limit(), limit);
    std::uint64_t bound_b = std::min(b.limit(), limit);
    const PrefixSet* outer_set = &a;
    const PrefixSet* inner_set = &b;
    std::uint64_t outer_bound = bound_a, inner_bound = bound_b;
    if (a.count_prefix(bound_a) + (a.contains(0) ? 1 : 0) >
        b.count_prefix(bound_b) + (b.contains(0) ? 1 : 0)) {
        std::swap(outer_set, inner_set);
        std::swap(outer_bound, inner_bound);
    }
    std::vector<std::uint64_t> outer;
    outer_set->for_each_up_to(outer_bound, [&](std::uint64_t v) { outer.push_back(v); });

    PrefixSet result(limit);
    if (outer.empty()) return result;
    const std::uint64_t inner_bits = std::min(inner_bound, limit) + 1;

    if (threads <= 1 || outer.size() < 2 * threads) {
        sumset_range(outer, 0, outer.size(), inner_set->words(), inner_bits, result, true);
        return result;
    }

    std::vector<PrefixSet> partials(threads, PrefixSet(limit));
    std::vector<std::thread> workers;
    std::size_t chunk = (outer.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(outer.size(), begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, t, begin, end] {
            sumset_range(outer, begin, end, inner_set->words(), inner_bits, partials[t], false);
        });
    }
    for (auto& w : workers) w.join();
    auto out = result.mutable_words();
    for (const auto& part : partials) {
        auto pw = part.words();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] |= pw[i];
    }
    result.mask_tail();
    return result;
}

PrefixSet product_set(const PrefixSet& a, const PrefixSet& b, std::uint64_t limit, unsigned threads) {
    if (a.contains(0) || b.contains(0))
        throw std::invalid_argument("product_set: operands must not contain 0");
    std::vector<std::uint64_t> outer;
    a.for_each_up_to(std::min(a.limit(), limit), [&](std::uint64_t v) { outer.push_back(v); });

    PrefixSet result(limit);
    auto mark_range = [&](std::size_t begin, std::size_t end, PrefixSet& dst) {
        for (std::size_t i = begin; i < end; ++i) {
            std::uint64_t x = outer[i];
            std::uint64_t b_bound = std::min(b.limit(), limit / x);
            b.for_each_up_to(b_bound, [&](std::uint64_t y) { dst.insert(x * y); });
        }
    };
    if (threads <= 1 || outer.size() < 2 * threads) {
        mark_range(0, outer.size(), result);
        return result;
    }
    std::vector<PrefixSet> partials(threads, PrefixSet(limit));
    std::vector<std::thread> workers;
    std::size_t chunk = (outer.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(outer.size(), begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, t, begin, end] { mark_range(begin, end, partials[t]); });
    }
    for (auto& w : workers) w.join();
    auto out = result.mutable_words();
    for (const auto& part : partials) {
        auto pw = part.words();
        for (std::size_t i = 0; i < out.size(); ++i) out[i] |= pw[i];
    }
    return result;
}

PrefixSet subset_sums(std::span<const std::uint64_t> terms, std::uint64_t limit) {
    for (std::uint64_t t : terms)
        if (t == 0) throw std::invalid_argument("subset_sums: terms must be positive");
    PrefixSet result(limit);
    result.insert(0);
    auto words = result.mutable_words();
    // Shift from a snapshot: an aliased in-place shift would let one term
    // count twice (sum cascading through freshly set bits).
    std::vector<std::uint64_t> snapshot(words.size());
    for (std::uint64_t t : terms) {
        if (t > limit) continue;  // sums through this term all exceed the window
        std::copy(words.begin(), words.end(), snapshot.begin());
        or_shifted(words, snapshot, t, limit + 1 - t);
    }
    result.mask_tail();
    return result;
}

}  // namespace densitylab
