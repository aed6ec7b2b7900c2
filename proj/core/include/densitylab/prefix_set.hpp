#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace densitylab {

// Finite prefix of a set of nonnegative integers as a bitmap over [0, limit].
// The limit is inclusive and part of the set's identity: membership queries
// beyond it are errors (std::out_of_range), never "false" — a truncated set
// cannot answer them.
class PrefixSet {
public:
    explicit PrefixSet(std::uint64_t limit, std::string label = {});

    template <class Pred>
    static PrefixSet from_predicate(std::uint64_t limit, Pred&& pred, std::string label = {}) {
        PrefixSet s(limit, std::move(label));
        for (std::uint64_t n = 0; n <= limit; ++n)
            if (pred(n)) s.insert(n);
        return s;
    }

    std::uint64_t limit() const { return limit_; }
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    bool contains(std::uint64_t n) const {
        check_range(n);
        return (words_[n >> 6] >> (n & 63)) & 1u;
    }

    void insert(std::uint64_t n) {
        check_range(n);
        words_[n >> 6] |= std::uint64_t(1) << (n & 63);
    }

    void erase(std::uint64_t n) {
        check_range(n);
        words_[n >> 6] &= ~(std::uint64_t(1) << (n & 63));
    }

    // Removes every member in [lo, hi] (clamped to the limit).
    void erase_range(std::uint64_t lo, std::uint64_t hi);

    // |A| including 0 if present.  Always equals the popcount of the bitmap.
    std::uint64_t cardinality() const;

    // |A ∩ [1, n]| — the density numerator; 0 is never counted.
    // n must be <= limit (std::out_of_range otherwise).
    std::uint64_t count_prefix(std::uint64_t n) const;

    // Ascending member visitation: f(std::uint64_t).  The bounded form stops
    // after the last member <= bound.
    template <class F>
    void for_each(F&& f) const {
        for_each_up_to(limit_, f);
    }
    template <class F>
    void for_each_up_to(std::uint64_t bound, F&& f) const {
        check_range(bound);
        std::size_t last_word = static_cast<std::size_t>(bound >> 6);
        for (std::size_t w = 0; w <= last_word; ++w) {
            std::uint64_t bits = words_[w];
            if (w == last_word && (bound & 63) != 63) bits &= (std::uint64_t(1) << ((bound & 63) + 1)) - 1;
            while (bits) {
                f((static_cast<std::uint64_t>(w) << 6) + static_cast<unsigned>(__builtin_ctzll(bits)));
                bits &= bits - 1;
            }
        }
    }

    std::vector<std::uint64_t> to_vector() const;

    std::span<const std::uint64_t> words() const { return words_; }
    std::span<std::uint64_t> mutable_words() { return words_; }

    // Set equality is limit + bits; the label is presentation only.
    bool operator==(const PrefixSet& o) const { return limit_ == o.limit_ && words_ == o.words_; }
    bool operator!=(const PrefixSet& o) const { return !(*this == o); }

    bool is_subset_of(const PrefixSet& o) const;

    // True iff every value in [0, limit] is a member.
    bool is_full() const;

    // Drops bits above the final valid position.  Engines shift raw words and
    // call this to restore the representation invariant.
    void mask_tail();

private:
    void check_range(std::uint64_t n) const;

    std::uint64_t limit_;
    std::string label_;
    std::vector<std::uint64_t> words_;
};

// Binary snapshot (magic/version/limit header, then raw words, little-endian).
// Used for the on-disk cache of expensive constructions.
void save_prefix_set(const PrefixSet& set, const std::filesystem::path& path);
PrefixSet load_prefix_set(const std::filesystem::path& path);

}  // namespace densitylab
