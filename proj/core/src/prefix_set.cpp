#include "densitylab/prefix_set.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace densitylab {

namespace {

constexpr char kMagic[4] = {'D', 'L', 'P', 'S'};
constexpr std::uint32_t kVersion = 1;

std::size_t words_for(std::uint64_t limit) { return static_cast<std::size_t>(limit / 64) + 1; }

}  // namespace

PrefixSet::PrefixSet(std::uint64_t limit, std::string label)
    : limit_(limit), label_(std::move(label)), words_(words_for(limit), 0) {}

void PrefixSet::check_range(std::uint64_t n) const {
    if (n > limit_)
        throw std::out_of_range("PrefixSet: value " + std::to_string(n) + " beyond limit " + std::to_string(limit_));
}

void PrefixSet::erase_range(std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) return;
    if (lo > limit_) return;
    hi = std::min(hi, limit_);
    std::size_t wl = static_cast<std::size_t>(lo >> 6), wh = static_cast<std::size_t>(hi >> 6);
    std::uint64_t first_mask = ~std::uint64_t(0) << (lo & 63);
    std::uint64_t last_mask = (hi & 63) == 63 ? ~std::uint64_t(0) : (std::uint64_t(1) << ((hi & 63) + 1)) - 1;
    if (wl == wh) {
        words_[wl] &= ~(first_mask & last_mask);
        return;
    }
    words_[wl] &= ~first_mask;
    for (std::size_t w = wl + 1; w < wh; ++w) words_[w] = 0;
    words_[wh] &= ~last_mask;
}

std::uint64_t PrefixSet::cardinality() const {
    std::uint64_t total = 0;
    for (std::uint64_t w : words_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
}

std::uint64_t PrefixSet::count_prefix(std::uint64_t n) const {
    check_range(n);
    if (n == 0) return 0;
    std::size_t last_word = static_cast<std::size_t>(n >> 6);
    std::uint64_t total = 0;
    for (std::size_t w = 0; w < last_word; ++w) total += static_cast<std::uint64_t>(std::popcount(words_[w]));
    std::uint64_t bits = words_[last_word];
    if ((n & 63) != 63) bits &= (std::uint64_t(1) << ((n & 63) + 1)) - 1;
    total += static_cast<std::uint64_t>(std::popcount(bits));
    // [1, n] never counts 0.
    if (words_[0] & 1) --total;
    return total;
}

std::vector<std::uint64_t> PrefixSet::to_vector() const {
    std::vector<std::uint64_t> out;
    out.reserve(cardinality());
    for_each([&](std::uint64_t n) { out.push_back(n); });
    return out;
}

bool PrefixSet::is_subset_of(const PrefixSet& o) const {
    if (limit_ > o.limit_)
        throw std::invalid_argument("is_subset_of: left set extends beyond right set's limit");
    for (std::size_t w = 0; w < words_.size(); ++w)
        if (words_[w] & ~o.words_[w]) return false;
    return true;
}

bool PrefixSet::is_full() const {
    std::size_t last = words_.size() - 1;
    for (std::size_t w = 0; w < last; ++w)
        if (words_[w] != ~std::uint64_t(0)) return false;
    std::uint64_t tail_mask =
        (limit_ & 63) == 63 ? ~std::uint64_t(0) : (std::uint64_t(1) << ((limit_ & 63) + 1)) - 1;
    return (words_[last] & tail_mask) == tail_mask;
}

void PrefixSet::mask_tail() {
    if ((limit_ & 63) != 63) words_.back() &= (std::uint64_t(1) << ((limit_ & 63) + 1)) - 1;
}

void save_prefix_set(const PrefixSet& set, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_prefix_set: cannot open " + path.string());
    auto put_u32 = [&](std::uint32_t v) {
        char b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(b, 4);
    };
    auto put_u64 = [&](std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
        out.write(b, 8);
    };
    out.write(kMagic, 4);
    put_u32(kVersion);
    put_u64(set.limit());
    put_u32(static_cast<std::uint32_t>(set.label().size()));
    out.write(set.label().data(), static_cast<std::streamsize>(set.label().size()));
    auto words = set.words();
    put_u64(words.size());
    for (std::uint64_t w : words) put_u64(w);
    if (!out) throw std::runtime_error("save_prefix_set: write failed for " + path.string());
}

PrefixSet load_prefix_set(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_prefix_set: cannot open " + path.string());
    auto get_u32 = [&] {
        char b[4];
        in.read(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    };
    auto get_u64 = [&] {
        char b[8];
        in.read(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    };
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("load_prefix_set: bad magic in " + path.string());
    std::uint32_t version = get_u32();
    if (version != kVersion)
        throw std::runtime_error("load_prefix_set: unsupported version " + std::to_string(version));
    std::uint64_t limit = get_u64();
    std::uint32_t label_len = get_u32();
    std::string label(label_len, '\0');
    in.read(label.data(), label_len);
    std::uint64_t word_count = get_u64();
    PrefixSet set(limit, std::move(label));
    if (word_count != set.words().size())
        throw std::runtime_error("load_prefix_set: word count mismatch in " + path.string());
    for (std::uint64_t i = 0; i < word_count; ++i) set.mutable_words()[i] = get_u64();
    if (!in) throw std::runtime_error("load_prefix_set: truncated file " + path.string());
    set.mask_tail();
    return set;
}

}  // namespace densitylab
