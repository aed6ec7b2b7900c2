#include "densitylab/theta.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "densitylab/errors.hpp"
#include "densitylab/set_ops.hpp"

namespace densitylab {

SignPolicy parse_sign_policy(std::string_view text) {
    if (text == "plus") return SignPolicy::Plus;
    if (text == "minus") return SignPolicy::Minus;
    if (text == "alternate") return SignPolicy::Alternate;
    throw std::invalid_argument("parse_sign_policy: unknown policy '" + std::string(text) + "'");
}

std::string to_string(SignPolicy policy) {
    switch (policy) {
        case SignPolicy::Plus: return "plus";
        case SignPolicy::Minus: return "minus";
        case SignPolicy::Alternate: return "alternate";
    }
    return "?";
}

std::uint64_t ThetaSpec::operator()(std::uint64_t k) const {
    switch (kind) {
        case Kind::Zero:
            return 0;
        case Kind::Constant:
            return value;
        case Kind::KOverLogSq: {
            if (k <= 1) return k;  // log^2 degenerates; callers' s/2 guard rejects this loudly
            double lg = std::log(static_cast<double>(k));
            return static_cast<std::uint64_t>(scale * static_cast<double>(k) / (lg * lg));
        }
    }
    return 0;
}

ThetaSpec ThetaSpec::parse(std::string_view text) {
    ThetaSpec spec;
    if (text == "zero") {
        spec.kind = Kind::Zero;
        return spec;
    }
    auto colon = text.find(':');
    std::string_view head = text.substr(0, colon);
    std::string_view arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "k_over_log2") {
        spec.kind = Kind::KOverLogSq;
        if (!arg.empty()) {
            spec.scale = std::stod(std::string(arg));
            if (!(spec.scale > 0)) throw std::invalid_argument("ThetaSpec: scale must be positive");
        }
        return spec;
    }
    if (head == "constant") {
        spec.kind = Kind::Constant;
        if (arg.empty()) throw std::invalid_argument("ThetaSpec: constant preset needs a value, e.g. constant:5");
        spec.value = std::stoull(std::string(arg));
        return spec;
    }
    throw std::invalid_argument("ThetaSpec: unknown preset '" + std::string(text) + "'");
}

std::string ThetaSpec::describe() const {
    switch (kind) {
        case Kind::Zero: return "zero";
        case Kind::Constant: return "constant:" + std::to_string(value);
        case Kind::KOverLogSq: {
            if (scale == 1.0) return "k_over_log2";
            std::string s = std::to_string(scale);
            s.erase(s.find_last_not_of('0') + 1);
            if (!s.empty() && s.back() == '.') s.pop_back();
            return "k_over_log2:" + s;
        }
    }
    return "?";
}

namespace {

bool step_is_plus(SignPolicy policy, std::size_t generated_index) {
    switch (policy) {
        case SignPolicy::Plus: return true;
        case SignPolicy::Minus: return false;
        case SignPolicy::Alternate: return generated_index % 2 == 0;
    }
    return true;
}

// Next term after a sequence whose sum is s, or 0 if the rule cannot legally
// continue (theta too large, or the term would not increase).
std::uint64_t next_term(const ThetaSpec& theta, SignPolicy sign, std::size_t generated_index,
                        std::uint64_t s, std::uint64_t prev_term) {
    std::uint64_t tv = theta(s);
    if (tv >= s || tv >= s - tv) return 0;  // theta(s) < s/2, overflow-safe
    std::uint64_t a = step_is_plus(sign, generated_index) ? s + tv : s - tv;
    if (a <= prev_term) return 0;
    return a;
}

}  // namespace

ThetaSequence theta_sequence(std::span<const std::uint64_t> seed, const ThetaSpec& theta,
                             SignPolicy sign, std::size_t count, std::uint64_t sum_cap) {
    if (seed.empty()) throw std::invalid_argument("theta_sequence: seed must be nonempty");
    if (count < seed.size()) throw std::invalid_argument("theta_sequence: count smaller than seed");
    for (std::size_t i = 0; i < seed.size(); ++i) {
        if (seed[i] == 0) throw std::invalid_argument("theta_sequence: seed terms must be positive");
        if (i > 0 && seed[i] <= seed[i - 1])
            throw std::invalid_argument("theta_sequence: seed must be strictly increasing");
    }
    ThetaSequence seq;
    seq.theta = theta;
    seq.sign = sign;
    seq.seed_count = seed.size();
    seq.terms.assign(seed.begin(), seed.end());
    seq.sums.resize(1, 0);
    for (std::uint64_t t : seq.terms) seq.sums.push_back(seq.sums.back() + t);

    std::size_t generated = 0;
    while (seq.terms.size() < count) {
        std::uint64_t s = seq.sums.back();
        std::uint64_t tv = theta(s);
        if (tv >= s || tv >= s - tv)
            throw ConstructionError("theta_sequence: theta(" + std::to_string(s) + ") = " + std::to_string(tv) +
                                    " is not below s/2 at step " + std::to_string(seq.terms.size() + 1));
        std::uint64_t a = step_is_plus(sign, generated) ? s + tv : s - tv;
        if (a <= seq.terms.back())
            throw ConstructionError("theta_sequence: term at step " + std::to_string(seq.terms.size() + 1) +
                                    " (" + std::to_string(a) + ") does not exceed its predecessor " +
                                    std::to_string(seq.terms.back()));
        if (s + a > sum_cap) break;
        seq.terms.push_back(a);
        seq.sums.push_back(s + a);
        ++generated;
    }
    return seq;
}

DeltaSeries delta_series(const ThetaSequence& seq, std::uint64_t bit_cap) {
    if (seq.count() == 0) throw std::invalid_argument("delta_series: empty sequence");
    const std::uint64_t s_last = seq.sums.back();
    if (s_last > bit_cap)
        throw ResourceError("delta_series: partial sum " + std::to_string(s_last) + " exceeds bit cap " +
                            std::to_string(bit_cap));

    // The infinite tail is invisible below s_N once a_{N+2} clears s_N.  The
    // one term that can reach below is a_{N+1}; materialize it virtually.
    std::vector<std::uint64_t> terms(seq.terms.begin(), seq.terms.end());
    std::size_t generated = seq.count() - seq.seed_count;
    std::uint64_t v1 = next_term(seq.theta, seq.sign, generated, s_last, terms.back());
    if (v1 != 0 && v1 <= s_last) {
        terms.push_back(v1);
        std::uint64_t s_next = s_last + v1;
        std::uint64_t v2 = next_term(seq.theta, seq.sign, generated + 1, s_next, v1);
        if (v2 != 0 && v2 <= s_last)
            throw ConstructionError("delta_series: second lookahead term " + std::to_string(v2) +
                                    " reaches below s_n = " + std::to_string(s_last) +
                                    "; exact counting would need a deeper tail");
    }

    PrefixSet sums_set = subset_sums(terms, s_last);

    DeltaSeries out;
    out.n.reserve(seq.count());
    out.s.reserve(seq.count());
    out.counts.reserve(seq.count());
    out.deltas.reserve(seq.count());
    for (std::size_t i = 1; i <= seq.count(); ++i) {
        std::uint64_t sn = seq.sums[i];
        std::uint64_t c = sums_set.count_prefix(sn);
        out.n.push_back(i);
        out.s.push_back(sn);
        out.counts.push_back(c);
        out.deltas.push_back(static_cast<double>(c) / static_cast<double>(sn));
    }
    for (std::size_t i = 1; i < out.deltas.size(); ++i) {
        std::uint64_t sn = out.s[i];
        double tv = static_cast<double>(std::max<std::uint64_t>(seq.theta(sn), 1));
        double c = std::abs(out.deltas[i] - out.deltas[i - 1]) * static_cast<double>(sn) / tv;
        out.fitted_c = std::max(out.fitted_c, c);
    }
    return out;
}

GreedyDecomposition greedy_decompose(const ThetaSequence& seq, std::uint64_t x, std::size_t cutoff) {
    const auto& terms = seq.terms;
    if (cutoff + 2 > terms.size())
        throw std::invalid_argument("greedy_decompose: cutoff " + std::to_string(cutoff) +
                                    " leaves no usable terms (need cutoff + 2 <= count)");
    if (x >= terms.back())
        throw std::out_of_range("greedy_decompose: x = " + std::to_string(x) +
                                " not below the last term " + std::to_string(terms.back()));

    GreedyDecomposition out;
    std::uint64_t rem = x;
    // Largest position whose term fits; subsequent picks are also capped one
    // below the previous pick so every term is used at most once.
    auto largest_fitting = [&](std::uint64_t v, std::size_t below) -> std::ptrdiff_t {
        // below = one past the highest allowed position.
        for (std::ptrdiff_t p = static_cast<std::ptrdiff_t>(below) - 1; p >= 0; --p)
            if (terms[static_cast<std::size_t>(p)] <= v) return p;
        return -1;
    };
    std::size_t window = terms.size();
    while (true) {
        std::ptrdiff_t candidate = largest_fitting(rem, window);
        if (candidate < 0 || static_cast<std::size_t>(candidate) <= cutoff) break;
        out.positions.push_back(static_cast<std::size_t>(candidate));
        rem -= terms[static_cast<std::size_t>(candidate)];
        window = static_cast<std::size_t>(candidate);
    }
    out.remainder = rem;
    return out;
}

}  // namespace densitylab
