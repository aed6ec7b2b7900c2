#include "densitylab/constructions.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "densitylab/errors.hpp"

namespace densitylab {

PrefixSet prop1_set(const Rational& alpha, std::uint64_t limit) {
    if (!(alpha > Rational(0) && alpha <= Rational(1)))
        throw std::invalid_argument("prop1_set: alpha must be in (0, 1], got " + alpha.str());
    PrefixSet set(limit, "prop1(alpha=" + alpha.str() + ")");
    const auto num = static_cast<std::uint64_t>(alpha.num());
    const auto den = static_cast<std::uint64_t>(alpha.den());
    // floor(1/alpha) = floor(den/num)
    std::uint64_t head = den / num;
    for (std::uint64_t v = 0; v <= std::min(head, limit); ++v) set.insert(v);
    // floor(n/alpha) = floor(n*den/num), exact in integers
    for (std::uint64_t n = 1;; ++n) {
        std::uint64_t v = static_cast<std::uint64_t>((static_cast<__uint128_t>(n) * den) / num);
        if (v > limit) break;
        set.insert(v);
    }
    return set;
}

BlockSchedule BlockSchedule::default_rule() { return {}; }

BlockSchedule BlockSchedule::fixed_ratio(std::uint64_t ratio) {
    if (ratio < 2) throw std::invalid_argument("BlockSchedule: ratio must be >= 2");
    BlockSchedule s;
    s.kind = Kind::FixedRatio;
    s.ratio = ratio;
    return s;
}

BlockSchedule BlockSchedule::explicit_points(std::vector<std::uint64_t> points) {
    if (points.size() < 2 || points[0] != 0 || points[1] != 1)
        throw std::invalid_argument("BlockSchedule: explicit schedule must start 0, 1");
    for (std::size_t i = 2; i < points.size(); ++i)
        if (points[i] < 2 * points[i - 1])
            throw std::invalid_argument("BlockSchedule: boundaries must at least double (N_" +
                                        std::to_string(i) + " = " + std::to_string(points[i]) + ")");
    BlockSchedule s;
    s.kind = Kind::Explicit;
    s.points = std::move(points);
    return s;
}

BlockSchedule BlockSchedule::parse(std::string_view text) {
    if (text.empty() || text == "default") return default_rule();
    if (text.rfind("ratio:", 0) == 0)
        return fixed_ratio(std::stoull(std::string(text.substr(6))));
    // comma-separated explicit list
    std::vector<std::uint64_t> pts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (item.empty()) throw std::invalid_argument("BlockSchedule: empty item in list");
        pts.push_back(std::stoull(item));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return explicit_points(std::move(pts));
}

std::vector<std::uint64_t> BlockSchedule::materialize(std::uint64_t limit) const {
    std::vector<std::uint64_t> out;
    if (kind == Kind::Explicit) {
        out = points;
        if (7 * out.back() < limit)
            throw std::invalid_argument("BlockSchedule: explicit schedule ends at N=" +
                                        std::to_string(out.back()) + ", short of limit " +
                                        std::to_string(limit));
        return out;
    }
    out = {0, 1};
    while (7 * out.back() < limit) {
        std::uint64_t next = kind == Kind::FixedRatio ? ratio * out.back()
                                                      : (out.size() + 1) * out.back();
        if (next <= out.back()) throw std::invalid_argument("BlockSchedule: schedule stalled");
        out.push_back(next);
    }
    return out;
}

std::string BlockSchedule::describe() const {
    switch (kind) {
        case Kind::Default: return "default";
        case Kind::FixedRatio: return "ratio:" + std::to_string(ratio);
        case Kind::Explicit: return "explicit(" + std::to_string(points.size()) + " points)";
    }
    return "?";
}

PrefixSet prop3_set(const BlockSchedule& schedule, std::uint64_t limit) {
    auto n = schedule.materialize(limit);
    PrefixSet set(limit, "prop3(" + schedule.describe() + ")");
    // Base: residues 0..3 are members outright (union of both patterns).
    for (std::uint64_t v = 0; v <= std::min<std::uint64_t>(3, limit); ++v) set.insert(v);
    for (std::size_t m = 0; m + 1 < n.size(); ++m) {
        std::uint64_t lo = 7 * n[m];
        std::uint64_t hi = std::min(7 * n[m + 1], limit);
        if (lo > limit) break;
        std::span<const std::uint64_t> pattern =
            m % 2 == 0 ? std::span<const std::uint64_t>(kEvenBlockResidues)
                       : std::span<const std::uint64_t>(kOddBlockResidues);
        // First multiple of 7 at or above lo is lo itself (lo = 7*N_m).
        for (std::uint64_t base = lo; base <= hi; base += 7) {
            for (std::uint64_t r : pattern) {
                std::uint64_t v = base + r;
                if (v >= lo && v <= hi) set.insert(v);
            }
        }
    }
    return set;
}

ClassicalKind parse_classical_kind(std::string_view text) {
    if (text == "nonsquarefree1") return ClassicalKind::NonSquarefree1;
    if (text == "squarefree") return ClassicalKind::Squarefree;
    if (text == "coprime") return ClassicalKind::Coprime;
    if (text == "multiples") return ClassicalKind::Multiples;
    if (text == "prime_union") return ClassicalKind::PrimeUnion;
    if (text == "omega_bounded") return ClassicalKind::OmegaBounded;
    throw std::invalid_argument("parse_classical_kind: unknown kind '" + std::string(text) + "'");
}

std::string classical_kind_name(ClassicalKind kind) {
    switch (kind) {
        case ClassicalKind::NonSquarefree1: return "nonsquarefree1";
        case ClassicalKind::Squarefree: return "squarefree";
        case ClassicalKind::Coprime: return "coprime";
        case ClassicalKind::Multiples: return "multiples";
        case ClassicalKind::PrimeUnion: return "prime_union";
        case ClassicalKind::OmegaBounded: return "omega_bounded";
    }
    return "?";
}

PrefixSet classical_set(ClassicalKind kind, std::uint64_t param, std::uint64_t limit,
                        const ArithTables& tables) {
    if (limit < 1) throw std::invalid_argument("classical_set: limit must be >= 1");
    if (tables.limit < limit) throw std::invalid_argument("classical_set: tables shorter than limit");
    std::string label = classical_kind_name(kind);
    switch (kind) {
        case ClassicalKind::NonSquarefree1: {
            PrefixSet s(limit, label);
            s.insert(1);
            for (std::uint64_t v = 4; v <= limit; ++v)
                if (!is_kth_power_free(v, 2, tables)) s.insert(v);
            return s;
        }
        case ClassicalKind::Squarefree: {
            PrefixSet s(limit, label);
            for (std::uint64_t v = 1; v <= limit; ++v)
                if (is_kth_power_free(v, 2, tables)) s.insert(v);
            return s;
        }
        case ClassicalKind::Coprime: {
            if (param < 1) throw std::invalid_argument("classical_set: coprime needs k >= 1");
            PrefixSet s(limit, label + "(" + std::to_string(param) + ")");
            for (std::uint64_t v = 1; v <= limit; ++v)
                if (std::gcd(v, param) == 1) s.insert(v);
            return s;
        }
        case ClassicalKind::Multiples: {
            if (param < 1) throw std::invalid_argument("classical_set: multiples needs k >= 1");
            PrefixSet s(limit, label + "(" + std::to_string(param) + ")");
            for (std::uint64_t v = param; v <= limit; v += param) s.insert(v);
            return s;
        }
        case ClassicalKind::PrimeUnion: {
            if (param < 1) throw std::invalid_argument("classical_set: prime_union needs r >= 1");
            if (param > tables.primes.size())
                throw std::invalid_argument("classical_set: r exceeds primes in table");
            PrefixSet s(limit, label + "(" + std::to_string(param) + ")");
            for (std::size_t i = 0; i < param; ++i) {
                std::uint64_t p = tables.primes[i];
                for (std::uint64_t v = p; v <= limit; v += p) s.insert(v);
            }
            return s;
        }
        case ClassicalKind::OmegaBounded: {
            PrefixSet s(limit, label);
            s.insert(1);
            if (limit >= 2) s.insert(2);
            for (std::uint64_t v = 3; v <= limit; ++v) {
                double bound = 0.75 * std::log(std::log(static_cast<double>(v))) + 1.0;
                if (omega(v, tables) <= bound) s.insert(v);
            }
            return s;
        }
    }
    throw std::invalid_argument("classical_set: unknown kind");
}

std::pair<Rational, Rational> beta_gamma_closed_form(std::uint32_t r) {
    if (r < 1 || r > 12)
        throw std::invalid_argument("beta_gamma_closed_form: r must be in [1, 12] for exact arithmetic");
    auto primes = primes_up_to(41);  // covers p_12 = 37
    Rational prod(1);
    Rational inv_sum(0);
    for (std::uint32_t i = 0; i < r; ++i) {
        std::uint32_t p = primes[i];
        prod *= Rational(p - 1, p);
        inv_sum += Rational(1, p);
    }
    Rational gamma = Rational(1) - prod;
    Rational beta = Rational(1) - (Rational(1) + inv_sum) * prod;
    return {beta, gamma};
}

std::optional<OmegaSplit> split_by_omega(std::uint64_t n, const ArithTables& tables) {
    if (n < 2) return std::nullopt;
    auto factors = factorize(n, tables);  // ascending, with multiplicity
    auto t = static_cast<std::uint32_t>(factors.size());
    if (t < 2) return std::nullopt;
    OmegaSplit split;
    split.t = t;
    split.u = (t - 1) / 2;
    split.n1 = factors[t - 1];  // the largest factor...
    for (std::uint32_t i = 0; i + 1 < split.u; ++i) split.n1 *= factors[i];  // ...plus the u-1 smallest
    split.n2 = 1;
    for (std::uint32_t i = split.u == 0 ? 0 : split.u - 1; i < t - 1; ++i) split.n2 *= factors[i];
    return split;
}

CoverReport inclusion_exclusion_cover(const PrefixSet& a, std::span<const std::uint64_t> divisors,
                                      std::uint64_t x) {
    if (x < 1) throw std::invalid_argument("inclusion_exclusion_cover: x must be >= 1");
    if (a.limit() < x)
        throw std::invalid_argument("inclusion_exclusion_cover: set limit below x");
    if (divisors.empty() || divisors.size() > 20)
        throw std::invalid_argument("inclusion_exclusion_cover: need 1..20 divisors");
    for (std::size_t i = 0; i < divisors.size(); ++i) {
        if (divisors[i] < 2) throw std::invalid_argument("inclusion_exclusion_cover: divisors must be >= 2");
        for (std::size_t j = i + 1; j < divisors.size(); ++j)
            if (std::gcd(divisors[i], divisors[j]) != 1)
                throw std::invalid_argument("inclusion_exclusion_cover: divisors must be pairwise coprime");
    }

    CoverReport report;

    // Direct count: n <= x is covered iff some d | n with n/d in A.
    PrefixSet covered(x);
    for (std::uint64_t d : divisors) {
        a.for_each_up_to(x / d, [&](std::uint64_t b) {
            if (b >= 1) covered.insert(d * b);
        });
    }
    report.covered = covered.count_prefix(x);
    report.uncovered = x - report.covered;

    // Inclusion-exclusion over nonempty subsets S: (-1)^(|S|+1) * #{n <= x :
    // lcm(S) | n and n/d in A for every d in S}.  Pairwise-coprime divisors
    // make lcm(S) the plain product.
    std::int64_t expansion = 0;
    const std::size_t k = divisors.size();
    for (std::size_t mask = 1; mask < (std::size_t(1) << k); ++mask) {
        __uint128_t l = 1;
        for (std::size_t i = 0; i < k; ++i)
            if (mask & (std::size_t(1) << i)) l *= divisors[i];
        if (l > x) continue;
        auto lcm = static_cast<std::uint64_t>(l);
        std::int64_t term_count = 0;
        for (std::uint64_t m = lcm; m <= x; m += lcm) {
            bool all = true;
            for (std::size_t i = 0; i < k && all; ++i)
                if (mask & (std::size_t(1) << i)) {
                    std::uint64_t q = m / divisors[i];
                    if (q < 1 || !a.contains(q)) all = false;
                }
            if (all) ++term_count;
        }
        expansion += (std::popcount(mask) % 2 == 1) ? term_count : -term_count;
    }
    report.expansion = expansion;

    double prod = 1.0;
    for (std::uint64_t d : divisors) prod *= 1.0 - 1.0 / static_cast<double>(d);
    report.predicted_uncovered = static_cast<double>(x) * prod;
    return report;
}

PrefixSet power_block_set(std::uint64_t limit) {
    PrefixSet set(limit, "power_blocks");
    set.insert(0);
    for (std::uint64_t lo = 1; lo <= limit; lo *= 4) {
        std::uint64_t hi = std::min(2 * lo, limit);
        for (std::uint64_t v = lo; v <= hi; ++v) set.insert(v);
        if (lo > limit / 4) break;
    }
    return set;
}

}  // namespace densitylab
