#include "densitylab/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace densitylab {

CheckpointSchedule CheckpointSchedule::geometric(double eta) {
    if (!(eta > 1.0)) throw std::invalid_argument("CheckpointSchedule: eta must be > 1");
    CheckpointSchedule s;
    s.kind = Kind::Geometric;
    s.eta = eta;
    return s;
}

CheckpointSchedule CheckpointSchedule::explicit_points(std::vector<std::uint64_t> points) {
    CheckpointSchedule s;
    s.kind = Kind::Explicit;
    s.points = std::move(points);
    return s;
}

std::vector<std::uint64_t> CheckpointSchedule::materialize(std::uint64_t limit) const {
    std::vector<std::uint64_t> out;
    if (kind == Kind::Geometric) {
        double x = 1.0;
        while (true) {
            auto v = static_cast<std::uint64_t>(x);
            if (v > limit) break;
            if (v >= 1 && (out.empty() || v != out.back())) out.push_back(v);
            x *= eta;
            if (x > 2e18) break;
        }
    } else {
        out = points;
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        while (!out.empty() && out.front() < 1) out.erase(out.begin());
        while (!out.empty() && out.back() > limit) out.pop_back();
    }
    return out;
}

std::string CheckpointSchedule::describe() const {
    if (kind == Kind::Geometric) {
        std::string e = std::to_string(eta);
        e.erase(e.find_last_not_of('0') + 1);
        if (!e.empty() && e.back() == '.') e.pop_back();
        return "geometric(eta=" + e + ")";
    }
    return "explicit(" + std::to_string(points.size()) + " points)";
}

DensityReport density_report(const PrefixSet& set, const CheckpointSchedule& schedule,
                             double tail_fraction) {
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw std::invalid_argument("density_report: tail_fraction must be in (0, 1]");
    DensityReport r;
    r.label = set.label();
    r.limit = set.limit();
    r.schedule = schedule.describe();
    r.tail_fraction = tail_fraction;
    r.checkpoints = schedule.materialize(set.limit());
    if (r.checkpoints.size() < 4)
        throw std::invalid_argument("density_report: need at least 4 checkpoints, got " +
                                    std::to_string(r.checkpoints.size()));
    r.counts.reserve(r.checkpoints.size());
    r.ratios.reserve(r.checkpoints.size());
    for (std::uint64_t x : r.checkpoints) {
        std::uint64_t c = set.count_prefix(x);
        r.counts.push_back(c);
        r.ratios.push_back(static_cast<double>(c) / static_cast<double>(x));
    }
    std::size_t n = r.ratios.size();
    std::size_t tail = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(n))));
    auto begin = r.ratios.end() - static_cast<std::ptrdiff_t>(tail);
    r.lower_est = *std::min_element(begin, r.ratios.end());
    r.upper_est = *std::max_element(begin, r.ratios.end());
    return r;
}

Rational periodic_density_exact(std::span<const std::uint64_t> residues, std::uint64_t modulus) {
    if (modulus < 1) throw std::invalid_argument("periodic_density_exact: modulus must be >= 1");
    std::vector<std::uint64_t> reduced;
    reduced.reserve(residues.size());
    for (std::uint64_t r : residues) reduced.push_back(r % modulus);
    std::sort(reduced.begin(), reduced.end());
    reduced.erase(std::unique(reduced.begin(), reduced.end()), reduced.end());
    return {static_cast<Rational::Int>(reduced.size()), static_cast<Rational::Int>(modulus)};
}

double freiman_gap(double alpha, double gamma) {
    return gamma - (alpha / 2.0 + std::min(alpha, 0.5));
}

}  // namespace densitylab
