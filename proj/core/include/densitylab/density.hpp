#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "densitylab/prefix_set.hpp"
#include "densitylab/rational.hpp"

namespace densitylab {

// Where to sample |A ∩ [1, x]| / x.  Geometric: x_i = floor(eta^i), deduped.
// Explicit: caller-supplied points (block edges and the like).
struct CheckpointSchedule {
    enum class Kind { Geometric, Explicit };

    Kind kind = Kind::Geometric;
    double eta = 1.3;
    std::vector<std::uint64_t> points;

    static CheckpointSchedule geometric(double eta = 1.3);
    static CheckpointSchedule explicit_points(std::vector<std::uint64_t> points);

    // Ascending, deduplicated, clipped to [1, limit].
    std::vector<std::uint64_t> materialize(std::uint64_t limit) const;

    std::string describe() const;
};

// Finite-prefix density evidence: ratios at checkpoints plus min/max over the
// tail window, which stand in for liminf/limsup.  Early prefixes are
// transient, so the estimates deliberately ignore the head.
struct DensityReport {
    std::string label;
    std::uint64_t limit = 0;
    std::string schedule;
    double tail_fraction = 0.5;
    std::vector<std::uint64_t> checkpoints;
    std::vector<std::uint64_t> counts;
    std::vector<double> ratios;
    double lower_est = 0.0;
    double upper_est = 0.0;
};

// Requires at least 4 materialized checkpoints (std::invalid_argument
// otherwise) and tail_fraction in (0, 1].
DensityReport density_report(const PrefixSet& set, const CheckpointSchedule& schedule,
                             double tail_fraction = 0.5);

// Exact density |distinct residues|/modulus of a union of residue classes.
// The class of 0 mod m contributes like any other (its positive members
// m, 2m, ... carry the density; 0 itself never counts).
Rational periodic_density_exact(std::span<const std::uint64_t> residues, std::uint64_t modulus);

// gamma - (alpha/2 + min(alpha, 1/2)): nonnegative for any set where alpha is
// the density of A and gamma the density of A+A (0 in A, gcd(A) = 1).
// Negative values beyond estimation noise flag an inconsistency.
double freiman_gap(double alpha, double gamma);

}  // namespace densitylab
