#pragma once

#include <stdexcept>
#include <string>

namespace densitylab {

// A generator could not satisfy its own construction rules for the given
// parameters (e.g. a term sequence stopped being strictly increasing, or a
// greedy search exhausted its range).  Distinct from invalid_argument: the
// inputs were legal, the data refused.
class ConstructionError : public std::runtime_error {
public:
    explicit ConstructionError(const std::string& what) : std::runtime_error(what) {}
};

// A requested computation exceeds a configured capacity guard (bitmap size,
// work budget).  Callers map this to the resource-guard exit code.
class ResourceError : public std::runtime_error {
public:
    explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace densitylab
