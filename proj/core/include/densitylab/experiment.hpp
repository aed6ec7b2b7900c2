#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace densitylab {

inline constexpr const char* kEngineVersion = "densitylab 0.1.0";

// Flag surface of the CLI, harness-side.  alpha stays a string so exact
// rationals ("0.1" = 1/10, "3/7") survive until the math needs them.
struct ExperimentConfig {
    std::string experiment;
    std::uint64_t limit = 100000;
    std::string alpha;               // per-experiment default when empty
    double beta = 0.5;
    std::uint64_t k = 0;             // classical parameter
    std::uint64_t r = 0;             // prime-union / sieve-cover parameter
    std::string kind;                // classical kind name
    std::string theta = "k_over_log2";
    std::string sign = "minus";
    std::string schedule;            // experiment-specific; "" = default
    std::vector<std::uint64_t> seed = {2, 3};
    std::uint64_t count = 40;        // term-sequence length request
    std::uint64_t cap = 10000000;    // term-sequence partial-sum cap
    unsigned stages = 6;
    double tol = 0.01;
    std::string format = "csv";      // csv | json
    std::string out;                 // output path; empty = caller prints document
    double budget = 1e11;            // work-unit guard (see estimate_work)
    std::string cache_dir;           // DENSITYLAB_CACHE env overrides
    unsigned threads = 1;

    // Canonical JSON echo (deterministic field order via sorted keys).
    std::string to_json() const;
};

enum class RunStatus {
    Ok = 0,
    AssertionFailure = 1,
    InvalidConfig = 2,
    ResourceLimit = 3,
};

struct ExperimentResult {
    RunStatus status = RunStatus::Ok;
    std::vector<std::string> failures;   // violated invariants, human-readable
    std::string document;                // primary rendered output (csv or json)
    std::string summary_json;            // machine-readable result summary
    std::vector<std::string> written;    // files created (when config.out set)
};

const std::vector<std::string>& experiment_names();

// Coarse work-unit estimate (1 unit ~ one 64-bit word op) used by the budget
// guard before anything is built.
double estimate_work(const ExperimentConfig& config);

// Runs one experiment end to end: validates, guards the budget, builds the
// sets, evaluates the module invariants it exercises, renders the document,
// and (when config.out is set) writes it atomically.  Exceptions are mapped
// to RunStatus; this only throws for genuinely unexpected conditions.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace densitylab
