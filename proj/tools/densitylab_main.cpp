#include <CLI11.hpp>

#include <cstdio>
#include <string>

#include "densitylab/experiment.hpp"

namespace {

const char* describe(const std::string& name) {
    if (name == "prop1") return "stride set of prescribed density alpha whose self-sumset fills the range";
    if (name == "prop3") return "mod-7 block set of density 3/7 whose self-sumset ratio oscillates";
    if (name == "subset-sums") return "perturbed-doubling terms and the density of their subset sums";
    if (name == "classical") return "multiplicative families and their product sets";
    if (name == "product-alpha") return "family with density above alpha whose product set stays below";
    if (name == "omega-split") return "balanced two-factor splits of every composite by prime count";
    if (name == "sieve-cover") return "interval coverage by multiples of coprime divisors vs the sieve product";
    if (name == "cascade") return "alternating prune/recover stages preserving a product-count floor";
    if (name == "freiman-scan") return "sumset density inequality across the construction corpus";
    return "";
}

const char* status_name(densitylab::RunStatus s) {
    switch (s) {
        case densitylab::RunStatus::Ok: return "ok";
        case densitylab::RunStatus::AssertionFailure: return "assertion-failure";
        case densitylab::RunStatus::InvalidConfig: return "invalid-config";
        case densitylab::RunStatus::ResourceLimit: return "resource-limit";
    }
    return "unknown";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"densitylab: set constructions, bitset sum/product engines, and density evidence"};
    app.require_subcommand(1);

    densitylab::ExperimentConfig cfg;
    for (const auto& name : densitylab::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, describe(name));
        sub->callback([&cfg, name] { cfg.experiment = name; });
        sub->add_option("--limit", cfg.limit, "inclusive prefix bound (bitmap extent)")
            ->capture_default_str();
        sub->add_option("--alpha", cfg.alpha, "target density, exact ('3/10' or '0.3')");
        sub->add_option("--beta", cfg.beta, "product-density target for the prime split")
            ->capture_default_str();
        sub->add_option("--k", cfg.k, "family parameter k (coprime/multiples)");
        sub->add_option("--r", cfg.r, "prime-count parameter r (prime_union/sieve-cover)");
        sub->add_option("--kind", cfg.kind,
                        "classical family: nonsquarefree1|squarefree|coprime|multiples|prime_union|omega_bounded");
        sub->add_option("--theta", cfg.theta, "perturbation preset: zero|k_over_log2[:c]|constant:c")
            ->capture_default_str();
        sub->add_option("--sign", cfg.sign, "perturbation side: plus|minus|alternate")
            ->capture_default_str();
        sub->add_option("--schedule", cfg.schedule,
                        "prop3/freiman-scan: block rule (default|ratio:R|N1,N2,...); "
                        "density reports: checkpoint eta or explicit points");
        sub->add_option("--seed", cfg.seed, "leading terms of the sequence")
            ->delimiter(',')
            ->capture_default_str();
        sub->add_option("--count", cfg.count, "terms to generate (sequence experiments)")
            ->capture_default_str();
        sub->add_option("--cap", cfg.cap, "partial-sum ceiling for term generation")
            ->capture_default_str();
        sub->add_option("--stages", cfg.stages, "refinement stages to run")->capture_default_str();
        sub->add_option("--tol", cfg.tol, "numeric tolerance for the embedded checks")
            ->capture_default_str();
        sub->add_option("--format", cfg.format, "document format: csv|json")->capture_default_str();
        sub->add_option("--out", cfg.out, "write the document here (atomically) instead of stdout");
        sub->add_option("--budget", cfg.budget, "work-unit guard; runs above it are refused")
            ->capture_default_str();
        sub->add_option("--cache-dir", cfg.cache_dir,
                        "snapshot cache for expensive sets (DENSITYLAB_CACHE overrides)");
        sub->add_option("--threads", cfg.threads, "worker threads for the set engines")
            ->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(densitylab::RunStatus::InvalidConfig);
    }

    densitylab::ExperimentResult res = densitylab::run_experiment(cfg);

    if (cfg.out.empty()) {
        std::fputs(res.document.c_str(), stdout);
    } else {
        for (const auto& path : res.written) std::fprintf(stderr, "wrote %s\n", path.c_str());
    }
    for (const auto& f : res.failures) std::fprintf(stderr, "fail: %s\n", f.c_str());
    std::fprintf(stderr, "%s: %s\n", cfg.experiment.c_str(), status_name(res.status));
    return static_cast<int>(res.status);
}
