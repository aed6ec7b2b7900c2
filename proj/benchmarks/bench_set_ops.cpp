#include <benchmark/benchmark.h>

#include <cstdint>

#include "densitylab/constructions.hpp"
#include "densitylab/numtheory.hpp"
#include "densitylab/prefix_set.hpp"
#include "densitylab/rational.hpp"
#include "densitylab/set_ops.hpp"
#include "densitylab/theta.hpp"

using namespace densitylab;

namespace {

PrefixSet sample_set(std::uint64_t limit, std::uint64_t stride) {
    PrefixSet a(limit);
    for (std::uint64_t v = 0; v <= limit; v += stride) a.insert(v);
    return a;
}

void BM_Sumset(benchmark::State& state) {
    const auto limit = static_cast<std::uint64_t>(state.range(0));
    auto a = prop1_set(Rational(1, 10), limit);
    for (auto _ : state) {
        auto s = sumset(a, a, limit);
        benchmark::DoNotOptimize(s.count_prefix(limit));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Sumset)->Range(1 << 14, 1 << 20)->Complexity();

void BM_SumsetThreaded(benchmark::State& state) {
    const std::uint64_t limit = 1 << 20;
    auto a = prop1_set(Rational(1, 10), limit);
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        auto s = sumset(a, a, limit, threads);
        benchmark::DoNotOptimize(s.count_prefix(limit));
    }
}
BENCHMARK(BM_SumsetThreaded)->Arg(1)->Arg(2)->Arg(4);

void BM_ProductSet(benchmark::State& state) {
    const auto limit = static_cast<std::uint64_t>(state.range(0));
    auto a = sample_set(limit, 3);
    a.erase_range(0, 0);
    a.insert(1);
    for (auto _ : state) {
        auto p = product_set(a, a, limit);
        benchmark::DoNotOptimize(p.count_prefix(limit));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProductSet)->Range(1 << 14, 1 << 20)->Complexity();

void BM_SubsetSums(benchmark::State& state) {
    const auto cap = static_cast<std::uint64_t>(state.range(0));
    auto seq = theta_sequence(std::vector<std::uint64_t>{2, 3}, ThetaSpec::parse("k_over_log2"),
                              SignPolicy::Minus, 64, cap);
    for (auto _ : state) {
        auto s = subset_sums(seq.terms, cap);
        benchmark::DoNotOptimize(s.count_prefix(cap));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SubsetSums)->Range(1 << 16, 1 << 22)->Complexity();

void BM_SieveBuild(benchmark::State& state) {
    const auto limit = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) {
        auto tables = build_arith_tables(limit);
        benchmark::DoNotOptimize(tables.spf.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SieveBuild)->Range(1 << 16, 1 << 22)->Complexity();

}  // namespace

BENCHMARK_MAIN();
