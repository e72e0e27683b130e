#include <benchmark/benchmark.h>

#include "ffrank/analytic.hpp"
#include "ffrank/coreops.hpp"
#include "ffrank/ensemble.hpp"

namespace {

void BM_SampleInstance(benchmark::State& state) {
    ffrank::EnsembleSpec ens =
        ffrank::parse_ensemble("q=2;d=tpoisson:ell=1,lambda=3.0;k=point:3");
    ens.n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(ffrank::sample_instance(ens, {seed++}).graph.edges.size());
}
BENCHMARK(BM_SampleInstance)->Arg(999)->Arg(9999)->Unit(benchmark::kMillisecond);

void BM_Peel(benchmark::State& state) {
    ffrank::EnsembleSpec ens =
        ffrank::parse_ensemble("q=2;d=tpoisson:ell=1,lambda=3.5;k=point:3");
    ens.n = static_cast<std::size_t>(state.range(0));
    const auto inst = ffrank::sample_instance(ens, {3});
    for (auto _ : state) benchmark::DoNotOptimize(ffrank::peel(inst.graph).n_star);
}
BENCHMARK(BM_Peel)->Arg(999)->Arg(9999)->Arg(99999)->Unit(benchmark::kMillisecond);

void BM_MaxPhi(benchmark::State& state) {
    const ffrank::EnsembleSpec ens =
        ffrank::parse_ensemble("q=2;d=explicit:3=0.8,15=0.2;k=explicit:3=0.8,15=0.2");
    for (auto _ : state) benchmark::DoNotOptimize(ffrank::max_phi(ens).value);
}
BENCHMARK(BM_MaxPhi)->Unit(benchmark::kMillisecond);

void BM_BetheEstimator(benchmark::State& state) {
    const ffrank::EnsembleSpec ens = ffrank::parse_ensemble("q=2;d=point:3;k=point:3");
    for (auto _ : state)
        benchmark::DoNotOptimize(
            ffrank::bethe_at_alpha(ens, 0.5, static_cast<std::size_t>(state.range(0)), 1).value);
}
BENCHMARK(BM_BetheEstimator)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

} // namespace
