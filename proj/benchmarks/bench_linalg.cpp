#include <benchmark/benchmark.h>

#include "ffrank/ensemble.hpp"
#include "ffrank/linalg.hpp"

namespace {

ffrank::Instance regular_instance(std::uint32_t q, std::size_t n, std::uint64_t seed) {
    ffrank::EnsembleSpec ens =
        ffrank::parse_ensemble("q=" + std::to_string(q) + ";d=point:3;k=point:3");
    ens.n = n;
    return ffrank::sample_instance(ens, {seed});
}

void BM_RankGf2Packed(benchmark::State& state) {
    const auto inst = regular_instance(2, static_cast<std::size_t>(state.range(0)), 11);
    for (auto _ : state) benchmark::DoNotOptimize(ffrank::rank(inst.matrix));
}
BENCHMARK(BM_RankGf2Packed)->Arg(300)->Arg(999)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_RankGenericSparse(benchmark::State& state) {
    const auto inst = regular_instance(3, static_cast<std::size_t>(state.range(0)), 12);
    for (auto _ : state) benchmark::DoNotOptimize(ffrank::rank(inst.matrix));
}
BENCHMARK(BM_RankGenericSparse)->Arg(60)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_KernelBasisGf2(benchmark::State& state) {
    const auto inst = regular_instance(2, static_cast<std::size_t>(state.range(0)), 13);
    for (auto _ : state) benchmark::DoNotOptimize(ffrank::kernel_basis(inst.matrix).nullity());
}
BENCHMARK(BM_KernelBasisGf2)->Arg(300)->Arg(999)->Unit(benchmark::kMillisecond);

} // namespace
