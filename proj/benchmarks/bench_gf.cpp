#include <benchmark/benchmark.h>

#include "ffrank/gf.hpp"

namespace {

void BM_FieldConstruction(benchmark::State& state) {
    const auto q = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) {
        ffrank::Field f(q);
        benchmark::DoNotOptimize(f.q());
    }
}
BENCHMARK(BM_FieldConstruction)->Arg(16)->Arg(256)->Arg(4096)->Arg(65536);

void BM_MulTableLookup(benchmark::State& state) {
    const ffrank::Field f(static_cast<std::uint32_t>(state.range(0)));
    ffrank::Rng rng(1);
    std::vector<ffrank::FieldElement> xs(1024);
    for (auto& x : xs) x = f.uniform_nonzero(rng);
    std::size_t i = 0;
    for (auto _ : state) {
        const auto a = xs[i & 1023];
        const auto b = xs[(i + 7) & 1023];
        benchmark::DoNotOptimize(f.mul(a, b));
        ++i;
    }
}
BENCHMARK(BM_MulTableLookup)->Arg(4)->Arg(9)->Arg(256)->Arg(65536);

} // namespace

BENCHMARK_MAIN();
