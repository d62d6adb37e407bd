#include <benchmark/benchmark.h>

#include <cmath>

#include "fkdv/spectral.hpp"

using namespace fkdv;

namespace {

SpectralField bump(std::size_t n) {
    return SpectralField::from_function(Grid(n, 200.0), [](double x) { return std::exp(-x * x / 4.0); });
}

void BM_RoundTrip(benchmark::State& state) {
    const auto u = bump(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto c = u.coefficients();
        benchmark::DoNotOptimize(SpectralField::from_coefficients(u.grid(), c));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RoundTrip)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_Riesz(benchmark::State& state) {
    const auto u = bump(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(riesz_apply(u, 1.5));
}
BENCHMARK(BM_Riesz)->RangeMultiplier(4)->Range(1 << 10, 1 << 16);

void BM_Sobolev(benchmark::State& state) {
    const auto u = bump(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(sobolev_norm(u, 0.5));
}
BENCHMARK(BM_Sobolev)->Arg(4096)->Arg(16384);

}  // namespace
