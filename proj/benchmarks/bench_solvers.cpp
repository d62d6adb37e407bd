#include <benchmark/benchmark.h>

#include "fkdv/evolution.hpp"
#include "fkdv/ground_state.hpp"
#include "fkdv/linearized.hpp"
#include "fkdv/modulation.hpp"

using namespace fkdv;

namespace {

void BM_GroundState(benchmark::State& state) {
    const double alpha = static_cast<double>(state.range(0)) / 10.0;
    const Grid g(static_cast<std::size_t>(state.range(1)), 400.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_ground_state(alpha, 1.0, g));
}
BENCHMARK(BM_GroundState)->Args({10, 4096})->Args({15, 4096})->Args({10, 16384})->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state) {
    const Grid g(static_cast<std::size_t>(state.range(0)), 100.0);
    const SolitonEnsemble ens(2.0, {1.0, 2.0}, g);
    auto u = assemble_R(ens, {-20.0, 20.0});
    EvolutionConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1e-3;
    cfg.adaptive = false;
    for (auto _ : state) u = step(u, cfg);
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Step)->Arg(1024)->Arg(2048)->Arg(4096);

void BM_Modulate(benchmark::State& state) {
    const Grid g(4096, 400.0);
    const SolitonEnsemble ens(1.5, {1.0, 2.0}, g);
    const auto u = assemble_R(ens, {-50.0, 50.0});
    for (auto _ : state) benchmark::DoNotOptimize(modulate(u, ens, {-49.5, 50.5}));
}
BENCHMARK(BM_Modulate);

void BM_Coercivity(benchmark::State& state) {
    const auto q = solve_ground_state(1.5, 1.0, Grid(static_cast<std::size_t>(state.range(0)), 200.0));
    for (auto _ : state) benchmark::DoNotOptimize(coercivity_constant(q));
}
BENCHMARK(BM_Coercivity)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace
