#include <benchmark/benchmark.h>

#include "fpflow/diagnostics.hpp"
#include "fpflow/equilibrium.hpp"
#include "fpflow/solver.hpp"

namespace {

using namespace fpflow;

ParameterSet preset_params(int dim, int n) {
  return make_parameter_set("phi:standard", "D:multi", "pi:standard", PresetContext{dim, n});
}

void BM_Flux(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto grid = build_grid(dim, n, Boundary::Periodic);
  const auto params = preset_params(dim, n);
  const auto f = preset_gaussian_ic(dim, 0.1).build(grid);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_flux(f, params, 0.5));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_Flux)->Args({1, 200})->Args({2, 80})->Args({3, 20});

// One implicit step from the Gaussian, the hardest step of a preset run.
void BM_FirstStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const auto grid = build_grid(dim, n, Boundary::Periodic);
  const auto params = preset_params(dim, n);
  const auto f0 = preset_gaussian_ic(dim).build(grid);
  const SolverConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(backward_euler_step(f0, params, 0.1, 0.1, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(grid.size()));
}
BENCHMARK(BM_FirstStep)->Args({1, 200})->Args({2, 40})->Args({2, 80})->Unit(benchmark::kMillisecond);

void BM_Dissipation(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto grid = build_grid(2, n, Boundary::NoFlux);
  const auto params = preset_params(2, n);
  const auto f = preset_gaussian_ic(2, 0.1).build(grid);
  for (auto _ : state) benchmark::DoNotOptimize(dissipation(f, params, 0.5));
}
BENCHMARK(BM_Dissipation)->Arg(40)->Arg(80);

}  // namespace

BENCHMARK_MAIN();
