#include <benchmark/benchmark.h>

#include "patchdyn/nullclines.hpp"
#include "patchdyn/sweep.hpp"

using namespace patchdyn;

namespace {

GridSpec square(long n) {
  return GridSpec{Axis{"x0", 0.0, 1.5, n, {}}, Axis{"y0", 0.0, 1.5, n, {}}};
}

void BM_BasinGrid(benchmark::State& state) {
  const CoupledParams cp(LocalParams(0.87, 1.0, 0.2), 0.01);
  const long n = state.range(0);
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    const ClassifiedGrid g = basin_grid(cp, square(n), 600, {}, workers);
    benchmark::DoNotOptimize(g.cells.data());
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_BasinGrid)->Args({64, 1})->Args({64, 0})->Unit(benchmark::kMillisecond);

void BM_ExtinctionGrid(benchmark::State& state) {
  const CoupledParams cp(LocalParams(0.89, 1.0, 0.2), 0.186);
  for (auto _ : state) {
    const ClassifiedGrid g = extinction_time_grid(cp, square(64), 2000, 1e-4, 0);
    benchmark::DoNotOptimize(g.cells.data());
  }
}
BENCHMARK(BM_ExtinctionGrid)->Unit(benchmark::kMillisecond);

void BM_Nullclines(benchmark::State& state) {
  const CoupledParams cp(LocalParams(0.89, 1.0, 0.2), 0.186);
  for (auto _ : state) {
    const NullclineSet set = nullclines(cp, 2, square(2), 200);
    benchmark::DoNotOptimize(set.x_family.curves.size());
  }
}
BENCHMARK(BM_Nullclines)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
