#include <benchmark/benchmark.h>

#include "patchdyn/attractor.hpp"
#include "patchdyn/coupled_map.hpp"

using namespace patchdyn;

namespace {

const LocalParams kLocal{0.63, 1.0, 0.2};

void BM_Step(benchmark::State& state) {
  const CoupledParams cp(kLocal, 0.01);
  PatchState s{0.38, 0.58};
  for (auto _ : state) {
    s = step(cp, s);
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_Step);

void BM_Iterate2000(benchmark::State& state) {
  const CoupledParams cp(kLocal, 0.01);
  for (auto _ : state) {
    const OrbitSegment seg = iterate(cp, {0.38, 0.58}, 2000, 2000);
    benchmark::DoNotOptimize(seg.states.back());
  }
}
BENCHMARK(BM_Iterate2000);

void BM_DetectAttractor(benchmark::State& state) {
  const CoupledParams cp(kLocal, 0.01);
  for (auto _ : state) {
    const AttractorRecord rec = detect_attractor(cp, {0.38, 0.58});
    benchmark::DoNotOptimize(rec.period);
  }
}
BENCHMARK(BM_DetectAttractor);

void BM_TimeToExtinction(benchmark::State& state) {
  const CoupledParams cp(LocalParams(0.89, 1.0, 0.2), 0.186);
  for (auto _ : state) {
    auto t = time_to_extinction(cp, {0.7, 0.9}, 2000);
    benchmark::DoNotOptimize(t);
  }
}
BENCHMARK(BM_TimeToExtinction);

}  // namespace
