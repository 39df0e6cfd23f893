#include <benchmark/benchmark.h>

#include "grpavg/averaging.hpp"
#include "grpavg/dynamics.hpp"
#include "grpavg/models.hpp"
#include "grpavg/spectral.hpp"

using namespace grpavg;

namespace {

void BM_SpectralReport(benchmark::State& state) {
  const NamedModel m = named_model("dhn", {.n = static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(spectral_report(m.kernel, m.pi));
}
BENCHMARK(BM_SpectralReport)->Arg(8)->Arg(32)->Arg(128);

void BM_MixingTime(benchmark::State& state) {
  const NamedModel m = named_model("dhn-right-averaged", {.n = static_cast<int>(state.range(0))});
  for (auto _ : state) benchmark::DoNotOptimize(mixing_time(m.kernel, m.pi, Norm::L1, 0.125, 1000000));
}
BENCHMARK(BM_MixingTime)->Arg(16)->Arg(64);

void BM_Cheeger(benchmark::State& state) {
  const NamedModel m = named_model("srw-cycle", {.n = static_cast<int>(state.range(0)), .lazy = true});
  for (auto _ : state) benchmark::DoNotOptimize(cheeger(m.kernel, m.pi));
}
BENCHMARK(BM_Cheeger)->Arg(10)->Arg(16)->Arg(20);

void BM_OrbitAverage(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const NamedModel m = named_model("srw-cycle", {.n = n, .lazy = true});
  const FiniteGroup g = close_generators(named_group("shift", {.n = n}));
  for (auto _ : state) benchmark::DoNotOptimize(special_average(m.kernel, g, AverageKind::orbit, m.pi));
}
BENCHMARK(BM_OrbitAverage)->Arg(16)->Arg(64);

void BM_StateDependentQ(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const NamedModel m = named_model("vshape-perturbed", {.n = n, .beta = 1.0, .delta = 0.3});
  const FiniteGroup g = close_generators(named_group("flip", {.n = n}));
  for (auto _ : state) benchmark::DoNotOptimize(sd_average(m.kernel, g, m.pi, Side::both));
}
BENCHMARK(BM_StateDependentQ)->Arg(8)->Arg(32);

} // namespace

BENCHMARK_MAIN();
