// Serial reference sweep vs the OpenMP sweep at several thread counts.

#include <benchmark/benchmark.h>

#include "banditq/presets.hpp"
#include "banditq/sweep.hpp"

using namespace banditq;

namespace {

SweepSpec bench_spec() {
  SweepSpec spec = find_sweep_preset("scaling-sqrt-t")->spec;
  spec.horizons = {1024, 4096, 16384};
  spec.repetitions = 4;
  spec.policies = {PolicyKind::BanditQ, PolicyKind::Hedge};
  return spec;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto spec = bench_spec();
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep_serial(spec));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SweepParallel(benchmark::State& state) {
  const auto spec = bench_spec();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec, threads));
}
BENCHMARK(BM_SweepParallel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
