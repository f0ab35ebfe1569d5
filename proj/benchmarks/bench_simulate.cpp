#include <benchmark/benchmark.h>

#include "photonbench/detectors.hpp"
#include "photonbench/presets.hpp"
#include "photonbench/stream.hpp"

using namespace photonbench;

namespace {

void BM_SimulateEmission(benchmark::State& state) {
  const Preset& p = find_preset("T3K_30uW");
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_emission(p.emitter, 0.1, seed++));
}
BENCHMARK(BM_SimulateEmission)->Unit(benchmark::kMillisecond);

void BM_DetectSpad(benchmark::State& state) {
  const Preset& p = find_preset("T3K_30uW");
  const PhotonStream light = simulate_emission(p.emitter, 0.1, 3);
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(detect_spad(light, p.hbt_spad, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(light.size()));
}
BENCHMARK(BM_DetectSpad)->Unit(benchmark::kMillisecond);

void BM_PoissonStream(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(poisson_stream(1e6, 0.1, seed++));
}
BENCHMARK(BM_PoissonStream)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
