#include <benchmark/benchmark.h>

#include "photonbench/correlate.hpp"
#include "photonbench/stream.hpp"

using namespace photonbench;

namespace {

// Two independent Poisson arms at the given per-arm rate, 1 s long.
struct Arms {
  PhotonStream a, b;
  explicit Arms(double rate) : a(poisson_stream(rate, 1.0, 11)), b(poisson_stream(rate, 1.0, 12)) {}
};

void BM_FullCorrelation(benchmark::State& state) {
  const Arms arms(static_cast<double>(state.range(0)));
  const CorrelateOptions opt{std::size_t{1} << 16, 1};
  for (auto _ : state) benchmark::DoNotOptimize(full_correlation(arms.a, arms.b, 0.1, -500, 500, opt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(arms.a.size() + arms.b.size()));
}
BENCHMARK(BM_FullCorrelation)->Arg(100'000)->Arg(500'000)->Arg(2'000'000)->Unit(benchmark::kMillisecond);

void BM_StartStop(benchmark::State& state) {
  const Arms arms(static_cast<double>(state.range(0)));
  const CorrelateOptions opt{std::size_t{1} << 16, 1};
  for (auto _ : state) benchmark::DoNotOptimize(start_stop_histogram(arms.a, arms.b, 0.25, -500, 500, opt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(arms.a.size() + arms.b.size()));
}
BENCHMARK(BM_StartStop)->Arg(100'000)->Arg(500'000)->Arg(2'000'000)->Unit(benchmark::kMillisecond);

}  // namespace
