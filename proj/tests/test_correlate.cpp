#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "photonbench/correlate.hpp"
#include "photonbench/detectors.hpp"
#include "photonbench/errors.hpp"
#include "photonbench/fit.hpp"

using namespace photonbench;

namespace {

PhotonStream ns_stream(std::vector<Tick> ns, Tick duration_ns = 1000) {
  PhotonStream s;
  s.resolution_ps = 1000;
  s.duration_ticks = duration_ns;
  s.timestamps = std::move(ns);
  return s;
}

PhotonStream shifted(const PhotonStream& s, Tick by) {
  PhotonStream out = s;
  out.duration_ticks += by;
  for (auto& t : out.timestamps) t += by;
  return out;
}

}  // namespace

TEST(StartStop, HandTraced) {
  const auto h = start_stop_histogram(ns_stream({0, 100}), ns_stream({10, 130}), 10, 0, 50);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{0, 1, 0, 1, 0}));
  EXPECT_EQ(h.n_starts, 2u);
  EXPECT_EQ(h.mode, HistogramMode::StartStop);
}

TEST(StartStop, OnlyFirstStopCounts) {
  const auto h = start_stop_histogram(ns_stream({0}), ns_stream({5, 15, 25}), 10, 0, 30);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 0, 0}));
}

TEST(StartStop, NegativeSideUsesLatestPrecedingStop) {
  const auto h = start_stop_histogram(ns_stream({50}), ns_stream({20, 35, 47, 52, 60}), 1, -20, 20);
  std::vector<std::uint64_t> expected(40, 0);
  expected[17] = 1;  // 47 - 50 = -3
  expected[22] = 1;  // 52 - 50 = 2
  EXPECT_EQ(h.counts, expected);
}

TEST(StartStop, EmptyStopGivesZeros) {
  const auto h = start_stop_histogram(ns_stream({1, 2, 3}), ns_stream({}), 1, -5, 5);
  EXPECT_EQ(h.total(), 0u);
  EXPECT_EQ(h.bin_count(), 10u);
}

TEST(StartStop, AtMostOneStopPerSidePerStart) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto a = oracle::random_stream(300, 100000, seed);
    const auto b = oracle::random_stream(800, 100000, seed + 1000);
    const auto one_sided = start_stop_histogram(a, b, 0.01, 0, 5);
    EXPECT_LE(one_sided.total(), a.size());
    const auto two_sided = start_stop_histogram(a, b, 0.01, -5, 5);
    EXPECT_LE(two_sided.total(), 2 * a.size());
  }
}

TEST(StartStop, PoissonDecayMatchesRate) {
  const double rate = 2e6;
  const auto a = poisson_stream(rate, 1.0, 1);
  const auto b = poisson_stream(rate, 1.0, 2);
  const auto h = start_stop_histogram(a, b, 10, 0, 2000);
  const auto f = fit_exponential(h);
  ASSERT_TRUE(f.converged);
  EXPECT_NEAR(f.rate, b.mean_rate(), 3 * f.rate_err);
}

TEST(Full, HandTraced) {
  const auto h = full_correlation(ns_stream({0}), ns_stream({5, 15}), 10, 0, 20);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 1}));
  EXPECT_EQ(h.mode, HistogramMode::Full);
}

TEST(Full, HalfOpenEdges) {
  const auto h = full_correlation(ns_stream({0}), ns_stream({0, 10, 20}), 10, 0, 20);
  EXPECT_EQ(h.counts, (std::vector<std::uint64_t>{1, 1}));
}

TEST(Full, MatchesBruteForce) {
  CounterRng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 1000, m = 1 + rng() % 1000;
    const Tick duration = 1000 + rng() % 2'000'000;
    const auto a = oracle::random_stream(n, duration, rng());
    const auto b = oracle::random_stream(m, duration, rng());
    const double w = 0.001 * static_cast<double>(1 + rng() % 50);
    const double lo = -w * static_cast<double>(rng() % 200);
    const double hi = lo + w * static_cast<double>(1 + rng() % 400);
    const auto h = full_correlation(a, b, w, lo, hi);
    ASSERT_EQ(h.counts, oracle::brute_force_pairs(a, b, w, lo, hi, false)) << "trial " << trial;
  }
}

TEST(Full, SelfCorrelationExcludesZeroLagAndIsSymmetric) {
  const auto s = oracle::random_stream(800, 200000, 3);
  const auto h = full_correlation(s, s, 0.5, -50, 50);
  EXPECT_EQ(h.counts, oracle::brute_force_pairs(s, s, 0.5, -50, 50, true));
  // One-tick bins over [-L, L] make bin k and bin n-1-k hold delays d and -d.
  const auto mirrored = full_correlation(s, s, 0.001, -50, 50.001);
  const std::size_t n = mirrored.bin_count();
  for (std::size_t k = 0; k < n; ++k) ASSERT_EQ(mirrored.counts[k], mirrored.counts[n - 1 - k]);
}

TEST(Full, ChunkingIsBitwiseIdentical) {
  const auto a = poisson_stream(2e6, 0.05, 1);
  const auto b = poisson_stream(2e6, 0.05, 2);
  CorrelateOptions seq;
  seq.chunk_events = 0;
  seq.threads = 1;
  const auto ref = full_correlation(a, b, 0.1, -100, 100, seq);
  const auto ref_ss = start_stop_histogram(a, b, 0.1, -100, 100, seq);
  for (std::size_t chunk : {1ul, 7ul, 1000ul, 65536ul}) {
    for (unsigned threads : {1u, 3u}) {
      CorrelateOptions o{chunk, threads};
      EXPECT_EQ(full_correlation(a, b, 0.1, -100, 100, o).counts, ref.counts);
      EXPECT_EQ(start_stop_histogram(a, b, 0.1, -100, 100, o).counts, ref_ss.counts);
    }
  }
}

TEST(Correlators, TimeShiftInvariance) {
  const auto a = oracle::random_stream(2000, 500000, 4);
  const auto b = oracle::random_stream(2000, 500000, 5);
  for (Tick shift : {Tick{1}, Tick{12345}, Tick{1} << 40}) {
    EXPECT_EQ(full_correlation(a, b, 0.01, -5, 5).counts,
              full_correlation(shifted(a, shift), shifted(b, shift), 0.01, -5, 5).counts);
    EXPECT_EQ(start_stop_histogram(a, b, 0.01, -5, 5).counts,
              start_stop_histogram(shifted(a, shift), shifted(b, shift), 0.01, -5, 5).counts);
  }
}

TEST(Correlators, InvalidGeometry) {
  const auto a = ns_stream({1});
  auto b = ns_stream({2});
  EXPECT_THROW(full_correlation(a, b, 1, 5, 5), ConfigError);
  EXPECT_THROW(full_correlation(a, b, 0, 0, 5), ConfigError);
  EXPECT_THROW(full_correlation(a, b, 2, 0, 5), ConfigError);
  b.resolution_ps = 1;
  EXPECT_THROW(full_correlation(a, b, 1, 0, 5), DataError);
  EXPECT_THROW(start_stop_histogram(a, b, 1, 0, 5), DataError);
}

TEST(NormalizeG2, PoissonArmsAreFlat) {
  const auto a = poisson_stream(1e6, 1.0, 11);
  const auto b = poisson_stream(1e6, 1.0, 12);
  const auto h = full_correlation(a, b, 1.0, -500, 500);
  const double expected_per_bin = a.mean_rate() * b.mean_rate() * 1e-9 * 1.0;
  std::size_t within = 0;
  std::size_t flat = 0;
  const auto g = normalize_g2(h);
  ASSERT_EQ(g.size(), h.bin_count());
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (std::abs(g[k].g2 - 1.0) < 3 * g[k].stderr_g2) ++within;
    if (std::abs(static_cast<double>(h.counts[k]) - expected_per_bin) < 3 * std::sqrt(expected_per_bin)) ++flat;
  }
  EXPECT_GE(within, static_cast<std::size_t>(0.99 * static_cast<double>(g.size())));
  EXPECT_GE(flat, static_cast<std::size_t>(0.99 * static_cast<double>(g.size())));
}

TEST(NormalizeG2, FormulaAndZeroBins) {
  Histogram h;
  h.mode = HistogramMode::Full;
  h.bin_width_ns = 2;
  h.t_min_ns = 0;
  h.t_max_ns = 4;
  h.counts = {0, 16};
  h.n_starts = 1000;
  h.n_stops = 2000;
  h.acquisition_duration_s = 0.5;
  const auto g = normalize_g2(h);
  EXPECT_EQ(g[0].g2, 0.0);
  const double norm = 0.5 / (1000.0 * 2000.0 * 2e-9);
  EXPECT_DOUBLE_EQ(g[1].g2, 16 * norm);
  EXPECT_DOUBLE_EQ(g[1].stderr_g2, 4 * norm);
  EXPECT_DOUBLE_EQ(g[1].t_ns, 3.0);
  h.mode = HistogramMode::StartStop;
  EXPECT_THROW(normalize_g2(h), DataError);
}

TEST(NormalizeG2, IdealEmitterDip) {
  EmitterParams p;
  p.isc_yield = 0.0;
  p.pump = CwPump{0.25, 1.0};
  p.collection_efficiency = 0.011;
  const auto s = simulate_emission(p, 2.0, 5);
  const auto [a, b] = hbt_split(s, 6);
  // Bin 100 is [-0.25, 0.25).
  const auto h = full_correlation(a, b, 0.5, -50.25, 49.75);
  const auto g = normalize_g2(h);
  const auto& zero = g[100];
  EXPECT_NEAR(zero.t_ns, 0.0, 1e-12);
  EXPECT_LT(zero.g2, 0.1);
  EXPECT_GT(g[0].g2, 0.9);
}
