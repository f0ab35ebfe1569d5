#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "photonbench/detectors.hpp"
#include "photonbench/errors.hpp"

using namespace photonbench;

namespace {

PhotonStream ns_stream(std::vector<Tick> ns, Tick duration_ns) {
  PhotonStream s;
  s.resolution_ps = 1000;
  s.duration_ticks = duration_ns;
  s.timestamps = std::move(ns);
  return s;
}

SpadConfig ideal() { return {1.0, 0.0, DeadTimeModel::NonParalyzable, 0.0, 0.0}; }

}  // namespace

TEST(DetectSpad, IdealDetectorIsIdentity) {
  const auto s = poisson_stream(1e6, 0.05, 2);
  EXPECT_EQ(detect_spad(s, ideal(), 9), s);
}

TEST(DetectSpad, ThinningPlusDarkRate) {
  const auto s = poisson_stream(1e6, 1.0, 4);
  SpadConfig c = ideal();
  c.efficiency = 0.6;
  c.dark_rate_cps = 1000.0;
  const auto out = detect_spad(s, c, 5);
  const double expected = 0.6 * static_cast<double>(s.size()) + 1000.0;
  EXPECT_NEAR(static_cast<double>(out.size()), expected, 3 * std::sqrt(6.01e5));
  EXPECT_NEAR(out.mean_rate(), 6.01e5, 3 * std::sqrt(6.01e5) + 3 * std::sqrt(1e6) * 0.6);
}

TEST(DetectSpad, NonParalyzableDeadTimeRate) {
  const auto s = poisson_stream(1e6, 1.0, 6);
  SpadConfig c = ideal();
  c.dead_time_ns = 50.0;
  const auto out = detect_spad(s, c, 7);
  const double expected = 1e6 / (1 + 1e6 * 50e-9);
  // The dead-time process is more regular than Poisson; the Poisson band is conservative.
  EXPECT_NEAR(out.mean_rate(), expected, 3 * std::sqrt(expected));
}

TEST(DetectSpad, JitterPreservesCountAndOrder) {
  const auto s = poisson_stream(1e5, 0.1, 3);
  SpadConfig c = ideal();
  c.jitter_fwhm_ns = 0.4;
  const auto out = detect_spad(s, c, 1);
  EXPECT_EQ(out.size(), s.size());
  EXPECT_NO_THROW(out.validate());
  EXPECT_FALSE(out == s);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = static_cast<double>(out.timestamps[i]) - static_cast<double>(s.timestamps[i]);
    sum += d;
    sum2 += d * d;
  }
  const double sigma_ps = 400.0 / 2.3548200450309493;
  const double n = static_cast<double>(s.size());
  EXPECT_NEAR(std::sqrt(sum2 / n), sigma_ps, 0.05 * sigma_ps);
  EXPECT_NEAR(sum / n, 0.0, 3 * sigma_ps / std::sqrt(n));
}

TEST(DetectSpad, DeterministicForSeed) {
  const auto s = poisson_stream(2e5, 0.1, 3);
  const SpadConfig c;
  EXPECT_EQ(detect_spad(s, c, 4), detect_spad(s, c, 4));
  EXPECT_FALSE(detect_spad(s, c, 4) == detect_spad(s, c, 5));
}

TEST(DeadTime, HandTracedExamples) {
  const auto s = ns_stream({0, 30, 60, 120}, 200);
  EXPECT_EQ(apply_dead_time(s, 0.0, DeadTimeModel::NonParalyzable), s);
  EXPECT_EQ(apply_dead_time(s, 50.0, DeadTimeModel::NonParalyzable).timestamps, (std::vector<Tick>{0, 60, 120}));
  EXPECT_EQ(apply_dead_time(s, 50.0, DeadTimeModel::Paralyzable).timestamps, (std::vector<Tick>{0, 120}));
}

TEST(DeadTime, MinimumGapAndIdempotence) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = poisson_stream(5e6, 0.01, seed);
    const auto once = apply_dead_time(s, 22.0, DeadTimeModel::NonParalyzable);
    for (std::size_t i = 1; i < once.size(); ++i) {
      ASSERT_GE(once.timestamps[i] - once.timestamps[i - 1], 22000u);
    }
    EXPECT_EQ(apply_dead_time(once, 22.0, DeadTimeModel::NonParalyzable), once);
    const auto para = apply_dead_time(s, 22.0, DeadTimeModel::Paralyzable);
    EXPECT_LE(para.size(), once.size());
  }
}

TEST(DeadTimeCorrect, ClosedForms) {
  EXPECT_EQ(dead_time_correct(1e6, 0.0, DeadTimeModel::NonParalyzable), 1e6);
  EXPECT_EQ(dead_time_correct(1e6, 0.0, DeadTimeModel::Paralyzable), 1e6);
  EXPECT_NEAR(dead_time_correct(1e6, 50.0, DeadTimeModel::NonParalyzable), 1.0526e6, 50.0);
  EXPECT_NEAR(dead_time_correct(7.2e5, 22.0, DeadTimeModel::NonParalyzable), 7.3158e5, 10.0);
  const double truth = 3e6;
  const double measured = truth * std::exp(-truth * 50e-9);
  EXPECT_NEAR(dead_time_correct(measured, 50.0, DeadTimeModel::Paralyzable), truth, 1e-12 * truth * 10);
}

TEST(DeadTimeCorrect, UnphysicalInputs) {
  EXPECT_THROW(dead_time_correct(2e7, 50.0, DeadTimeModel::NonParalyzable), NumericalError);
  EXPECT_THROW(dead_time_correct(1.0 / (std::exp(1.0) * 50e-9) * 1.01, 50.0, DeadTimeModel::Paralyzable),
               NumericalError);
}

TEST(DeadTimeCorrect, RoundTripRecoversPoissonRate) {
  for (auto model : {DeadTimeModel::NonParalyzable, DeadTimeModel::Paralyzable}) {
    for (double ld : {0.01, 0.05, 0.1}) {
      const double dead_ns = 50.0;
      const double lambda = ld / (dead_ns * 1e-9);
      const auto s = poisson_stream(lambda, 1.0, 100 + static_cast<std::uint64_t>(ld * 1000));
      const auto m = apply_dead_time(s, dead_ns, model);
      const double corrected = dead_time_correct(m.mean_rate(), dead_ns, model);
      EXPECT_NEAR(corrected, lambda, 3 * std::sqrt(lambda)) << to_string(model) << " ld=" << ld;
    }
  }
}

TEST(HbtSplit, PartitionAndBinomialBalance) {
  const auto s = poisson_stream(1e6, 1.0, 2);
  const auto [a, b] = hbt_split(s, 3);
  EXPECT_EQ(a.size() + b.size(), s.size());
  EXPECT_EQ(merge(a, b).timestamps, s.timestamps);
  const double n = static_cast<double>(s.size());
  EXPECT_NEAR(static_cast<double>(a.size()), n / 2, 3 * std::sqrt(n / 4));
  EXPECT_EQ(a.channel_label, std::optional<std::uint8_t>(1));
  EXPECT_EQ(b.channel_label, std::optional<std::uint8_t>(2));
  PhotonStream empty;
  empty.duration_ticks = 10;
  const auto [ea, eb] = hbt_split(empty, 1);
  EXPECT_TRUE(ea.empty());
  EXPECT_TRUE(eb.empty());
}

TEST(ReadAnalog, NoiselessMean) {
  AnalogConfig c;
  c.nep_W_per_rtHz = 0.0;
  const auto v = read_analog(193e-15, c, 3, 1);
  for (double x : v) EXPECT_NEAR(x, 0.11101, 1e-5);
  for (double x : read_analog(0.0, c, 3, 1)) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(read_analog(1e-15, c, 0, 1), ConfigError);
}

TEST(ReadAnalog, NoiseConvention) {
  AnalogConfig c;
  c.integration_time_s = 1.0;
  const double sigma_phi = 0.7e-15 * std::sqrt(0.5);
  EXPECT_NEAR(sigma_phi, 0.495e-15, 0.001e-15);
  EXPECT_NEAR(c.voltage_noise_V(), 2.85e-4, 0.01e-4);
}

TEST(ReadAnalog, SampleMeanConverges) {
  AnalogConfig c;
  const std::size_t n = 10000;
  const auto v = read_analog(193e-15, c, n, 42);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  const double expected = 193e-15 * c.responsivity_A_per_W * c.gain_V_per_A;
  EXPECT_NEAR(mean, expected, 3 * c.voltage_noise_V() / std::sqrt(static_cast<double>(n)));
}

TEST(DetectorConfig, Validation) {
  SpadConfig s;
  s.efficiency = -0.1;
  EXPECT_THROW(s.validate(), ConfigError);
  s = {};
  s.jitter_fwhm_ns = -1;
  EXPECT_THROW(s.validate(), ConfigError);
  AnalogConfig a;
  a.gain_V_per_A = 0;
  EXPECT_THROW(a.validate(), ConfigError);
  EXPECT_EQ(parse_dead_time_model("Paralyzable"), DeadTimeModel::Paralyzable);
  EXPECT_EQ(parse_dead_time_model("non-paralyzable"), DeadTimeModel::NonParalyzable);
  EXPECT_THROW(parse_dead_time_model("sometimes"), ConfigError);
}
