#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "photonbench/calibrate.hpp"
#include "photonbench/errors.hpp"
#include "photonbench/random.hpp"

using namespace photonbench;

namespace {

std::vector<BudgetComponent> reference_rows() {
  return {{"Planck's constant, h", 0.0, EvaluationType::B, true},
          {"Wavelength, lambda", 0.008, EvaluationType::B, false},
          {"Speed of light, c", 0.0, EvaluationType::B, true},
          {"Si-detector spectral responsivity, s_Si", 0.400, EvaluationType::B, false},
          {"Si-detector measurement, V_f", 1.870, EvaluationType::A, false},
          {"Amplification factor, F_Amp", 0.100, EvaluationType::B, false},
          {"Linearity factor of the Si-detector, F_Lin", 0.030, EvaluationType::B, false},
          {"Si-SPAD counts, SPAD_Counts", 0.020, EvaluationType::A, false}};
}

AnalogConfig noiseless() {
  AnalogConfig a;
  a.nep_W_per_rtHz = 0.0;
  return a;
}

CalibrationInput ideal_input(double counts_per_s, double wavelength_nm) {
  CalibrationInput in;
  in.analog = noiseless();
  in.wavelength_nm = wavelength_nm;
  in.spad_counts = {{1.0, static_cast<std::uint64_t>(counts_per_s)}, {1.0, static_cast<std::uint64_t>(counts_per_s)}};
  const double power = flux_to_power(counts_per_s, wavelength_nm);
  const double v = power * in.analog.responsivity_A_per_W * in.analog.gain_V_per_A;
  in.voltages = {v, v, v};
  return in;
}

}  // namespace

TEST(Budget, ReferenceRowsCombined) {
  const auto b = combine_budget(reference_rows());
  EXPECT_NEAR(b.combined_percent, 1.92, 0.005);
  EXPECT_EQ(b.components.size(), 8u);
}

TEST(Budget, SmallExamples) {
  EXPECT_DOUBLE_EQ(combine_budget({{"x", 2.0, EvaluationType::A, false}}).combined_percent, 2.0);
  EXPECT_DOUBLE_EQ(
      combine_budget({{"x", 3.0, EvaluationType::A, false}, {"y", 4.0, EvaluationType::B, false}}).combined_percent,
      5.0);
  EXPECT_THROW(combine_budget({}), ConfigError);
  EXPECT_THROW(combine_budget({{"x", -1.0, EvaluationType::A, false}}), ConfigError);
}

TEST(Budget, PermutationInvariantAndDominatesMax) {
  CounterRng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<BudgetComponent> rows;
    double sum2 = 0.0, max = 0.0;
    for (int i = 0; i < 6; ++i) {
      const double u = 3 * uniform01(rng);
      rows.push_back({"c" + std::to_string(i), u, EvaluationType::B, false});
      sum2 += u * u;
      max = std::max(max, u);
    }
    const double combined = combine_budget(rows).combined_percent;
    EXPECT_NEAR(combined, std::sqrt(sum2), 1e-12 * std::sqrt(sum2));
    EXPECT_GE(combined, max);
    std::reverse(rows.begin(), rows.end());
    EXPECT_NEAR(combine_budget(rows).combined_percent, combined, 1e-12 * combined);
  }
}

TEST(Budget, RenderedLayout) {
  const auto text = render_budget_table(combine_budget(reference_rows()));
  EXPECT_NE(text.find("Si-detector measurement, V_f"), std::string::npos);
  EXPECT_NE(text.find("1.870  A"), std::string::npos);
  EXPECT_NE(text.find("Combined uncertainty, u_c"), std::string::npos);
  EXPECT_NE(text.find("1.92\n"), std::string::npos);
}

TEST(ReferenceFlux, Examples) {
  const AnalogConfig a = noiseless();
  EXPECT_NEAR(reference_flux(0.11101, a, 785.6), 7.63e5, 0.002 * 7.63e5);
  EXPECT_DOUBLE_EQ(reference_flux(0.2, a, 785.6), 2 * reference_flux(0.1, a, 785.6));
  AnalogConfig lin = a;
  lin.linearity_correction = 0.5;
  EXPECT_DOUBLE_EQ(reference_flux(0.1, lin, 785.6), 0.5 * reference_flux(0.1, a, 785.6));
  EXPECT_THROW(reference_flux(0.0, a, 785.6), DataError);
}

TEST(SpadRate, Examples) {
  CalibrationInput in = ideal_input(7.64e5, 785.6);
  EXPECT_DOUBLE_EQ(spad_rate(in), 7.64e5);
  in.spad_counts = {{1.0, 601000}};
  in.spad_dark_cps = 1000.0;
  EXPECT_DOUBLE_EQ(spad_rate(in), 6.0e5);
  in.spad_counts = {{1.0, 720000}};
  in.spad_dark_cps = 0.0;
  in.spad_dead_time_ns = 22.0;
  EXPECT_NEAR(spad_rate(in), 7.3158e5, 10.0);
  in.spad_dark_cps = 1e6;
  EXPECT_THROW(spad_rate(in), NumericalError);
}

TEST(SpadEfficiency, IdealDetectorGivesUnity) {
  const auto r = spad_efficiency(ideal_input(7.64e5, 785.6));
  EXPECT_NEAR(r.eta_spad, 1.0, 1e-10);
  EXPECT_NEAR(r.u_absolute, r.eta_spad * r.u_combined_percent / 100, 1e-15);
}

TEST(SpadEfficiency, MatchesClosedFormModel) {
  CounterRng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    CalibrationInput in;
    in.analog.responsivity_A_per_W = 0.3 + 0.5 * uniform01(rng);
    in.analog.gain_V_per_A = std::pow(10.0, 10 + 3 * uniform01(rng));
    in.analog.linearity_correction = 0.1 * uniform01(rng);
    in.wavelength_nm = 400 + 600 * uniform01(rng);
    const double counts = 1e5 + 1e6 * uniform01(rng);
    in.spad_counts = {{1.0, static_cast<std::uint64_t>(counts)}};
    const double v = 0.01 + uniform01(rng);
    in.voltages = {v};
    in.type_b.source_stability = 0.0;
    const double closed = kPlanck * kSpeedOfLight / (in.wavelength_nm * 1e-9) * in.analog.responsivity_A_per_W *
                          in.analog.gain_V_per_A * std::floor(counts) / (v * (1 - in.analog.linearity_correction));
    if (closed > 1.0) continue;
    const auto r = spad_efficiency(in);
    EXPECT_NEAR(r.eta_spad, closed, 1e-12 * closed);
  }
}

TEST(SpadEfficiency, RatioInvariantUnderCommonScaling) {
  CalibrationInput in = ideal_input(5e5, 785.6);
  in.voltages = {in.voltages[0] * 1.25, in.voltages[0] * 0.8, in.voltages[0]};
  const double eta = spad_efficiency(in).eta_spad;
  for (auto& g : in.spad_counts) g.counts *= 2;
  for (auto& v : in.voltages) v *= 2;
  EXPECT_NEAR(spad_efficiency(in).eta_spad, eta, 1e-12);
}

TEST(SpadEfficiency, UnphysicalEfficiencyRejected) {
  CalibrationInput in = ideal_input(5e5, 785.6);
  for (auto& g : in.spad_counts) g.counts *= 2;
  EXPECT_THROW(spad_efficiency(in), NumericalError);
}

TEST(SpadEfficiency, BudgetRows) {
  CalibrationInput in = ideal_input(5e5, 785.6);
  auto r = spad_efficiency(in);
  const auto has = [&](const std::string& name) {
    return std::any_of(r.budget.components.begin(), r.budget.components.end(),
                       [&](const BudgetComponent& c) { return c.name.find(name) != std::string::npos; });
  };
  EXPECT_TRUE(has("V_f"));
  EXPECT_TRUE(has("SPAD_Counts"));
  EXPECT_TRUE(has("s_Si"));
  EXPECT_FALSE(has("Dead-time"));
  in.type_b.dead_time_model = 0.05;
  r = spad_efficiency(in);
  EXPECT_TRUE(has("ead"));
}

TEST(SpadEfficiency, EmptySeriesRejected) {
  CalibrationInput in = ideal_input(5e5, 785.6);
  in.voltages.clear();
  EXPECT_THROW(spad_efficiency(in), DataError);
  in = ideal_input(5e5, 785.6);
  in.spad_counts.clear();
  EXPECT_THROW(spad_efficiency(in), DataError);
  EXPECT_THROW(efficiency_vs_flux({}), DataError);
}

TEST(Synthetic, RecoveryAt193fW) {
  const CalibrationScenario sc;
  const auto r = spad_efficiency(synthesize_calibration(sc, 2021));
  EXPECT_NEAR(r.eta_spad, 0.603, 2 * r.u_absolute);
  EXPECT_GE(r.u_combined_percent, 1.8);
  EXPECT_LE(r.u_combined_percent, 2.1);
}

TEST(Synthetic, UncertaintyGrowsAsFluxFalls) {
  CalibrationScenario sc;
  sc.gate_s = 0.1;
  const auto high = spad_efficiency(synthesize_calibration(sc, 5));
  sc.optical_power_W /= 2;
  const auto low = spad_efficiency(synthesize_calibration(sc, 5));
  EXPECT_GT(low.u_combined_percent, high.u_combined_percent);
}

TEST(Synthetic, SweepIsConsistentWithConstantTruth) {
  CalibrationScenario sc;
  sc.gate_s = 0.1;
  std::vector<CalibrationInput> series;
  for (double fW : {36.5, 100.0, 193.0, 334.0}) {
    sc.optical_power_W = fW * 1e-15;
    series.push_back(synthesize_calibration(sc, static_cast<std::uint64_t>(fW * 10)));
  }
  const auto results = efficiency_vs_flux(series);
  ASSERT_EQ(results.size(), 4u);
  for (std::size_t i = 0; i < results.size(); ++i) {
    EXPECT_NEAR(results[i].eta_spad, 0.603, 3 * results[i].u_absolute);
    if (i > 0) {
      EXPECT_LT(results[i].u_combined_percent, results[i - 1].u_combined_percent);
    }
  }
}

TEST(Synthetic, EstimatorBiasSmall) {
  CalibrationScenario sc;
  sc.gate_s = 0.1;
  double sum = 0.0, u = 0.0;
  const int runs = 100;
  for (int i = 0; i < runs; ++i) {
    const auto r = spad_efficiency(synthesize_calibration(sc, 500 + i));
    sum += r.eta_spad;
    u += r.u_absolute;
  }
  EXPECT_LT(std::abs(sum / runs - 0.603), 0.3 * u / runs);
}

TEST(Synthetic, Deterministic) {
  const CalibrationScenario sc;
  const auto a = synthesize_calibration(sc, 3);
  const auto b = synthesize_calibration(sc, 3);
  EXPECT_EQ(a.voltages, b.voltages);
  ASSERT_EQ(a.spad_counts.size(), b.spad_counts.size());
  for (std::size_t i = 0; i < a.spad_counts.size(); ++i) EXPECT_EQ(a.spad_counts[i].counts, b.spad_counts[i].counts);
}
