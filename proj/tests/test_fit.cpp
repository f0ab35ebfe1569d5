#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "photonbench/errors.hpp"
#include "photonbench/fit.hpp"

using namespace photonbench;

namespace {

Histogram eq2_histogram(const G2Params& p, double amplitude, double bin_ns, double half_range_ns,
                        std::optional<std::uint64_t> noise_seed) {
  Histogram h;
  h.mode = HistogramMode::StartStop;
  h.bin_width_ns = bin_ns;
  h.t_min_ns = -half_range_ns;
  h.t_max_ns = half_range_ns;
  h.counts.resize(static_cast<std::size_t>(std::llround(2 * half_range_ns / bin_ns)));
  h.n_starts = 1;
  h.n_stops = 1;
  h.acquisition_duration_s = 1;
  CounterRng rng(noise_seed.value_or(0));
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double mu = amplitude * g2_model(h.bin_center_ns(k), p);
    h.counts[k] = noise_seed ? oracle::poisson_variate(rng, mu) : static_cast<std::uint64_t>(std::llround(mu));
  }
  return h;
}

std::vector<SaturationPoint> saturation_points(double r_inf, double p_sat, std::optional<Quench> q, double noise,
                                               std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<SaturationPoint> pts;
  for (int i = 0; i < 10; ++i) {
    const double p = std::pow(10.0, 2.0 * i / 9.0);
    const double r = saturation_rate(p, r_inf, p_sat, q);
    const double sd = noise > 0 ? noise * r : 1e-3 * r;
    pts.push_back({p, r + noise * r * standard_normal(rng), sd});
  }
  return pts;
}

}  // namespace

TEST(FitG2, RecoversParametersFromPoissonData) {
  const G2Params truth{0.92, 2.0, 3.5e5};
  const auto h = eq2_histogram(truth, 400.0, 0.25, 500, 7);
  const auto r = fit_g2(h);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.params.b, truth.b, 3 * r.b_err);
  EXPECT_NEAR(r.params.t1_ns, truth.t1_ns, 3 * r.t1_err);
  EXPECT_NEAR(r.params.rate_r, truth.rate_r, 3 * r.rate_err);
  EXPECT_NEAR(r.g2_zero, 1 - r.params.b, 1e-15);
  EXPECT_EQ(r.g2_zero_err, r.b_err);
  EXPECT_TRUE(std::isfinite(r.reduced_chi2));
}

TEST(FitG2, NoiselessExactRecovery) {
  const G2Params truth{0.92, 2.0, 3.5e5};
  const auto h = eq2_histogram(truth, 1e13, 0.25, 500, std::nullopt);
  const auto r = fit_g2(h);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.params.b, truth.b, 1e-8 * truth.b);
  EXPECT_NEAR(r.params.t1_ns, truth.t1_ns, 1e-8 * truth.t1_ns);
  EXPECT_NEAR(r.params.rate_r, truth.rate_r, 1e-8 * truth.rate_r);
  EXPECT_NEAR(r.amplitude, 1e13, 1e-8 * 1e13);
}

TEST(FitG2, ScaleInvariance) {
  const auto h = eq2_histogram({0.85, 1.7, 6e5}, 150.0, 0.25, 300, 3);
  auto scaled = h;
  for (auto& c : scaled.counts) c *= 7;
  const auto a = fit_g2(h);
  const auto b = fit_g2(scaled);
  EXPECT_NEAR(b.params.b, a.params.b, 1e-8 * a.params.b);
  EXPECT_NEAR(b.params.t1_ns, a.params.t1_ns, 1e-8 * a.params.t1_ns);
  EXPECT_NEAR(b.params.rate_r, a.params.rate_r, 1e-8 * a.params.rate_r);
  EXPECT_NEAR(b.amplitude, 7 * a.amplitude, 1e-8 * 7 * a.amplitude);
}

TEST(FitG2, Deterministic) {
  const auto h = eq2_histogram({0.9, 2.0, 4e5}, 200.0, 0.25, 200, 5);
  const auto a = fit_g2(h);
  const auto b = fit_g2(h);
  EXPECT_EQ(a.params.b, b.params.b);
  EXPECT_EQ(a.params.t1_ns, b.params.t1_ns);
  EXPECT_EQ(a.params.rate_r, b.params.rate_r);
  EXPECT_EQ(a.n_iterations, b.n_iterations);
}

TEST(FitG2, ReducedChiSquareCalibrated) {
  int in_band = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto r = fit_g2(eq2_histogram({0.92, 2.0, 3.5e5}, 200.0, 0.25, 200, 100 + seed));
    if (r.converged && r.reduced_chi2 >= 0.7 && r.reduced_chi2 <= 1.3) ++in_band;
  }
  EXPECT_GE(in_band, 95);
}

TEST(FitG2, CovarianceIsSymmetricPositive) {
  const auto r = fit_g2(eq2_histogram({0.92, 2.0, 3.5e5}, 300.0, 0.25, 300, 9));
  for (int i = 0; i < 4; ++i) {
    EXPECT_GT(r.covariance[i][i], 0.0);
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(r.covariance[i][j], r.covariance[j][i], 1e-12 * std::abs(r.covariance[i][j]) + 1e-300);
  }
  EXPECT_NEAR(std::sqrt(r.covariance[1][1]), r.b_err, 1e-12 * r.b_err);
}

TEST(FitG2, RejectsDegenerateInput) {
  Histogram flat = eq2_histogram({0.0, 2.0, 0.0}, 50.0, 1.0, 50, std::nullopt);
  EXPECT_THROW(fit_g2(flat), DataError);
  Histogram sparse = eq2_histogram({0.9, 2.0, 0.0}, 10.0, 1.0, 50, std::nullopt);
  for (std::size_t k = 10; k < sparse.counts.size(); ++k) sparse.counts[k] = 0;
  EXPECT_THROW(fit_g2(sparse), DataError);
}

TEST(LeastSquares, WeightedLineMatchesNormalEquations) {
  LeastSquaresProblem pb;
  CounterRng rng(2);
  for (int i = 0; i < 30; ++i) {
    pb.x.push_back(i);
    pb.y.push_back(1.5 + 0.3 * i + 0.2 * standard_normal(rng));
    pb.weight.push_back(1.0 / (0.04 * (1 + i % 3)));
  }
  pb.model = [](double x, const std::vector<double>& p, double* g) {
    if (g) {
      g[0] = 1.0;
      g[1] = x;
    }
    return p[0] + p[1] * x;
  };
  pb.lower = {-1e9, -1e9};
  pb.upper = {1e9, 1e9};
  const auto r = least_squares(pb, {0.0, 0.0});
  ASSERT_TRUE(r.converged);
  double s = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (std::size_t i = 0; i < pb.x.size(); ++i) {
    const double w = pb.weight[i];
    s += w;
    sx += w * pb.x[i];
    sxx += w * pb.x[i] * pb.x[i];
    sy += w * pb.y[i];
    sxy += w * pb.x[i] * pb.y[i];
  }
  const double det = s * sxx - sx * sx;
  EXPECT_NEAR(r.params[0], (sxx * sy - sx * sxy) / det, 1e-9);
  EXPECT_NEAR(r.params[1], (s * sxy - sx * sy) / det, 1e-9);
  EXPECT_NEAR(r.covariance[0], sxx / det, 1e-9 * sxx / det);
  EXPECT_NEAR(r.covariance[3], s / det, 1e-9 * s / det);
  EXPECT_NEAR(r.covariance[1], -sx / det, 1e-9 * sx / det);
}

TEST(LeastSquares, IterationCapReportsNonConvergence) {
  LeastSquaresProblem pb;
  for (int i = 0; i < 20; ++i) {
    pb.x.push_back(0.1 * i);
    pb.y.push_back(5 * std::exp(-3.0 * 0.1 * i));
    pb.weight.push_back(1.0);
  }
  pb.model = [](double x, const std::vector<double>& p, double* g) {
    const double e = std::exp(-p[1] * x);
    if (g) {
      g[0] = e;
      g[1] = -p[0] * x * e;
    }
    return p[0] * e;
  };
  pb.lower = {0, 0};
  pb.upper = {1e9, 1e9};
  LeastSquaresOptions o;
  o.max_iterations = 1;
  EXPECT_FALSE(least_squares(pb, {1.0, 0.1}, o).converged);
  const auto full = least_squares(pb, {1.0, 0.1});
  EXPECT_TRUE(full.converged);
  EXPECT_NEAR(full.params[1], 3.0, 1e-8);
}

TEST(FitSaturation, NoiselessExactRecovery) {
  const auto r = fit_saturation(saturation_points(2.8e6, 30.0, std::nullopt, 0.0, 1), false);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.r_inf, 2.8e6, 1e-8 * 2.8e6);
  EXPECT_NEAR(r.p_sat_uW, 30.0, 1e-8 * 30.0);
}

TEST(FitSaturation, NoisyRecoveryWithinThreeSigma) {
  const auto r = fit_saturation(saturation_points(2.8e6, 30.0, std::nullopt, 0.01, 4), false);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.r_inf, 2.8e6, 3 * r.r_inf_err);
  EXPECT_NEAR(r.p_sat_uW, 30.0, 3 * r.p_sat_err);
  EXPECT_EQ(r.covariance.size(), 4u);
}

TEST(FitSaturation, QuenchMismatchDetected) {
  const Quench q{60.0, 2.0};
  const auto pts = saturation_points(2.8e6, 10.0, q, 0.01, 8);
  const auto plain = fit_saturation(pts, false);
  EXPECT_GT(plain.reduced_chi2, 5.0);
  const auto quenched = fit_saturation(pts, true);
  ASSERT_TRUE(quenched.converged);
  ASSERT_TRUE(quenched.quench.has_value());
  EXPECT_LT(quenched.reduced_chi2, 3.0);
  EXPECT_NEAR(quenched.quench->p_q_uW, 60.0, 3 * quenched.p_q_err);
}

TEST(FitSaturation, InsufficientPoints) {
  auto pts = saturation_points(2.8e6, 30.0, std::nullopt, 0.0, 1);
  pts.resize(5);
  EXPECT_NO_THROW(fit_saturation(pts, false));
  EXPECT_THROW(fit_saturation(pts, true), DataError);
  pts.resize(3);
  EXPECT_THROW(fit_saturation(pts, false), DataError);
}

TEST(PropagateG2Zero, Examples) {
  const auto a = propagate_g2_zero({0.92, 0.01});
  EXPECT_NEAR(a.value, 0.08, 1e-15);
  EXPECT_EQ(a.sigma, 0.01);
  const auto b = propagate_g2_zero({1.0, 0.0});
  EXPECT_EQ(b.value, 0.0);
  EXPECT_EQ(b.sigma, 0.0);
  const auto c = propagate_g2_zero({0.94, 0.02});
  EXPECT_NEAR(c.value, 0.06, 1e-15);
  EXPECT_EQ(c.sigma, 0.02);
  EXPECT_THROW(propagate_g2_zero({0.5, -1.0}), ConfigError);
}

TEST(FitExponential, ExactDecay) {
  Histogram h;
  h.mode = HistogramMode::StartStop;
  h.bin_width_ns = 10;
  h.t_min_ns = 0;
  h.t_max_ns = 2000;
  h.counts.resize(200);
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    h.counts[k] = static_cast<std::uint64_t>(std::llround(1e12 * std::exp(-1e6 * h.bin_center_ns(k) * 1e-9)));
  }
  const auto r = fit_exponential(h);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.rate, 1e6, 1e-6 * 1e6);
}
