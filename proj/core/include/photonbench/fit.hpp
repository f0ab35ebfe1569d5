#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "photonbench/correlate.hpp"
#include "photonbench/photophysics.hpp"

namespace photonbench {

/// Weighted, bounded Levenberg–Marquardt with Marquardt diagonal scaling.
struct LeastSquaresProblem {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weight;  ///< 1/σ² per point
  /// Writes model value and ∂/∂params (size = params.size()) at x.
  std::function<double(double x, const std::vector<double>& params, double* gradient)> model;
  std::vector<double> lower;
  std::vector<double> upper;
};

struct LeastSquaresOptions {
  int max_iterations = 200;
  double relative_step_tolerance = 1e-10;
  double initial_damping = 1e-3;
};

struct LeastSquaresResult {
  std::vector<double> params;
  std::vector<double> covariance;  ///< row-major, (JᵀWJ)⁻¹
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;

  double error(std::size_t i) const;
};

LeastSquaresResult least_squares(const LeastSquaresProblem& problem, std::vector<double> initial,
                                 const LeastSquaresOptions& options = {});

struct G2FitResult {
  G2Params params;
  double b_err = 0.0;
  double t1_err = 0.0;
  double rate_err = 0.0;
  double amplitude = 0.0;
  double amplitude_err = 0.0;
  double g2_zero = 0.0;
  double g2_zero_err = 0.0;
  double reduced_chi2 = 0.0;
  /// Order (A, b, t1, R).
  std::array<std::array<double, 4>, 4> covariance{};
  int n_iterations = 0;
  bool converged = false;
};

/// Fits counts ≈ A·g2_model(t) with weights 1/max(count, 1).
G2FitResult fit_g2(const Histogram& h, const std::optional<G2Params>& initial = std::nullopt);

struct SaturationPoint {
  double power_uW;
  double rate;
  double stderr_rate;
};

struct SaturationFitResult {
  double r_inf = 0.0;
  double r_inf_err = 0.0;
  double p_sat_uW = 0.0;
  double p_sat_err = 0.0;
  std::optional<Quench> quench;
  double p_q_err = 0.0;
  double exponent_err = 0.0;
  double reduced_chi2 = 0.0;
  std::vector<double> covariance;  ///< row-major over (r_inf, p_sat[, p_q, m])
  int n_iterations = 0;
  bool converged = false;
};

SaturationFitResult fit_saturation(const std::vector<SaturationPoint>& points, bool with_quench);

struct ValueError {
  double value;
  double sigma;
};

/// g2(0) = 1 - b with unchanged σ.
ValueError propagate_g2_zero(ValueError b);

struct ExponentialFitResult {
  double amplitude = 0.0;
  double rate = 0.0;      ///< 1/s
  double rate_err = 0.0;
  double reduced_chi2 = 0.0;
  bool converged = false;
};

/// counts ≈ A·e^{-R·t} over the bins with t ≥ t_from_ns, Poisson weights.
ExponentialFitResult fit_exponential(const Histogram& h, double t_from_ns = 0.0);

}  // namespace photonbench
