#include "photonbench/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "photonbench/errors.hpp"

namespace photonbench {

double LeastSquaresResult::error(std::size_t i) const {
  const std::size_t k = params.size();
  const double v = covariance.at(i * k + i);
  return v >= 0.0 ? std::sqrt(v) : std::numeric_limits<double>::quiet_NaN();
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Linearization {
  MatrixXd jtwj;
  VectorXd jtwr;
  double chi2 = 0.0;
};

double chi2_at(const LeastSquaresProblem& pb, const std::vector<double>& p) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < pb.x.size(); ++i) {
    const double r = pb.y[i] - pb.model(pb.x[i], p, nullptr);
    chi2 += pb.weight[i] * r * r;
  }
  return chi2;
}

Linearization linearize(const LeastSquaresProblem& pb, const std::vector<double>& p) {
  const auto k = static_cast<Eigen::Index>(p.size());
  Linearization lin;
  lin.jtwj = MatrixXd::Zero(k, k);
  lin.jtwr = VectorXd::Zero(k);
  VectorXd grad(k);
  for (std::size_t i = 0; i < pb.x.size(); ++i) {
    const double f = pb.model(pb.x[i], p, grad.data());
    const double r = pb.y[i] - f;
    const double w = pb.weight[i];
    lin.chi2 += w * r * r;
    lin.jtwj.selfadjointView<Eigen::Lower>().rankUpdate(grad, w);
    lin.jtwr += w * r * grad;
  }
  lin.jtwj = lin.jtwj.selfadjointView<Eigen::Lower>();
  return lin;
}

std::vector<double> clamp_to(const LeastSquaresProblem& pb, std::vector<double> p) {
  for (std::size_t j = 0; j < p.size(); ++j) p[j] = std::clamp(p[j], pb.lower[j], pb.upper[j]);
  return p;
}

std::vector<double> invert_scaled(const MatrixXd& a) {
  const auto k = a.rows();
  VectorXd d = a.diagonal().cwiseMax(0.0).cwiseSqrt();
  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(d[j] > 0.0)) d[j] = 1.0;
  }
  const MatrixXd scaled = d.cwiseInverse().asDiagonal() * a * d.cwiseInverse().asDiagonal();
  Eigen::FullPivLU<MatrixXd> lu(scaled);
  MatrixXd cov = MatrixXd::Constant(k, k, std::numeric_limits<double>::quiet_NaN());
  if (lu.isInvertible()) cov = d.cwiseInverse().asDiagonal() * lu.inverse() * d.cwiseInverse().asDiagonal();
  std::vector<double> out(static_cast<std::size_t>(k * k));
  for (Eigen::Index r = 0; r < k; ++r) {
    for (Eigen::Index c = 0; c < k; ++c) out[static_cast<std::size_t>(r * k + c)] = cov(r, c);
  }
  return out;
}

}  // namespace

LeastSquaresResult least_squares(const LeastSquaresProblem& pb, std::vector<double> initial,
                                 const LeastSquaresOptions& options) {
  const std::size_t n = pb.x.size();
  const std::size_t k = initial.size();
  if (pb.y.size() != n || pb.weight.size() != n) throw ConfigError("least_squares: data size mismatch");
  if (pb.lower.size() != k || pb.upper.size() != k) throw ConfigError("least_squares: bounds size mismatch");
  if (n < k) throw DataError("least_squares: fewer points than parameters");

  LeastSquaresResult res;
  std::vector<double> p = clamp_to(pb, std::move(initial));
  double lambda = options.initial_damping;
  Linearization lin = linearize(pb, p);
  if (!std::isfinite(lin.chi2)) throw NumericalError("least_squares: model is not finite at the initial point");

  for (res.iterations = 1; res.iterations <= options.max_iterations; ++res.iterations) {
    if (lin.chi2 == 0.0) {
      res.converged = true;
      break;
    }
    VectorXd d = lin.jtwj.diagonal().cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index j = 0; j < d.size(); ++j) {
      if (!(d[j] > 0.0)) d[j] = 1.0;
    }
    const MatrixXd scaled = d.cwiseInverse().asDiagonal() * lin.jtwj * d.cwiseInverse().asDiagonal();
    const VectorXd rhs = d.cwiseInverse().cwiseProduct(lin.jtwr);

    bool accepted = false;
    bool small_step = false;
    while (lambda <= 1e16) {
      MatrixXd damped = scaled;
      damped.diagonal().array() += lambda;
      const VectorXd step = d.cwiseInverse().cwiseProduct(damped.ldlt().solve(rhs));
      std::vector<double> trial(k);
      for (std::size_t j = 0; j < k; ++j) trial[j] = p[j] + step[static_cast<Eigen::Index>(j)];
      trial = clamp_to(pb, std::move(trial));
      const double chi2 = chi2_at(pb, trial);
      if (std::isfinite(chi2) && chi2 <= lin.chi2) {
        double rel = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const double scale = std::max(std::abs(p[j]), 1e-12);
          rel = std::max(rel, std::abs(trial[j] - p[j]) / scale);
        }
        small_step = rel < options.relative_step_tolerance;
        if (chi2 < lin.chi2 || small_step) {
          p = std::move(trial);
          lambda = std::max(lambda / 10.0, 1e-12);
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No damped step lowers chi2: numerically at the minimum.
      res.converged = true;
      break;
    }
    lin = linearize(pb, p);
    if (small_step) {
      res.converged = true;
      break;
    }
  }
  res.iterations = std::min(res.iterations, options.max_iterations);
  res.params = p;
  res.chi2 = lin.chi2;
  res.covariance = invert_scaled(lin.jtwj);
  if (res.converged) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(res.error(j))) res.converged = false;
    }
  }
  return res;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

// Weighted regression of ln(y) on x; returns (slope, intercept).
std::pair<double, double> log_linear(const std::vector<double>& x, const std::vector<double>& y) {
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] <= 0.0) continue;
    const double w = y[i];
    const double ly = std::log(y[i]);
    sw += w;
    sx += w * x[i];
    sy += w * ly;
    sxx += w * x[i] * x[i];
    sxy += w * x[i] * ly;
  }
  const double den = sw * sxx - sx * sx;
  if (sw <= 0.0) return {0.0, 0.0};
  if (std::abs(den) <= 1e-300) return {0.0, sy / sw};
  const double slope = (sw * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / sw};
}

G2Params initial_g2_guess(const std::vector<double>& t, const std::vector<double>& c, double bin_width) {
  double t_max = 0.0;
  for (double v : t) t_max = std::max(t_max, std::abs(v));
  std::vector<double> tail_t;
  std::vector<double> tail_c;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i]) >= 0.5 * t_max) {
      tail_t.push_back(std::abs(t[i]));
      tail_c.push_back(c[i]);
    }
  }
  auto [slope, intercept] = log_linear(tail_t, tail_c);
  double amp = std::exp(intercept);
  double rate = std::max(0.0, -slope * 1e9);
  if (!std::isfinite(amp) || amp <= 0.0) {
    amp = std::max(median(tail_c), 1.0);
    rate = 0.0;
  }
  std::vector<std::pair<double, double>> norm;
  for (std::size_t i = 0; i < t.size(); ++i) {
    norm.emplace_back(std::abs(t[i]), c[i] / (amp * std::exp(-rate * std::abs(t[i]) * 1e-9)));
  }
  std::sort(norm.begin(), norm.end());
  double low = norm.front().second;
  for (std::size_t i = 0; i < std::min<std::size_t>(norm.size(), 4); ++i) low = std::min(low, norm[i].second);
  G2Params g;
  g.b = std::clamp(1.0 - low, 0.01, 0.99);
  g.t1_ns = std::max(bin_width, 1e-3);
  for (const auto& [at, v] : norm) {
    if (v >= 1.0 - g.b / 2.0) {
      g.t1_ns = std::max(at / std::log(2.0), bin_width);
      break;
    }
  }
  g.rate_r = rate;
  (void)amp;
  return g;
}

}  // namespace

G2FitResult fit_g2(const Histogram& h, const std::optional<G2Params>& initial) {
  h.validate();
  std::vector<double> t(h.bin_count());
  std::vector<double> c(h.bin_count());
  std::size_t nonempty = 0;
  for (std::size_t k = 0; k < h.bin_count(); ++k) {
    t[k] = h.bin_center_ns(k);
    c[k] = static_cast<double>(h.counts[k]);
    if (h.counts[k] > 0) ++nonempty;
  }
  if (nonempty < 20) {
    throw DataError("fit_g2: " + std::to_string(nonempty) + " nonempty bins, at least 20 required");
  }
  if (std::all_of(h.counts.begin(), h.counts.end(), [&](std::uint64_t v) { return v == h.counts.front(); })) {
    throw DataError("fit_g2: degenerate histogram (all bins equal)");
  }

  G2Params g0 = initial ? *initial : initial_g2_guess(t, c, h.bin_width_ns);
  // Amplitude from the tail given the shape guess.
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double m = g2_model(t[k], g0);
    const double w = 1.0 / std::max(c[k], 1.0);
    num += w * c[k] * m;
    den += w * m * m;
  }
  const double a0 = den > 0.0 ? std::max(num / den, 1e-12) : 1.0;

  LeastSquaresProblem pb;
  pb.x = t;
  pb.y = c;
  pb.weight.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) pb.weight[k] = 1.0 / std::max(c[k], 1.0);
  pb.model = [](double x, const std::vector<double>& p, double* grad) {
    const G2Params g{p[1], p[2], p[3]};
    const G2Gradient d = g2_model_gradient(x, g);
    if (grad) {
      grad[0] = d.value;
      grad[1] = p[0] * d.d_b;
      grad[2] = p[0] * d.d_t1;
      grad[3] = p[0] * d.d_rate;
    }
    return p[0] * d.value;
  };
  const double inf = std::numeric_limits<double>::infinity();
  pb.lower = {1e-300, 0.0, 1e-6, 0.0};
  pb.upper = {inf, 1.0, inf, inf};

  const auto res = least_squares(pb, {a0, g0.b, g0.t1_ns, g0.rate_r});
  G2FitResult out;
  out.amplitude = res.params[0];
  out.params = {res.params[1], res.params[2], res.params[3]};
  out.amplitude_err = res.error(0);
  out.b_err = res.error(1);
  out.t1_err = res.error(2);
  out.rate_err = res.error(3);
  const auto g0z = propagate_g2_zero({out.params.b, std::isfinite(out.b_err) ? out.b_err : 0.0});
  out.g2_zero = g0z.value;
  out.g2_zero_err = out.b_err;
  const double dof = static_cast<double>(c.size()) - 4.0;
  out.reduced_chi2 = dof > 0.0 ? res.chi2 / dof : std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t q = 0; q < 4; ++q) out.covariance[r][q] = res.covariance[r * 4 + q];
  }
  out.n_iterations = res.iterations;
  out.converged = res.converged && std::isfinite(out.reduced_chi2);
  return out;
}

SaturationFitResult fit_saturation(const std::vector<SaturationPoint>& points, bool with_quench) {
  const std::size_t need = with_quench ? 6 : 4;
  if (points.size() < need) {
    throw DataError("fit_saturation: " + std::to_string(points.size()) + " points, at least " +
                    std::to_string(need) + " required");
  }
  for (const auto& p : points) {
    if (!(p.power_uW > 0.0)) throw DataError("fit_saturation: powers must be > 0");
    if (!(p.stderr_rate > 0.0)) throw DataError("fit_saturation: rate uncertainties must be > 0");
  }

  // Lineweaver–Burk: 1/r = 1/r_inf + (p_sat/r_inf)/P.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, m = 0;
  double r_max = 0.0;
  std::vector<double> powers;
  for (const auto& p : points) {
    r_max = std::max(r_max, p.rate);
    powers.push_back(p.power_uW);
    if (p.rate <= 0.0) continue;
    const double x = 1.0 / p.power_uW;
    const double y = 1.0 / p.rate;
    sx += x; sy += y; sxx += x * x; sxy += x * y; m += 1.0;
  }
  double r_inf0 = 2.0 * r_max;
  double p_sat0 = median(powers);
  const double den = m * sxx - sx * sx;
  if (m >= 2.0 && std::abs(den) > 0.0) {
    const double slope = (m * sxy - sx * sy) / den;
    const double intercept = (sy - slope * sx) / m;
    if (intercept > 0.0 && slope > 0.0) {
      r_inf0 = 1.0 / intercept;
      p_sat0 = slope / intercept;
    }
  }
  const double p_max = *std::max_element(powers.begin(), powers.end());

  LeastSquaresProblem pb;
  for (const auto& p : points) {
    pb.x.push_back(p.power_uW);
    pb.y.push_back(p.rate);
    pb.weight.push_back(1.0 / (p.stderr_rate * p.stderr_rate));
  }
  pb.model = [with_quench](double power, const std::vector<double>& p, double* grad) {
    const double frac = power / (power + p[1]);
    double q = 1.0;
    double u = 0.0;
    if (with_quench) {
      u = std::pow(power / p[2], p[3]);
      q = 1.0 / (1.0 + u);
    }
    const double value = p[0] * frac * q;
    if (grad) {
      grad[0] = frac * q;
      grad[1] = -p[0] * power / ((power + p[1]) * (power + p[1])) * q;
      if (with_quench) {
        grad[2] = value * q * u * p[3] / p[2];
        grad[3] = -value * q * u * std::log(power / p[2]);
      }
    }
    return value;
  };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> init{r_inf0, p_sat0};
  pb.lower = {1e-300, 1e-300};
  pb.upper = {inf, inf};
  if (with_quench) {
    init.insert(init.end(), {p_max, 2.0});
    pb.lower.insert(pb.lower.end(), {1e-300, 0.1});
    pb.upper.insert(pb.upper.end(), {inf, 20.0});
  }

  const auto res = least_squares(pb, init);
  SaturationFitResult out;
  out.r_inf = res.params[0];
  out.p_sat_uW = res.params[1];
  out.r_inf_err = res.error(0);
  out.p_sat_err = res.error(1);
  if (with_quench) {
    out.quench = Quench{res.params[2], res.params[3]};
    out.p_q_err = res.error(2);
    out.exponent_err = res.error(3);
  }
  const double dof = static_cast<double>(points.size() - init.size());
  out.reduced_chi2 = dof > 0.0 ? res.chi2 / dof : std::numeric_limits<double>::quiet_NaN();
  out.covariance = res.covariance;
  out.n_iterations = res.iterations;
  out.converged = res.converged && out.r_inf > 0.0 && out.p_sat_uW > 0.0;
  return out;
}

ValueError propagate_g2_zero(ValueError b) {
  if (!(b.value >= 0.0 && b.value <= 1.0)) throw ConfigError("propagate_g2_zero: b must lie in [0, 1]");
  if (!(b.sigma >= 0.0)) throw ConfigError("propagate_g2_zero: sigma must be >= 0");
  return {g2_zero(b.value), b.sigma};
}

ExponentialFitResult fit_exponential(const Histogram& h, double t_from_ns) {
  h.validate();
  LeastSquaresProblem pb;
  for (std::size_t k = 0; k < h.bin_count(); ++k) {
    const double t = h.bin_center_ns(k);
    if (t < t_from_ns) continue;
    const double c = static_cast<double>(h.counts[k]);
    pb.x.push_back(t);
    pb.y.push_back(c);
    pb.weight.push_back(1.0 / std::max(c, 1.0));
  }
  if (pb.x.size() < 3) throw DataError("fit_exponential: fewer than 3 bins in range");
  auto [slope, intercept] = log_linear(pb.x, pb.y);
  pb.model = [](double t, const std::vector<double>& p, double* grad) {
    const double e = std::exp(-p[1] * t * 1e-9);
    if (grad) {
      grad[0] = e;
      grad[1] = -p[0] * t * 1e-9 * e;
    }
    return p[0] * e;
  };
  pb.lower = {1e-300, 0.0};
  pb.upper = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double a0 = std::isfinite(std::exp(intercept)) && intercept != 0.0 ? std::exp(intercept) : 1.0;
  const auto res = least_squares(pb, {a0, std::max(0.0, -slope * 1e9)});
  ExponentialFitResult out;
  out.amplitude = res.params[0];
  out.rate = res.params[1];
  out.rate_err = res.error(1);
  out.reduced_chi2 = res.chi2 / static_cast<double>(pb.x.size() - 2);
  out.converged = res.converged;
  return out;
}

}  // namespace photonbench
