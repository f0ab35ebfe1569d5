#include "photonbench/reports.hpp"

#include <cmath>

namespace photonbench {

using nlohmann::json;

namespace {

// NaN and infinities are not representable in JSON.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const G2FitResult& r) {
  json cov = json::array();
  for (const auto& row : r.covariance) {
    json jr = json::array();
    for (double v : row) jr.push_back(num(v));
    cov.push_back(jr);
  }
  return {{"model", "g2"},
          {"converged", r.converged},
          {"n_iterations", r.n_iterations},
          {"reduced_chi2", num(r.reduced_chi2)},
          {"parameters",
           {{"amplitude", {{"value", num(r.amplitude)}, {"stderr", num(r.amplitude_err)}}},
            {"b", {{"value", num(r.params.b)}, {"stderr", num(r.b_err)}}},
            {"t1_ns", {{"value", num(r.params.t1_ns)}, {"stderr", num(r.t1_err)}}},
            {"rate_r_per_s", {{"value", num(r.params.rate_r)}, {"stderr", num(r.rate_err)}}}}},
          {"g2_zero", {{"value", num(r.g2_zero)}, {"stderr", num(r.g2_zero_err)}}},
          {"covariance_order", {"amplitude", "b", "t1_ns", "rate_r_per_s"}},
          {"covariance", cov}};
}

json to_json(const SaturationFitResult& r) {
  json params = {{"r_inf_per_s", {{"value", num(r.r_inf)}, {"stderr", num(r.r_inf_err)}}},
                 {"p_sat_uW", {{"value", num(r.p_sat_uW)}, {"stderr", num(r.p_sat_err)}}}};
  json order = {"r_inf_per_s", "p_sat_uW"};
  if (r.quench) {
    params["p_q_uW"] = {{"value", num(r.quench->p_q_uW)}, {"stderr", num(r.p_q_err)}};
    params["exponent"] = {{"value", num(r.quench->exponent)}, {"stderr", num(r.exponent_err)}};
    order.push_back("p_q_uW");
    order.push_back("exponent");
  }
  json cov = json::array();
  for (double v : r.covariance) cov.push_back(num(v));
  return {{"model", "saturation"},
          {"converged", r.converged},
          {"n_iterations", r.n_iterations},
          {"reduced_chi2", num(r.reduced_chi2)},
          {"parameters", params},
          {"covariance_order", order},
          {"covariance_row_major", cov}};
}

json to_json(const UncertaintyBudget& b) {
  json rows = json::array();
  for (const auto& c : b.components) {
    rows.push_back({{"name", c.name},
                    {"relative_percent", c.exact ? json(nullptr) : json(c.relative_percent)},
                    {"type", c.exact ? "exact" : (c.type == EvaluationType::A ? "A" : "B")}});
  }
  return {{"components", rows}, {"combined_percent", b.combined_percent}};
}

json to_json(const CalibrationResult& r) {
  return {{"eta_spad", r.eta_spad},
          {"u_combined_percent", r.u_combined_percent},
          {"u_absolute", r.u_absolute},
          {"n_ref_per_s", r.n_ref},
          {"phi_s_W", r.phi_s_W},
          {"spad_rate_per_s", r.spad_rate},
          {"mean_voltage_V", r.mean_voltage_V},
          {"budget", to_json(r.budget)}};
}

json to_json(const VarianceReport& r) {
  return {{"window_s", r.window_s},
          {"n_windows", r.n_windows},
          {"eta", r.eta_used},
          {"mean_emitted_flux", r.mean_emitted_flux},
          {"var_emitted_flux", r.var_emitted_flux},
          {"mean_measured_flux", r.mean_measured_flux},
          {"var_measured_flux", r.var_measured_flux},
          {"predicted_var", r.predicted_var},
          {"z_score", num(r.z_score)}};
}

}  // namespace photonbench
