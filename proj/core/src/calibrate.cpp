#include "photonbench/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "photonbench/errors.hpp"
#include "photonbench/photophysics.hpp"
#include "photonbench/random.hpp"

namespace photonbench {

UncertaintyBudget combine_budget(std::vector<BudgetComponent> components) {
  if (components.empty()) throw ConfigError("combine_budget: at least one component required");
  double ss = 0.0;
  for (const auto& c : components) {
    if (!(c.relative_percent >= 0.0)) {
      throw ConfigError("combine_budget: component '" + c.name + "' must be >= 0");
    }
    if (!c.exact) ss += c.relative_percent * c.relative_percent;
  }
  return {std::move(components), std::sqrt(ss)};
}

std::string render_budget_table(const UncertaintyBudget& budget) {
  std::size_t width = std::string("Combined uncertainty, u_c").size();
  for (const auto& c : budget.components) width = std::max(width, c.name.size());
  std::ostringstream os;
  auto row = [&](const std::string& name, const std::string& value, const std::string& type) {
    char line[256];
    std::snprintf(line, sizeof line, "%-*s  %9s  %s", static_cast<int>(width), name.c_str(), value.c_str(),
                  type.c_str());
    std::string s(line);
    while (!s.empty() && s.back() == ' ') s.pop_back();
    os << s << '\n';
  };
  row("Source of uncertainty", "u (%)", "Type");
  os << std::string(width + 17, '-') << '\n';
  for (const auto& c : budget.components) {
    char v[32];
    std::snprintf(v, sizeof v, "%.3f", c.relative_percent);
    row(c.name, c.exact ? "-" : v, c.exact ? "" : (c.type == EvaluationType::A ? "A" : "B"));
  }
  os << std::string(width + 17, '-') << '\n';
  char v[32];
  std::snprintf(v, sizeof v, "%.2f", budget.combined_percent);
  row("Combined uncertainty, u_c", v, "");
  return os.str();
}

void CalibrationInput::validate() const {
  if (spad_counts.empty()) throw DataError("calibration: SPAD count series is empty");
  if (voltages.empty()) throw DataError("calibration: voltage series is empty");
  for (const auto& g : spad_counts) {
    if (!(g.duration_s > 0.0)) throw DataError("calibration: gate durations must be > 0");
  }
  if (!(wavelength_nm > 0.0)) throw ConfigError("calibration.wavelength_nm: must be > 0");
  if (!(spad_dark_cps >= 0.0)) throw ConfigError("calibration.spad_dark_cps: must be >= 0");
  if (!(spad_dead_time_ns >= 0.0)) throw ConfigError("calibration.spad_dead_time_ns: must be >= 0");
  analog.validate();
}

double reference_flux(double mean_voltage_V, const AnalogConfig& cfg, double wavelength_nm) {
  cfg.validate();
  if (!(mean_voltage_V > 0.0)) throw DataError("reference_flux: mean voltage must be > 0");
  const double current = mean_voltage_V * (1.0 - cfg.linearity_correction) / cfg.gain_V_per_A;
  return power_to_flux(current / cfg.responsivity_A_per_W, wavelength_nm);
}

double spad_rate(const CalibrationInput& input) {
  input.validate();
  double counts = 0.0;
  double time = 0.0;
  for (const auto& g : input.spad_counts) {
    counts += static_cast<double>(g.counts);
    time += g.duration_s;
  }
  const double net = counts / time - input.spad_dark_cps;
  if (!(net > 0.0)) throw NumericalError("spad_rate: dark-corrected rate is not positive");
  return dead_time_correct(net, input.spad_dead_time_ns, input.dead_time_model);
}

CalibrationResult spad_efficiency(const CalibrationInput& input) {
  input.validate();
  CalibrationResult r;

  const auto nv = static_cast<double>(input.voltages.size());
  double mean = 0.0;
  for (double v : input.voltages) mean += v;
  mean /= nv;
  double ss = 0.0;
  for (double v : input.voltages) ss += (v - mean) * (v - mean);
  const double sem_v = input.voltages.size() > 1 ? std::sqrt(ss / (nv - 1.0) / nv) : 0.0;

  r.mean_voltage_V = mean;
  r.n_ref = reference_flux(mean, input.analog, input.wavelength_nm);
  r.phi_s_W = flux_to_power(r.n_ref, input.wavelength_nm);
  r.spad_rate = spad_rate(input);
  r.eta_spad = r.spad_rate / r.n_ref;

  double counts_rel = 0.0;
  if (input.spad_counts.size() > 1) {
    std::vector<double> rates;
    for (const auto& g : input.spad_counts) rates.push_back(static_cast<double>(g.counts) / g.duration_s);
    const auto k = static_cast<double>(rates.size());
    double m = 0.0;
    for (double x : rates) m += x;
    m /= k;
    double s2 = 0.0;
    for (double x : rates) s2 += (x - m) * (x - m);
    counts_rel = m > 0.0 ? std::sqrt(s2 / (k - 1.0) / k) / m : 0.0;
  } else {
    const double n = static_cast<double>(input.spad_counts.front().counts);
    counts_rel = n > 0.0 ? 1.0 / std::sqrt(n) : 0.0;
  }

  const auto& tb = input.type_b;
  std::vector<BudgetComponent> rows{
      {"Planck's constant, h", 0.0, EvaluationType::B, true},
      {"Wavelength, lambda", tb.wavelength, EvaluationType::B, false},
      {"Speed of light, c", 0.0, EvaluationType::B, true},
      {"Si-detector spectral responsivity, s_Si", tb.responsivity, EvaluationType::B, false},
      {"Si-detector measurement, V_f", 100.0 * sem_v / mean, EvaluationType::A, false},
      {"Amplification factor, F_Amp", tb.gain, EvaluationType::B, false},
      {"Linearity factor of the Si-detector, F_Lin", tb.linearity, EvaluationType::B, false},
      {"Si-SPAD counts, SPAD_Counts", 100.0 * counts_rel, EvaluationType::A, false},
      {"Source stability", tb.source_stability, EvaluationType::B, false},
  };
  if (tb.dead_time_model) rows.push_back({"Dead-time correction model", *tb.dead_time_model, EvaluationType::B, false});
  r.budget = combine_budget(std::move(rows));
  r.u_combined_percent = r.budget.combined_percent;
  r.u_absolute = r.eta_spad * r.u_combined_percent / 100.0;

  if (r.eta_spad > 1.0 + 3.0 * r.u_absolute) {
    throw NumericalError("spad_efficiency: eta = " + std::to_string(r.eta_spad) +
                         " exceeds 1 by more than 3 standard uncertainties");
  }
  return r;
}

std::vector<CalibrationResult> efficiency_vs_flux(const std::vector<CalibrationInput>& series) {
  if (series.size() < 2) throw DataError("efficiency_vs_flux: at least 2 flux points required");
  std::vector<CalibrationResult> out;
  out.reserve(series.size());
  for (const auto& in : series) out.push_back(spad_efficiency(in));
  return out;
}

CalibrationInput synthesize_calibration(const CalibrationScenario& sc, std::uint64_t seed) {
  sc.spad.validate();
  sc.analog.validate();
  if (!(sc.optical_power_W > 0.0)) throw ConfigError("scenario.optical_power_W: must be > 0");
  if (sc.n_gates == 0 || !(sc.gate_s > 0.0)) throw ConfigError("scenario: need at least one gate of positive length");

  CounterRng drift_rng(seed, 0);
  const double drift = 1.0 + sc.source_drift * standard_normal(drift_rng);
  const double flux = power_to_flux(sc.optical_power_W, sc.wavelength_nm) * std::max(drift, 0.0);

  CalibrationInput in;
  in.analog = sc.analog;
  in.wavelength_nm = sc.wavelength_nm;
  in.spad_dark_cps = sc.spad.dark_rate_cps;
  in.spad_dead_time_ns = sc.spad.dead_time_ns;
  in.dead_time_model = sc.spad.dead_time_model;
  in.type_b = sc.type_b;
  for (std::size_t g = 0; g < sc.n_gates; ++g) {
    const auto photons = poisson_stream(flux, sc.gate_s, CounterRng::derive(seed, 2 * g + 1), 1);
    const auto clicks = detect_spad(photons, sc.spad, CounterRng::derive(seed, 2 * g + 2));
    in.spad_counts.push_back({sc.gate_s, clicks.size()});
  }
  in.voltages = read_analog(sc.optical_power_W, sc.analog, sc.n_voltage_samples, CounterRng::derive(seed, 0x7fff'ffff));
  return in;
}

}  // namespace photonbench
