#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cli/cli.hpp"
#include "photonbench/calibrate.hpp"
#include "photonbench/config.hpp"
#include "photonbench/correlate.hpp"
#include "photonbench/detectors.hpp"
#include "photonbench/errors.hpp"
#include "photonbench/fit.hpp"
#include "photonbench/histogram_io.hpp"
#include "photonbench/presets.hpp"
#include "photonbench/random.hpp"
#include "photonbench/reports.hpp"
#include "photonbench/stream_io.hpp"
#include "photonbench/tables_io.hpp"
#include "photonbench/text.hpp"

namespace photonbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream ids for CounterRng::derive(seed, id).
enum SeedStream : std::uint64_t { kEmission = 1, kBackground, kSplit, kDetectA, kDetectB };

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void print_stream_summary(std::ostream& out, const fs::path& path, const PhotonStream& s, double wavelength_nm) {
  const double rate = s.mean_rate();
  out << path.string() << ": " << s.size() << " events, mean rate " << format_double(rate) << " /s, "
      << "optical power " << format_double(flux_to_power(rate, wavelength_nm)) << " W\n";
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    double half = 0.0;
    try {
      half = parse_double(text, "--range");
    } catch (const DataError& e) {
      throw ConfigError(e.what());
    }
    if (!(half > 0.0)) throw ConfigError("--range: half-width must be > 0");
    return {-half, half};
  }
  try {
    return {parse_double(std::string_view(text).substr(0, comma), "--range"),
            parse_double(std::string_view(text).substr(comma + 1), "--range")};
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
}

CalibrationScenario scenario_from(const WorkbenchConfig& cfg, double power_W) {
  CalibrationScenario sc;
  sc.optical_power_W = power_W;
  sc.wavelength_nm = cfg.calibration.wavelength_nm;
  sc.spad = cfg.spad[0];
  sc.spad.dark_rate_cps = cfg.calibration.spad_dark_cps;
  sc.spad.dead_time_ns = cfg.calibration.spad_dead_time_ns;
  sc.spad.dead_time_model = cfg.calibration.dead_time_model;
  sc.analog = cfg.analog;
  sc.n_voltage_samples = cfg.calibration.n_voltage_samples;
  sc.n_gates = cfg.calibration.n_gates;
  sc.gate_s = cfg.calibration.gate_s;
  sc.source_drift = cfg.calibration.source_drift;
  sc.type_b = cfg.calibration.type_b;
  return sc;
}

}  // namespace

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  WorkbenchConfig cfg = load_config(a.config);
  if (a.seed >= 0) cfg.seed = static_cast<std::uint64_t>(a.seed);
  if (a.duration_set) {
    if (!(a.duration_s > 0.0)) throw ConfigError("--duration: must be > 0");
    cfg.simulation.duration_s = a.duration_s;
  }
  const std::uint64_t seed = cfg.require_seed();
  const auto& sim = cfg.simulation;
  if (sim.output == SimulationOutput::Hbt && a.out_b.empty()) {
    throw ConfigError("--out-b: required when simulation.output is hbt");
  }

  SimulationOptions opts;
  opts.resolution_ps = sim.resolution_ps;
  opts.segment_s = sim.segment_s;
  opts.threads = a.threads;
  opts.drift = sim.drift;
  PhotonStream light = simulate_emission(cfg.emitter, sim.duration_s, CounterRng::derive(seed, kEmission), opts);
  if (sim.background_cps > 0.0) {
    light = merge(light, poisson_stream(sim.background_cps, sim.duration_s, CounterRng::derive(seed, kBackground),
                                        sim.resolution_ps));
  }
  const double wl = cfg.calibration.wavelength_nm;

  switch (sim.output) {
    case SimulationOutput::Emission:
      save_stream(a.out, light);
      print_stream_summary(out, a.out, light, wl);
      break;
    case SimulationOutput::Detected: {
      const auto clicks = detect_spad(light, cfg.spad[0], CounterRng::derive(seed, kDetectA));
      save_stream(a.out, clicks);
      print_stream_summary(out, a.out, clicks, wl);
      break;
    }
    case SimulationOutput::Hbt: {
      auto [arm_a, arm_b] = hbt_split(light, CounterRng::derive(seed, kSplit));
      const auto clicks_a = detect_spad(arm_a, cfg.spad[0], CounterRng::derive(seed, kDetectA));
      const auto clicks_b = detect_spad(arm_b, cfg.spad[1], CounterRng::derive(seed, kDetectB));
      save_stream(a.out, clicks_a);
      save_stream(a.out_b, clicks_b);
      print_stream_summary(out, a.out, clicks_a, wl);
      print_stream_summary(out, a.out_b, clicks_b, wl);
      break;
    }
  }
  return kOk;
}

int cmd_correlate(const CorrelateArgs& a, std::ostream& out) {
  HistogramMode mode = parse_histogram_mode(a.mode);
  const auto [lo, hi] = parse_range(a.range);
  if (!a.g2_out.empty() && mode != HistogramMode::Full) throw ConfigError("--g2-out: requires --mode full");
  const PhotonStream start = load_stream(a.start);
  const bool same = fs::exists(a.stop) && fs::equivalent(a.start, a.stop);
  const PhotonStream stop_storage = same ? PhotonStream{} : load_stream(a.stop);
  const PhotonStream& stop = same ? start : stop_storage;

  CorrelateOptions opts;
  opts.threads = a.threads;
  const Histogram h = mode == HistogramMode::Full ? full_correlation(start, stop, a.bin_ns, lo, hi, opts)
                                                  : start_stop_histogram(start, stop, a.bin_ns, lo, hi, opts);
  save_histogram(a.out, h);
  if (!a.g2_out.empty()) save_g2(a.g2_out, normalize_g2(h));
  out << a.out.string() << ": " << h.bin_count() << " bins, " << h.total() << " coincidences from " << h.n_starts
      << " starts\n";
  return kOk;
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  json report;
  bool converged = false;
  if (a.model == "g2") {
    if (a.histogram.empty()) throw ConfigError("--histogram: required for the g2 model");
    const Histogram h = load_histogram(a.histogram);
    const auto r = fit_g2(h);
    report = to_json(r);
    converged = r.converged;
    out << "g2(0) = " << format_double(r.g2_zero) << " +- " << format_double(r.g2_zero_err)
        << ", t1 = " << format_double(r.params.t1_ns) << " ns, R = " << format_double(r.params.rate_r)
        << " /s, reduced chi2 = " << format_double(r.reduced_chi2) << '\n';
  } else {
    if (a.points.empty()) throw ConfigError("--points: required for the saturation model");
    const auto points = read_file(a.points, read_saturation_csv);
    const auto r = fit_saturation(points, a.quench);
    report = to_json(r);
    converged = r.converged;
    out << "r_inf = " << format_double(r.r_inf) << " +- " << format_double(r.r_inf_err)
        << " /s, p_sat = " << format_double(r.p_sat_uW) << " +- " << format_double(r.p_sat_err)
        << " uW, reduced chi2 = " << format_double(r.reduced_chi2) << '\n';
  }
  if (!a.out.empty()) write_json(a.out, report);
  if (!converged) {
    out << "fit did not converge\n";
    return kNumerical;
  }
  return kOk;
}

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  const WorkbenchConfig cfg = load_config(a.config);
  CalibrationInput in;
  in.spad_counts = read_file(a.spad_counts, read_spad_counts_csv);
  in.voltages = read_file(a.voltages, read_voltages_csv);
  in.analog = cfg.analog;
  in.wavelength_nm = cfg.calibration.wavelength_nm;
  in.spad_dark_cps = cfg.calibration.spad_dark_cps;
  in.spad_dead_time_ns = cfg.calibration.spad_dead_time_ns;
  in.dead_time_model = cfg.calibration.dead_time_model;
  in.type_b = cfg.calibration.type_b;
  const auto r = spad_efficiency(in);
  const std::string table = render_budget_table(r.budget);
  char line[160];
  std::snprintf(line, sizeof line, "eta_SPAD = %.4f +- %.4f (u_c = %.2f %%), N_ref = %.4g /s, Phi_s = %.4g W\n",
                r.eta_spad, r.u_absolute, r.u_combined_percent, r.n_ref, r.phi_s_W);
  out << line << table;
  if (!a.out.empty()) write_json(a.out, to_json(r));
  if (!a.budget_out.empty()) write_text_file(a.budget_out, table);
  return kOk;
}

int cmd_budget(const BudgetArgs& a, std::ostream& out) {
  const auto budget = combine_budget(read_file(a.components, read_budget_csv));
  out << render_budget_table(budget);
  if (!a.out.empty()) write_json(a.out, to_json(budget));
  return kOk;
}

int cmd_variance_check(const VarianceArgs& a, std::ostream& out) {
  if (a.seed < 0) throw ConfigError("--seed: required");
  const PhotonStream emitted = load_stream(a.stream);
  const auto r = variance_check(emitted, a.eta, a.window_s, static_cast<std::uint64_t>(a.seed));
  out << "windows " << r.n_windows << ", measured var " << format_double(r.var_measured_flux) << " /s^2, predicted "
      << format_double(r.predicted_var) << " /s^2, z = " << format_double(r.z_score) << '\n';
  if (!a.out.empty()) write_json(a.out, to_json(r));
  return kOk;
}

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const WorkbenchConfig cfg = load_config(a.config);
  const std::uint64_t seed = cfg.require_seed();
  if (a.powers_fW.size() < 2) throw ConfigError("--powers-fW: at least 2 powers required");
  std::vector<CalibrationInput> series;
  for (std::size_t i = 0; i < a.powers_fW.size(); ++i) {
    if (!(a.powers_fW[i] > 0.0)) throw ConfigError("--powers-fW: powers must be > 0");
    series.push_back(synthesize_calibration(scenario_from(cfg, a.powers_fW[i] * 1e-15), CounterRng::derive(seed, i)));
  }
  const auto results = efficiency_vs_flux(series);
  json points = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    points.push_back({{"optical_power_fW", a.powers_fW[i]},
                      {"photon_flux_per_s", r.n_ref},
                      {"eta_spad", r.eta_spad},
                      {"u_absolute", r.u_absolute},
                      {"u_combined_percent", r.u_combined_percent}});
    char line[128];
    std::snprintf(line, sizeof line, "%8.1f fW  N_ref %.4g /s  eta %.4f +- %.4f  (%.2f %%)\n", a.powers_fW[i], r.n_ref,
                  r.eta_spad, r.u_absolute, r.u_combined_percent);
    out << line;
  }
  write_json(a.out, {{"true_efficiency", cfg.spad[0].efficiency}, {"points", points}});
  return kOk;
}

int cmd_generate_calibration(const GenerateArgs& a, std::ostream& out) {
  const WorkbenchConfig cfg = load_config(a.config);
  if (!(a.power_fW > 0.0)) throw ConfigError("--power-fW: must be > 0");
  const auto in = synthesize_calibration(scenario_from(cfg, a.power_fW * 1e-15), cfg.require_seed());
  fs::create_directories(a.out_dir);
  std::ostringstream counts;
  write_spad_counts_csv(counts, in.spad_counts);
  write_text_file(a.out_dir / "spad_counts.csv", counts.str());
  std::ostringstream volts;
  write_voltages_csv(volts, in.voltages);
  write_text_file(a.out_dir / "voltages.csv", volts.str());
  out << "wrote " << in.spad_counts.size() << " gates and " << in.voltages.size() << " voltage samples to "
      << a.out_dir.string() << '\n';
  return kOk;
}

int cmd_presets(std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %6s %9s %12s %12s %12s\n", "name", "T [K]", "P [uW]", "rate [/s]",
                "g2(0)", "background");
  out << line;
  for (const auto& p : presets()) {
    std::string g2 = std::isnan(p.target_g2_zero) ? "-" : format_double(p.target_g2_zero) + "+-" + format_double(p.target_g2_err);
    std::snprintf(line, sizeof line, "%-10s %6.0f %9.0f %12.4g %12s %12.4g\n", p.name.c_str(), p.temperature_K,
                  p.pump_power_uW, p.target_rate_cps, g2.c_str(), p.background_cps);
    out << line;
  }
  return kOk;
}

}  // namespace photonbench::cli
