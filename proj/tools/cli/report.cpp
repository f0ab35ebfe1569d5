#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/cli.hpp"
#include "photonbench/calibrate.hpp"
#include "photonbench/errors.hpp"
#include "photonbench/fit.hpp"
#include "photonbench/histogram_io.hpp"
#include "photonbench/tables_io.hpp"
#include "photonbench/text.hpp"

namespace photonbench::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Output file name -> contents; written only once every section succeeded.
using Files = std::map<std::string, std::string>;

std::string fixed(double v, int digits) {
  if (!std::isfinite(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v, int digits) {
  if (!std::isfinite(v)) return "-";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

json read_json(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError(path.string() + ": cannot open");
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

double number(const json& j, const char* key, const fs::path& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw DataError(path.string() + ": missing field '" + key + "'");
  if (it->is_null()) return std::nan("");
  if (!it->is_number()) throw DataError(path.string() + ": field '" + key + "' is not a number");
  return it->get<double>();
}

// Every eighth bin keeps the curve file small while preserving the dip.
constexpr std::size_t kG2Stride = 8;

void g2_section(const fs::path& path, Files& files, std::ostream& md) {
  const Histogram h = load_histogram(path);
  const G2FitResult r = fit_g2(h);
  const std::size_t stride = h.bin_count() > 400 ? kG2Stride : 1;
  std::ostringstream csv;
  csv << "t_ns,counts,g2_data,g2_fit\n";
  for (std::size_t k = 0; k < h.bin_count(); k += stride) {
    const double t = h.bin_center_ns(k);
    csv << format_double(t) << ',' << h.counts[k] << ',' << format_double(h.counts[k] / r.amplitude) << ','
        << format_double(g2_model(t, r.params)) << '\n';
  }
  files["g2_curve.csv"] = csv.str();

  md << "## Second-order correlation\n\n"
     << "Histogram: `" << path.filename().string() << "` (" << to_string(h.mode) << ", " << h.bin_count()
     << " bins of " << format_double(h.bin_width_ns) << " ns, " << h.total() << " coincidences)\n\n"
     << "| Parameter | Value | Std. error |\n|---|---|---|\n"
     << "| g2(0) | " << fixed(r.g2_zero, 4) << " | " << fixed(r.g2_zero_err, 4) << " |\n"
     << "| b | " << fixed(r.params.b, 4) << " | " << fixed(r.b_err, 4) << " |\n"
     << "| t1 (ns) | " << fixed(r.params.t1_ns, 4) << " | " << fixed(r.t1_err, 4) << " |\n"
     << "| R (1/s) | " << sci(r.params.rate_r, 4) << " | " << sci(r.rate_err, 2) << " |\n"
     << "| A (counts/bin) | " << sci(r.amplitude, 4) << " | " << sci(r.amplitude_err, 2) << " |\n\n"
     << "Reduced chi2 " << fixed(r.reduced_chi2, 3) << ", " << r.n_iterations << " iterations, "
     << (r.converged ? "converged" : "NOT converged") << ". Curve samples: `g2_curve.csv`.\n\n";
}

void saturation_section(const fs::path& path, Files& files, std::ostream& md) {
  const auto points = read_file(path, read_saturation_csv);
  const SaturationFitResult r = fit_saturation(points, false);
  std::ostringstream csv;
  csv << "power_uW,rate,stderr,rate_fit\n";
  for (const auto& p : points) {
    csv << format_double(p.power_uW) << ',' << format_double(p.rate) << ',' << format_double(p.stderr_rate) << ','
        << format_double(saturation_rate(p.power_uW, r.r_inf, r.p_sat_uW)) << '\n';
  }
  files["saturation_curve.csv"] = csv.str();

  md << "## Saturation\n\n"
     << "| Parameter | Value | Std. error |\n|---|---|---|\n"
     << "| R_inf (1/s) | " << sci(r.r_inf, 4) << " | " << sci(r.r_inf_err, 2) << " |\n"
     << "| P_sat (uW) | " << fixed(r.p_sat_uW, 3) << " | " << fixed(r.p_sat_err, 3) << " |\n\n"
     << points.size() << " points, reduced chi2 " << fixed(r.reduced_chi2, 3) << ". Curve: `saturation_curve.csv`.\n\n";
}

void efficiency_section(const fs::path& path, Files& files, std::ostream& md) {
  const json j = read_json(path);
  const auto it = j.find("points");
  if (it == j.end() || !it->is_array() || it->empty()) throw DataError(path.string() + ": no 'points' array");
  std::ostringstream csv;
  csv << "optical_power_fW,photon_flux_per_s,eta_spad,u_absolute,u_combined_percent\n";
  md << "## Detection efficiency versus photon flux\n\n";
  if (j.contains("true_efficiency")) md << "Configured efficiency " << fixed(number(j, "true_efficiency", path), 4) << ".\n\n";
  md << "| Power (fW) | Flux (photons/s) | eta | u (abs) | u_c (%) |\n|---|---|---|---|---|\n";
  for (const auto& p : *it) {
    const double pw = number(p, "optical_power_fW", path), flux = number(p, "photon_flux_per_s", path),
                 eta = number(p, "eta_spad", path), u = number(p, "u_absolute", path),
                 uc = number(p, "u_combined_percent", path);
    csv << format_double(pw) << ',' << format_double(flux) << ',' << format_double(eta) << ',' << format_double(u)
        << ',' << format_double(uc) << '\n';
    md << "| " << fixed(pw, 1) << " | " << sci(flux, 3) << " | " << fixed(eta, 4) << " | " << fixed(u, 4) << " | "
       << fixed(uc, 2) << " |\n";
  }
  md << "\nData: `efficiency_vs_flux.csv`.\n\n";
  files["efficiency_vs_flux.csv"] = csv.str();
}

void calibration_section(const fs::path& path, std::ostream& md) {
  const json j = read_json(path);
  md << "## Calibration\n\n"
     << "eta_SPAD = " << fixed(number(j, "eta_spad", path), 4) << " +- " << fixed(number(j, "u_absolute", path), 4)
     << " (u_c = " << fixed(number(j, "u_combined_percent", path), 2) << " %), reference flux "
     << sci(number(j, "n_ref_per_s", path), 4) << " photons/s.\n\n";
  const auto budget = j.find("budget");
  if (budget == j.end() || !budget->contains("components")) return;
  std::vector<BudgetComponent> rows;
  for (const auto& c : budget->at("components")) {
    BudgetComponent b;
    b.name = c.value("name", std::string{});
    const std::string type = c.value("type", std::string{"B"});
    b.exact = type == "exact";
    b.relative_percent = b.exact ? 0.0 : number(c, "relative_percent", path);
    b.type = type == "A" ? EvaluationType::A : EvaluationType::B;
    rows.push_back(std::move(b));
  }
  md << "```\n" << render_budget_table(combine_budget(std::move(rows))) << "```\n\n";
}

}  // namespace

int cmd_report(const ReportArgs& a, std::ostream& out) {
  if (!fs::is_directory(a.run_dir)) throw DataError(a.run_dir.string() + ": not a directory");
  const fs::path out_dir = a.out_dir.empty() ? a.run_dir / "report" : a.out_dir;
  const fs::path histogram = a.run_dir / "histogram.csv", saturation = a.run_dir / "saturation.csv",
                 sweep = a.run_dir / "efficiency_vs_flux.json", calibration = a.run_dir / "calibration.json";
  const bool any = fs::exists(histogram) || fs::exists(saturation) || fs::exists(sweep) || fs::exists(calibration);
  if (!any) {
    throw DataError(a.run_dir.string() +
                    ": no run artifacts (histogram.csv, saturation.csv, efficiency_vs_flux.json, calibration.json)");
  }
  Files files;
  std::ostringstream md;
  md << "# Run report\n\n";
  if (fs::exists(histogram)) g2_section(histogram, files, md);
  if (fs::exists(saturation)) saturation_section(saturation, files, md);
  if (fs::exists(calibration)) calibration_section(calibration, md);
  if (fs::exists(sweep)) efficiency_section(sweep, files, md);
  files["report.md"] = md.str();
  fs::create_directories(out_dir);
  for (const auto& [name, text] : files) write_text_file(out_dir / name, text);
  out << "wrote " << (out_dir / "report.md").string() << '\n';
  return kOk;
}

}  // namespace photonbench::cli
