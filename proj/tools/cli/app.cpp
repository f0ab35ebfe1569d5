#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>

#include "cli/cli.hpp"
#include "photonbench/errors.hpp"

namespace photonbench::cli {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Single-photon source simulation, HBT correlation and SPAD calibration", "photonbench"};
  app.require_subcommand(1);
  std::function<int()> action;

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate an emitter and write a photon stream");
  s->add_option("--config", sim.config, "Workbench config (JSON)")->required();
  s->add_option("--duration", sim.duration_s, "Acquisition time in s (overrides the config)")
      ->each([&](const std::string&) { sim.duration_set = true; });
  s->add_option("--out", sim.out, "Output stream (.ptms or .csv)")->required();
  s->add_option("--out-b", sim.out_b, "Second HBT arm when simulation.output is hbt");
  s->add_option("--seed", sim.seed, "Seed (overrides the config)")->check(CLI::NonNegativeNumber);
  s->add_option("--threads", sim.threads, "Worker threads (0 = automatic)");
  s->callback([&] { action = [&] { return cmd_simulate(sim, out); }; });

  CorrelateArgs cor;
  auto* c = app.add_subcommand("correlate", "Coincidence histogram of two streams");
  c->add_option("--start", cor.start, "Start stream")->required();
  c->add_option("--stop", cor.stop, "Stop stream")->required();
  c->add_option("--mode", cor.mode, "start_stop or full");
  c->add_option("--bin", cor.bin_ns, "Bin width in ns");
  c->add_option("--range", cor.range, "Delay range in ns as 'lo,hi' or a half-width");
  c->add_option("--out", cor.out, "Histogram CSV")->required();
  c->add_option("--g2-out", cor.g2_out, "Normalized g2 CSV (full mode)");
  c->add_option("--threads", cor.threads, "Worker threads (0 = automatic)");
  c->callback([&] { action = [&] { return cmd_correlate(cor, out); }; });

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit a g2 histogram or a saturation curve");
  f->add_option("--model", fit.model, "g2 or saturation")->check(CLI::IsMember({"g2", "saturation"}));
  f->add_option("--histogram", fit.histogram, "Histogram CSV (g2 model)");
  f->add_option("--points", fit.points, "power_uW,rate,stderr CSV (saturation model)");
  f->add_flag("--quench", fit.quench, "Include the high-power roll-off in the saturation model");
  f->add_option("--out", fit.out, "Fit report JSON");
  f->callback([&] { action = [&] { return cmd_fit(fit, out); }; });

  CalibrateArgs cal;
  auto* k = app.add_subcommand("calibrate", "SPAD detection efficiency from counts and reference voltages");
  k->add_option("--config", cal.config, "Workbench config (JSON)")->required();
  k->add_option("--spad-counts", cal.spad_counts, "gate_s,counts CSV")->required();
  k->add_option("--voltages", cal.voltages, "voltage_V CSV")->required();
  k->add_option("--out", cal.out, "Calibration result JSON");
  k->add_option("--budget-out", cal.budget_out, "Rendered budget table");
  k->callback([&] { action = [&] { return cmd_calibrate(cal, out); }; });

  BudgetArgs bud;
  auto* b = app.add_subcommand("budget", "Combine an uncertainty budget");
  b->add_option("--components", bud.components, "name,relative_percent,type CSV")->required();
  b->add_option("--out", bud.out, "Budget JSON");
  b->callback([&] { action = [&] { return cmd_budget(bud, out); }; });

  VarianceArgs var;
  auto* v = app.add_subcommand("variance-check", "Compare thinned flux variance with the binomial prediction");
  v->add_option("--stream", var.stream, "Emitted stream")->required();
  v->add_option("--eta", var.eta, "Overall efficiency")->required();
  v->add_option("--window", var.window_s, "Counting window in s");
  v->add_option("--seed", var.seed, "Seed")->required()->check(CLI::NonNegativeNumber);
  v->add_option("--out", var.out, "Report JSON");
  v->callback([&] { action = [&] { return cmd_variance_check(var, out); }; });

  SweepArgs swp;
  auto* w = app.add_subcommand("sweep", "Synthetic efficiency-versus-flux calibration series");
  w->add_option("--config", swp.config, "Workbench config (JSON)")->required();
  w->add_option("--powers-fW", swp.powers_fW, "Optical powers in fW")->delimiter(',');
  w->add_option("--out", swp.out, "Series JSON")->required();
  w->callback([&] { action = [&] { return cmd_sweep(swp, out); }; });

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate-calibration", "Write a synthetic SPAD/voltage data set");
  g->add_option("--config", gen.config, "Workbench config (JSON)")->required();
  g->add_option("--power-fW", gen.power_fW, "Optical power in fW");
  g->add_option("--out-dir", gen.out_dir, "Output directory")->required();
  g->callback([&] { action = [&] { return cmd_generate_calibration(gen, out); }; });

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Markdown report and plot tables from a run directory");
  r->add_option("--run-dir", rep.run_dir, "Run directory")->required();
  r->add_option("--out-dir", rep.out_dir, "Output directory (default <run-dir>/report)");
  r->callback([&] { action = [&] { return cmd_report(rep, out); }; });

  auto* p = app.add_subcommand("presets", "List the named scenario presets");
  p->callback([&] { action = [&] { return cmd_presets(out); }; });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kData;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace photonbench::cli
