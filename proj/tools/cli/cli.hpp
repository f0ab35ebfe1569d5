#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace photonbench::cli {

/// Exit codes.
enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

int run_cli(int argc, char** argv);
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct SimulateArgs {
  std::filesystem::path config;
  double duration_s = 0.0;
  bool duration_set = false;
  std::filesystem::path out;
  std::filesystem::path out_b;
  long long seed = -1;
  unsigned threads = 0;
};

struct CorrelateArgs {
  std::filesystem::path start;
  std::filesystem::path stop;
  std::string mode = "start_stop";
  double bin_ns = 0.25;
  std::string range = "-500,500";
  std::filesystem::path out;
  std::filesystem::path g2_out;
  unsigned threads = 0;
};

struct FitArgs {
  std::string model = "g2";
  std::filesystem::path histogram;
  std::filesystem::path points;
  bool quench = false;
  std::filesystem::path out;
};

struct CalibrateArgs {
  std::filesystem::path config;
  std::filesystem::path spad_counts;
  std::filesystem::path voltages;
  std::filesystem::path out;
  std::filesystem::path budget_out;
};

struct BudgetArgs {
  std::filesystem::path components;
  std::filesystem::path out;
};

struct VarianceArgs {
  std::filesystem::path stream;
  double eta = 0.5;
  double window_s = 1e-3;
  long long seed = -1;
  std::filesystem::path out;
};

struct SweepArgs {
  std::filesystem::path config;
  std::vector<double> powers_fW{36.5, 50.0, 75.0, 100.0, 150.0, 193.0, 250.0, 300.0, 334.0};
  std::filesystem::path out;
};

struct GenerateArgs {
  std::filesystem::path config;
  double power_fW = 193.0;
  std::filesystem::path out_dir;
};

struct ReportArgs {
  std::filesystem::path run_dir;
  std::filesystem::path out_dir;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out);
int cmd_correlate(const CorrelateArgs& a, std::ostream& out);
int cmd_fit(const FitArgs& a, std::ostream& out);
int cmd_calibrate(const CalibrateArgs& a, std::ostream& out);
int cmd_budget(const BudgetArgs& a, std::ostream& out);
int cmd_variance_check(const VarianceArgs& a, std::ostream& out);
int cmd_sweep(const SweepArgs& a, std::ostream& out);
int cmd_generate_calibration(const GenerateArgs& a, std::ostream& out);
int cmd_report(const ReportArgs& a, std::ostream& out);
int cmd_presets(std::ostream& out);

}  // namespace photonbench::cli
