#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "photonbench/detectors.hpp"

namespace photonbench {

enum class EvaluationType { A, B };

struct BudgetComponent {
  std::string name;
  double relative_percent = 0.0;
  EvaluationType type = EvaluationType::B;
  bool exact = false;  ///< defined constant; listed but contributes nothing
};

struct UncertaintyBudget {
  std::vector<BudgetComponent> components;
  double combined_percent = 0.0;
};

/// Root-sum-square of the relative components.
UncertaintyBudget combine_budget(std::vector<BudgetComponent> components);

/// Two-column text table: source of uncertainty, standard uncertainty (%) and type.
std::string render_budget_table(const UncertaintyBudget& budget);

/// Relative type-B uncertainties (%) of the calibration inputs.
struct TypeBUncertainties {
  double wavelength = 0.008;
  double responsivity = 0.400;
  double gain = 0.100;
  double linearity = 0.030;
  double source_stability = 1.5;        ///< flux change between the sequential SPAD and reference readings
  std::optional<double> dead_time_model;  ///< listed only when set
};

struct SpadGate {
  double duration_s;
  std::uint64_t counts;
};

struct CalibrationInput {
  std::vector<SpadGate> spad_counts;
  double spad_dark_cps = 0.0;
  std::vector<double> voltages;
  AnalogConfig analog;
  double wavelength_nm = 785.6;
  double spad_dead_time_ns = 0.0;
  DeadTimeModel dead_time_model = DeadTimeModel::NonParalyzable;
  TypeBUncertainties type_b;

  void validate() const;
};

struct CalibrationResult {
  double eta_spad = 0.0;
  double u_combined_percent = 0.0;
  double u_absolute = 0.0;
  double n_ref = 0.0;        ///< photons/s
  double phi_s_W = 0.0;
  double spad_rate = 0.0;    ///< corrected counts/s
  double mean_voltage_V = 0.0;
  UncertaintyBudget budget;
};

/// N_ref = V·(1 - F_Lin)·λ/(G·s·h·c).
double reference_flux(double mean_voltage_V, const AnalogConfig& cfg, double wavelength_nm);

/// Mean gate rate, dark subtracted, then dead-time corrected.
double spad_rate(const CalibrationInput& input);

CalibrationResult spad_efficiency(const CalibrationInput& input);

std::vector<CalibrationResult> efficiency_vs_flux(const std::vector<CalibrationInput>& series);

/// Synthetic sequential measurement of one source setting.
struct CalibrationScenario {
  double optical_power_W = 193e-15;
  double wavelength_nm = 785.6;
  SpadConfig spad{0.603, 22.0, DeadTimeModel::NonParalyzable, 100.0, 0.4};
  AnalogConfig analog;
  std::size_t n_voltage_samples = 1000;
  std::size_t n_gates = 10;
  double gate_s = 1.0;
  /// Relative standard deviation of the source flux between the two readings.
  double source_drift = 0.015;
  TypeBUncertainties type_b;
};

CalibrationInput synthesize_calibration(const CalibrationScenario& scenario, std::uint64_t seed);

}  // namespace photonbench
