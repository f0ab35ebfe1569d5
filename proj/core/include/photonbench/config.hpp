#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "photonbench/calibrate.hpp"
#include "photonbench/correlate.hpp"
#include "photonbench/detectors.hpp"
#include "photonbench/stream.hpp"

namespace photonbench {

enum class SimulationOutput { Emission, Detected, Hbt };

struct SimulationSettings {
  double duration_s = 1.0;
  std::uint64_t resolution_ps = 1;
  double segment_s = 0.1;
  double background_cps = 0.0;  ///< uncorrelated light added to the collected stream
  std::optional<PumpModulation> drift;
  SimulationOutput output = SimulationOutput::Emission;
};

struct CorrelatorSettings {
  HistogramMode mode = HistogramMode::StartStop;
  double bin_width_ns = 0.25;
  double t_min_ns = -500.0;
  double t_max_ns = 500.0;
};

struct CalibrationSettings {
  double wavelength_nm = 785.6;
  double spad_dark_cps = 100.0;
  double spad_dead_time_ns = 22.0;
  DeadTimeModel dead_time_model = DeadTimeModel::NonParalyzable;
  TypeBUncertainties type_b;
  // Synthetic measurement plan used by generate-calibration and sweep.
  std::size_t n_voltage_samples = 1000;
  std::size_t n_gates = 10;
  double gate_s = 1.0;
  double source_drift = 0.015;
};

struct WorkbenchConfig {
  EmitterParams emitter;
  std::array<SpadConfig, 2> spad{};
  AnalogConfig analog;
  SimulationSettings simulation;
  CorrelatorSettings correlator;
  CalibrationSettings calibration;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scenario_preset;

  void validate() const;
  /// Throws ConfigError when no seed is configured.
  std::uint64_t require_seed() const;
};

/// Strict parse: unknown keys and wrong types are ConfigErrors naming the
/// field path. A `scenario_preset` is applied first and explicit fields
/// override it.
WorkbenchConfig parse_config(const nlohmann::json& j);
WorkbenchConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const WorkbenchConfig& cfg);

}  // namespace photonbench
