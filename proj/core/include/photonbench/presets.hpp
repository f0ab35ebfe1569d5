#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "photonbench/detectors.hpp"
#include "photonbench/photophysics.hpp"

namespace photonbench {

/// Named operating point. The emitter constants are tuned so that the
/// collected rate (emitter plus uncorrelated background) and the fitted g2(0)
/// seen through `hbt_spad` at 0.25 ns bins land on the listed targets.
struct Preset {
  std::string name;
  double temperature_K;
  double pump_power_uW;
  double target_rate_cps;
  double target_g2_zero;
  double target_g2_err;
  EmitterParams emitter;
  double background_cps;
  SpadConfig hbt_spad;
};

const std::vector<Preset>& presets();

/// Throws ConfigError listing the known names.
const Preset& find_preset(std::string_view name);

}  // namespace photonbench
