#pragma once

#include <nlohmann/json.hpp>

#include "photonbench/calibrate.hpp"
#include "photonbench/fit.hpp"
#include "photonbench/stream.hpp"

namespace photonbench {

nlohmann::json to_json(const G2FitResult& r);
nlohmann::json to_json(const SaturationFitResult& r);
nlohmann::json to_json(const UncertaintyBudget& b);
nlohmann::json to_json(const CalibrationResult& r);
nlohmann::json to_json(const VarianceReport& r);

}  // namespace photonbench
