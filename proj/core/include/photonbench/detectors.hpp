#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "photonbench/stream.hpp"

namespace photonbench {

enum class DeadTimeModel { NonParalyzable, Paralyzable };

std::string_view to_string(DeadTimeModel model);
/// Accepts "non_paralyzable" / "paralyzable" (case-insensitive, '-' or '_').
DeadTimeModel parse_dead_time_model(std::string_view name);

struct SpadConfig {
  double efficiency = 0.65;
  double dead_time_ns = 22.0;
  DeadTimeModel dead_time_model = DeadTimeModel::NonParalyzable;
  double dark_rate_cps = 100.0;
  double jitter_fwhm_ns = 0.4;

  void validate() const;
};

/// Photodiode plus transimpedance amplifier.
struct AnalogConfig {
  double responsivity_A_per_W = 0.5752;
  double gain_V_per_A = 1e12;
  double nep_W_per_rtHz = 0.7e-15;
  double integration_time_s = 5.2e-5;  ///< per voltage sample
  double linearity_correction = 0.0;   ///< F_Lin

  void validate() const;
  /// σ of one voltage sample, noise bandwidth 1/(2T).
  double voltage_noise_V() const;
};

/// Thinning, dark clicks, Gaussian jitter on photon clicks, then dead time.
PhotonStream detect_spad(const PhotonStream& stream, const SpadConfig& cfg, std::uint64_t seed);

PhotonStream apply_dead_time(const PhotonStream& stream, double dead_time_ns, DeadTimeModel model);

/// Inverts the expected rate loss of `model`. Throws NumericalError when no
/// physical solution exists.
double dead_time_correct(double measured_rate_cps, double dead_time_ns, DeadTimeModel model);

/// Routes each event to one of two arms with probability 1/2.
std::pair<PhotonStream, PhotonStream> hbt_split(const PhotonStream& stream, std::uint64_t seed);

std::vector<double> read_analog(double mean_power_W, const AnalogConfig& cfg, std::size_t n_samples,
                                std::uint64_t seed);

}  // namespace photonbench
