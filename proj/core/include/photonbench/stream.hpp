#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "photonbench/photophysics.hpp"

namespace photonbench {

using Tick = std::uint64_t;

/// Sorted event timestamps on a fixed tick grid.
struct PhotonStream {
  std::uint64_t resolution_ps = 1;   ///< duration of one tick
  Tick duration_ticks = 0;           ///< acquisition span
  std::vector<Tick> timestamps;      ///< non-decreasing, each <= duration_ticks
  std::optional<std::uint8_t> channel_label;

  std::size_t size() const { return timestamps.size(); }
  bool empty() const { return timestamps.empty(); }
  double duration_s() const { return static_cast<double>(duration_ticks) * resolution_ps * 1e-12; }
  double mean_rate() const { return duration_ticks == 0 ? 0.0 : size() / duration_s(); }

  /// Throws DataError when an invariant is violated.
  void validate() const;
};

bool operator==(const PhotonStream& a, const PhotonStream& b);

/// Number of ticks spanning `seconds`, rejecting values that overflow.
Tick seconds_to_ticks(double seconds, std::uint64_t resolution_ps);

/// Multiplicative pump modulation, linear between (time_s, factor) knots and
/// constant outside them.
struct PumpModulation {
  std::vector<std::pair<double, double>> knots;

  double factor(double time_s) const;
  double max_factor() const;
  void validate() const;
};

struct SimulationOptions {
  std::uint64_t resolution_ps = 1;
  /// Length of independently seeded segments. Part of the seed derivation:
  /// changing it changes the stream.
  double segment_s = 0.1;
  unsigned threads = 0;  ///< 0 = worker_count()
  std::optional<PumpModulation> drift;
};

/// Continuous-time Markov-chain simulation of collected emission times.
PhotonStream simulate_emission(const EmitterParams& params, double duration_s, std::uint64_t seed,
                               const SimulationOptions& options = {});

/// Homogeneous Poisson events at `rate_cps`.
PhotonStream poisson_stream(double rate_cps, double duration_s, std::uint64_t seed,
                            std::uint64_t resolution_ps = 1);

/// One event every `period_s`, the first at `period_s / 2`.
PhotonStream equispaced_stream(double period_s, double duration_s, std::uint64_t resolution_ps = 1);

/// Independent Bernoulli(eta) selection of each event.
PhotonStream thin(const PhotonStream& stream, double eta, std::uint64_t seed);

/// Sorted union; ties keep events of `a` first.
PhotonStream merge(const PhotonStream& a, const PhotonStream& b);

/// Counts per contiguous window of `dt_s`; a trailing partial window is dropped.
std::vector<std::uint64_t> window_counts(const PhotonStream& stream, double dt_s);

struct VarianceReport {
  double window_s = 0.0;
  std::size_t n_windows = 0;
  double mean_measured_flux = 0.0;   ///< ⟨N⟩, 1/s
  double var_measured_flux = 0.0;    ///< (ΔN)², 1/s²
  double predicted_var = 0.0;        ///< η²(Δn)² + η(1-η)⟨n⟩/Δt
  double eta_used = 0.0;
  double mean_emitted_flux = 0.0;    ///< ⟨n⟩
  double var_emitted_flux = 0.0;     ///< (Δn)²
  double z_score = 0.0;
};

/// Thins `emitted` with `eta` and compares the windowed flux variance of the
/// result against the binomial-thinning prediction. The z-score uses the
/// sampling variance of the measured variance conditional on the emitted
/// window counts.
VarianceReport variance_check(const PhotonStream& emitted, double eta, double dt_s,
                              std::uint64_t seed);

}  // namespace photonbench
