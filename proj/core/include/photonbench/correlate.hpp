#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "photonbench/stream.hpp"

namespace photonbench {

enum class HistogramMode { StartStop, Full };

std::string_view to_string(HistogramMode mode);
HistogramMode parse_histogram_mode(std::string_view name);

/// Coincidence counts over half-open delay bins [t_min + k·w, t_min + (k+1)·w).
struct Histogram {
  HistogramMode mode = HistogramMode::Full;
  double bin_width_ns = 0.1;
  double t_min_ns = 0.0;
  double t_max_ns = 0.0;
  std::vector<std::uint64_t> counts;
  std::uint64_t n_starts = 0;
  std::uint64_t n_stops = 0;
  double acquisition_duration_s = 0.0;

  std::size_t bin_count() const { return counts.size(); }
  double bin_center_ns(std::size_t k) const { return t_min_ns + (static_cast<double>(k) + 0.5) * bin_width_ns; }
  std::uint64_t total() const;
  void validate() const;
};

struct CorrelateOptions {
  /// Start events per work chunk; 0 processes the start stream in one piece.
  std::size_t chunk_events = std::size_t{1} << 16;
  unsigned threads = 0;
};

/// Single-stop histogram: each start contributes at most one positive delay
/// (the first stop at or after max(t_min, 0)) and at most one negative delay
/// (the latest stop before min(t_max, 0)).
Histogram start_stop_histogram(const PhotonStream& start, const PhotonStream& stop, double bin_width_ns,
                               double t_min_ns, double t_max_ns, const CorrelateOptions& options = {});

/// All pairs with stop - start in [t_min, t_max). Passing the same stream
/// object twice excludes the zero-lag self pairs.
Histogram full_correlation(const PhotonStream& a, const PhotonStream& b, double bin_width_ns, double t_min_ns,
                           double t_max_ns, const CorrelateOptions& options = {});

struct G2Point {
  double t_ns;
  double g2;
  double stderr_g2;
};

/// counts·T/(n_starts·n_stops·w) with Poisson bin errors. Full mode only.
std::vector<G2Point> normalize_g2(const Histogram& h);

}  // namespace photonbench
