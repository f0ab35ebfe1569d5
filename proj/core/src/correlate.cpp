#include "photonbench/correlate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "photonbench/errors.hpp"
#include "photonbench/parallel.hpp"

namespace photonbench {

std::string_view to_string(HistogramMode mode) {
  return mode == HistogramMode::Full ? "full" : "start_stop";
}

HistogramMode parse_histogram_mode(std::string_view name) {
  if (name == "full") return HistogramMode::Full;
  if (name == "start_stop" || name == "start-stop" || name == "startstop") return HistogramMode::StartStop;
  throw ConfigError("unknown histogram mode '" + std::string(name) + "' (expected full or start_stop)");
}

std::uint64_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

void Histogram::validate() const {
  if (!(bin_width_ns > 0.0)) throw DataError("histogram: bin width must be > 0");
  if (!(t_max_ns > t_min_ns)) throw DataError("histogram: t_max must exceed t_min");
  const double bins = (t_max_ns - t_min_ns) / bin_width_ns;
  if (std::abs(bins - std::round(bins)) > 1e-6 * std::max(1.0, bins)) {
    throw DataError("histogram: range is not an integral number of bins");
  }
  if (counts.size() != static_cast<std::size_t>(std::llround(bins))) {
    throw DataError("histogram: " + std::to_string(counts.size()) + " bins present, range implies " +
                    std::to_string(std::llround(bins)));
  }
}

namespace {

struct Grid {
  std::int64_t width;
  std::int64_t lo;
  std::int64_t hi;
  std::size_t bins;
};

std::int64_t to_ticks(double ns, std::uint64_t resolution_ps, const char* what) {
  const double ticks = ns * 1e3 / static_cast<double>(resolution_ps);
  const double r = std::round(ticks);
  if (std::abs(ticks - r) > 1e-6 * std::max(1.0, std::abs(ticks))) {
    throw ConfigError(std::string(what) + " = " + std::to_string(ns) + " ns is not a whole number of " +
                      std::to_string(resolution_ps) + " ps ticks");
  }
  return static_cast<std::int64_t>(r);
}

Grid make_grid(const PhotonStream& a, const PhotonStream& b, double bin_width_ns, double t_min_ns,
               double t_max_ns) {
  if (a.resolution_ps != b.resolution_ps) {
    throw DataError("correlate: resolution mismatch (" + std::to_string(a.resolution_ps) + " ps vs " +
                    std::to_string(b.resolution_ps) + " ps)");
  }
  if (!(bin_width_ns > 0.0)) throw ConfigError("correlate: bin width must be > 0");
  if (!(t_max_ns > t_min_ns)) throw ConfigError("correlate: empty delay range (t_max <= t_min)");
  Grid g;
  g.width = to_ticks(bin_width_ns, a.resolution_ps, "bin width");
  g.lo = to_ticks(t_min_ns, a.resolution_ps, "t_min");
  g.hi = to_ticks(t_max_ns, a.resolution_ps, "t_max");
  if (g.width <= 0) throw ConfigError("correlate: bin width is below the tick resolution");
  if ((g.hi - g.lo) % g.width != 0) throw ConfigError("correlate: range is not an integral number of bins");
  g.bins = static_cast<std::size_t>((g.hi - g.lo) / g.width);
  return g;
}

Histogram empty_histogram(HistogramMode mode, const PhotonStream& a, const PhotonStream& b, const Grid& g,
                          double bin_width_ns, double t_min_ns, double t_max_ns) {
  Histogram h;
  h.mode = mode;
  h.bin_width_ns = bin_width_ns;
  h.t_min_ns = t_min_ns;
  h.t_max_ns = t_max_ns;
  h.counts.assign(g.bins, 0);
  h.n_starts = a.size();
  h.n_stops = b.size();
  h.acquisition_duration_s = std::max(a.duration_s(), b.duration_s());
  return h;
}

// Splits the start stream into chunks, fills one partial histogram per chunk
// and sums them; integer addition makes the result independent of chunking.
template <typename Kernel>
void run_chunked(std::size_t n_starts, const CorrelateOptions& options, std::vector<std::uint64_t>& counts,
                 Kernel kernel) {
  const std::size_t chunk = options.chunk_events == 0 ? std::max<std::size_t>(n_starts, 1) : options.chunk_events;
  const std::size_t n_chunks = (n_starts + chunk - 1) / chunk;
  if (n_chunks <= 1) {
    kernel(0, n_starts, counts.data());
    return;
  }
  const unsigned workers = worker_count(options.threads);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) kernel(c * chunk, std::min(n_starts, (c + 1) * chunk), counts.data());
    return;
  }
  const std::size_t groups = std::min<std::size_t>(n_chunks, workers);
  std::vector<std::vector<std::uint64_t>> partial(groups, std::vector<std::uint64_t>(counts.size(), 0));
  parallel_for(groups, workers, [&](std::size_t g) {
    for (std::size_t c = g; c < n_chunks; c += groups) {
      kernel(c * chunk, std::min(n_starts, (c + 1) * chunk), partial[g].data());
    }
  });
  for (const auto& p : partial) {
    for (std::size_t k = 0; k < counts.size(); ++k) counts[k] += p[k];
  }
}

}  // namespace

Histogram full_correlation(const PhotonStream& a, const PhotonStream& b, double bin_width_ns, double t_min_ns,
                           double t_max_ns, const CorrelateOptions& options) {
  const Grid g = make_grid(a, b, bin_width_ns, t_min_ns, t_max_ns);
  Histogram h = empty_histogram(HistogramMode::Full, a, b, g, bin_width_ns, t_min_ns, t_max_ns);
  const bool self = &a == &b || (a.timestamps.data() == b.timestamps.data() && a.size() == b.size());
  const auto& A = a.timestamps;
  const auto& B = b.timestamps;

  run_chunked(A.size(), options, h.counts, [&](std::size_t first, std::size_t last, std::uint64_t* out) {
    if (first >= last || B.empty()) return;
    auto lower_for = [&](std::size_t i) {
      const std::int64_t edge = static_cast<std::int64_t>(A[i]) + g.lo;
      return edge <= 0 ? std::size_t{0}
                       : static_cast<std::size_t>(std::lower_bound(B.begin(), B.end(), static_cast<Tick>(edge)) - B.begin());
    };
    std::size_t j0 = lower_for(first);
    for (std::size_t i = first; i < last; ++i) {
      const auto ai = static_cast<std::int64_t>(A[i]);
      const std::int64_t lo = ai + g.lo;
      const std::int64_t hi = ai + g.hi;
      while (j0 < B.size() && static_cast<std::int64_t>(B[j0]) < lo) ++j0;
      for (std::size_t j = j0; j < B.size(); ++j) {
        const auto bj = static_cast<std::int64_t>(B[j]);
        if (bj >= hi) break;
        if (self && j == i) continue;
        ++out[static_cast<std::size_t>((bj - lo) / g.width)];
      }
    }
  });
  return h;
}

Histogram start_stop_histogram(const PhotonStream& start, const PhotonStream& stop, double bin_width_ns,
                               double t_min_ns, double t_max_ns, const CorrelateOptions& options) {
  const Grid g = make_grid(start, stop, bin_width_ns, t_min_ns, t_max_ns);
  Histogram h = empty_histogram(HistogramMode::StartStop, start, stop, g, bin_width_ns, t_min_ns, t_max_ns);
  const bool self = &start == &stop || (start.timestamps.data() == stop.timestamps.data() && start.size() == stop.size());
  const auto& S = start.timestamps;
  const auto& B = stop.timestamps;
  const bool positive = g.hi > 0;
  const bool negative = g.lo < 0;
  const std::int64_t pos_lo = std::max<std::int64_t>(g.lo, 0);
  const std::int64_t neg_hi = std::min<std::int64_t>(g.hi, 0);

  run_chunked(S.size(), options, h.counts, [&](std::size_t first, std::size_t last, std::uint64_t* out) {
    if (first >= last || B.empty()) return;
    // First index with B[j] >= edge, maintained monotonically.
    auto seek = [&](std::size_t j, std::int64_t edge) {
      if (edge <= 0) return j;
      while (j < B.size() && static_cast<std::int64_t>(B[j]) < edge) ++j;
      return j;
    };
    auto initial = [&](std::int64_t edge) {
      return edge <= 0 ? std::size_t{0}
                       : static_cast<std::size_t>(std::lower_bound(B.begin(), B.end(), static_cast<Tick>(edge)) - B.begin());
    };
    const auto s0 = static_cast<std::int64_t>(S[first]);
    std::size_t jp = initial(s0 + pos_lo);
    std::size_t jn = initial(s0 + neg_hi);
    for (std::size_t i = first; i < last; ++i) {
      const auto si = static_cast<std::int64_t>(S[i]);
      const std::int64_t lo = si + g.lo;
      if (positive) {
        jp = seek(jp, si + pos_lo);
        std::size_t j = jp;
        if (self && j == i) ++j;
        if (j < B.size()) {
          const auto bj = static_cast<std::int64_t>(B[j]);
          if (bj < si + g.hi) ++out[static_cast<std::size_t>((bj - lo) / g.width)];
        }
      }
      if (negative) {
        jn = seek(jn, si + neg_hi);
        if (jn > 0) {
          const auto bj = static_cast<std::int64_t>(B[jn - 1]);
          if (bj >= lo) ++out[static_cast<std::size_t>((bj - lo) / g.width)];
        }
      }
    }
  });
  return h;
}

std::vector<G2Point> normalize_g2(const Histogram& h) {
  if (h.mode != HistogramMode::Full) {
    throw DataError("normalize_g2: start-stop histograms are not valid g2 estimators; use full mode");
  }
  if (h.n_starts == 0 || h.n_stops == 0 || !(h.acquisition_duration_s > 0.0)) {
    throw DataError("normalize_g2: n_starts, n_stops and acquisition duration must be > 0");
  }
  const double scale = h.acquisition_duration_s /
                       (static_cast<double>(h.n_starts) * static_cast<double>(h.n_stops) * h.bin_width_ns * 1e-9);
  std::vector<G2Point> out;
  out.reserve(h.bin_count());
  for (std::size_t k = 0; k < h.bin_count(); ++k) {
    const double c = static_cast<double>(h.counts[k]);
    out.push_back({h.bin_center_ns(k), c * scale, std::sqrt(c) * scale});
  }
  return out;
}

}  // namespace photonbench
