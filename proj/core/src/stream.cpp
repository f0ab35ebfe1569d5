#include "photonbench/stream.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "photonbench/errors.hpp"
#include "photonbench/parallel.hpp"
#include "photonbench/random.hpp"

namespace photonbench {

void PhotonStream::validate() const {
  if (resolution_ps == 0) throw DataError("stream resolution must be > 0");
  if (!std::is_sorted(timestamps.begin(), timestamps.end())) {
    throw DataError("stream timestamps are not sorted");
  }
  if (!timestamps.empty() && timestamps.back() > duration_ticks) {
    throw DataError("stream timestamp exceeds duration_ticks");
  }
}

bool operator==(const PhotonStream& a, const PhotonStream& b) {
  return a.resolution_ps == b.resolution_ps && a.duration_ticks == b.duration_ticks &&
         a.timestamps == b.timestamps && a.channel_label == b.channel_label;
}

Tick seconds_to_ticks(double seconds, std::uint64_t resolution_ps) {
  if (resolution_ps == 0) throw ConfigError("resolution_ps must be > 0");
  if (!(seconds >= 0.0) || !std::isfinite(seconds)) throw ConfigError("duration must be finite and >= 0");
  const long double ticks = static_cast<long double>(seconds) * 1e12L / resolution_ps;
  if (ticks >= static_cast<long double>(std::numeric_limits<std::int64_t>::max())) {
    throw ConfigError("duration overflows the 64-bit tick range at this resolution");
  }
  return static_cast<Tick>(std::llround(ticks));
}

double PumpModulation::factor(double time_s) const {
  if (knots.empty()) return 1.0;
  if (time_s <= knots.front().first) return knots.front().second;
  if (time_s >= knots.back().first) return knots.back().second;
  auto hi = std::upper_bound(knots.begin(), knots.end(), time_s,
                             [](double t, const auto& k) { return t < k.first; });
  auto lo = std::prev(hi);
  const double span = hi->first - lo->first;
  if (span <= 0.0) return hi->second;
  const double w = (time_s - lo->first) / span;
  return lo->second + w * (hi->second - lo->second);
}

double PumpModulation::max_factor() const {
  double m = knots.empty() ? 1.0 : 0.0;
  for (const auto& k : knots) m = std::max(m, k.second);
  return m;
}

void PumpModulation::validate() const {
  if (knots.empty()) throw ConfigError("drift: at least one knot required");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!(knots[i].second >= 0.0)) throw ConfigError("drift: factors must be >= 0");
    if (i > 0 && knots[i].first < knots[i - 1].first) {
      throw ConfigError("drift: knot times must be non-decreasing");
    }
  }
}

namespace {

// State shared by the per-segment simulators. Times inside a segment are
// double nanoseconds measured from `origin`, an integer tick that lies a
// burn-in interval before the segment start.
struct Segment {
  std::int64_t origin = 0;
  Tick start = 0;
  Tick end = 0;
  double ticks_per_ns = 1000.0;
  double resolution_ps = 1.0;

  std::int64_t tick_of(double t_ns) const {
    return origin + static_cast<std::int64_t>(std::floor(t_ns * ticks_per_ns));
  }
  double absolute_s(double t_ns) const {
    return static_cast<double>(origin) * resolution_ps * 1e-12 + t_ns * 1e-9;
  }
};

// Pushes an event; returns false once the segment end has been reached.
bool record(const Segment& seg, double t_ns, std::vector<Tick>& out) {
  const std::int64_t tick = seg.tick_of(t_ns);
  if (tick >= static_cast<std::int64_t>(seg.end)) return false;
  if (tick >= static_cast<std::int64_t>(seg.start)) out.push_back(static_cast<Tick>(tick));
  return true;
}

// CW pumping with a constant rate. The emitted sequence is a renewal process:
// between two collected photons there are K ~ Geometric(pc) complete cycles,
// each an Exp(P) ground wait plus an Exp(1/τ) excited decay, and the
// uncollected decays visit the triplet independently. Summing those
// exponentials as Gamma variates is exact and costs O(1) per collected photon.
void simulate_cw_renewal(const EmitterParams& p, const Segment& seg, CounterRng& rng,
                         std::vector<Tick>& out) {
  const double pump = effective_pump_rate(p);
  const double decay = 1.0 / p.tau_excited_ns;
  const double pc = p.collected_photon_probability();
  if (pump <= 0.0 || pc <= 0.0) return;
  const double triplet_given_miss = pc < 1.0 ? p.isc_yield / (1.0 - pc) : 0.0;
  const double triplet_rate = p.isc_yield > 0.0 ? 1.0 / (p.tau_triplet_us * 1e3) : 0.0;

  double t = 0.0;
  for (;;) {
    const std::uint64_t cycles = geometric(rng, pc);
    if (cycles == std::numeric_limits<std::uint64_t>::max()) return;
    const double k = static_cast<double>(cycles);
    t += gamma_variate(rng, k, pump) + gamma_variate(rng, k, decay);
    if (triplet_given_miss > 0.0 && cycles > 1) {
      std::uint64_t visits = 0;
      for (std::uint64_t pos = geometric(rng, triplet_given_miss); pos < cycles;
           pos += geometric(rng, triplet_given_miss)) {
        ++visits;
      }
      if (visits > 0) t += gamma_variate(rng, static_cast<double>(visits), triplet_rate);
    }
    if (!record(seg, t, out)) return;
  }
}

// CW pumping with a time-dependent pump: explicit cycle-by-cycle CTMC, with
// the ground-state wait drawn by thinning against the peak pump rate.
void simulate_cw_modulated(const EmitterParams& p, const PumpModulation& drift, const Segment& seg,
                           CounterRng& rng, std::vector<Tick>& out) {
  const auto& cw = std::get<CwPump>(p.pump);
  const double bound = cw.pump_rate_per_ns * drift.max_factor();
  const double decay = 1.0 / p.tau_excited_ns;
  const double pc = p.collected_photon_probability();
  if (bound <= 0.0 || pc <= 0.0) return;
  const double triplet_rate = p.isc_yield > 0.0 ? 1.0 / (p.tau_triplet_us * 1e3) : 0.0;

  auto pump_at = [&](double t_ns) {
    const double power = cw.power_uW() * drift.factor(seg.absolute_s(t_ns));
    double rate = cw.kappa_per_ns_uW * power;
    if (p.quench) rate /= 1.0 + std::pow(power / p.quench->p_q_uW, p.quench->exponent);
    return rate;
  };

  double t = 0.0;
  for (;;) {
    do {
      t += exponential(rng, bound);
      if (seg.tick_of(t) >= static_cast<std::int64_t>(seg.end)) return;
    } while (uniform01(rng) * bound >= pump_at(t));
    t += exponential(rng, decay);
    const double u = uniform01(rng);
    if (u < p.isc_yield) {
      t += exponential(rng, triplet_rate);
    } else if (u < p.isc_yield + pc) {
      if (!record(seg, t, out)) return;
    }
  }
}

// Pulsed pumping on the absolute grid k/f. The emitter can only be excited by
// a pulse while in the ground state.
void simulate_pulsed(const EmitterParams& p, const std::optional<PumpModulation>& drift,
                     const Segment& seg, CounterRng& rng, std::vector<Tick>& out) {
  const auto& pulsed = std::get<PulsedPump>(p.pump);
  const double period_ns = 1e3 / pulsed.rep_rate_MHz;
  const double decay = 1.0 / p.tau_excited_ns;
  const double pc = p.collected_photon_probability();
  const double triplet_rate = p.isc_yield > 0.0 ? 1.0 / (p.tau_triplet_us * 1e3) : 0.0;
  if (pc <= 0.0 || pulsed.p_exc <= 0.0) return;
  if (drift && drift->max_factor() <= 0.0) return;

  // Offset of the first pulse at or after the origin.
  const long double origin_ns = static_cast<long double>(seg.origin) * seg.resolution_ps / 1e3L;
  const long double first_index = std::ceil(origin_ns / period_ns);
  const double offset_ns = static_cast<double>(first_index * period_ns - origin_ns);

  double t_free = 0.0;
  for (;;) {
    double j = std::max(0.0, std::ceil((t_free - offset_ns) / period_ns));
    if (!drift) {
      const std::uint64_t wait = geometric(rng, pulsed.p_exc);
      if (wait == std::numeric_limits<std::uint64_t>::max()) return;
      j += static_cast<double>(wait - 1);
    } else {
      for (;;) {
        const double tp = offset_ns + j * period_ns;
        if (seg.tick_of(tp) >= static_cast<std::int64_t>(seg.end)) return;
        const double pe = std::min(1.0, pulsed.p_exc * drift->factor(seg.absolute_s(tp)));
        if (bernoulli(rng, pe)) break;
        j += 1.0;
      }
    }
    const double excited_at = offset_ns + j * period_ns;
    if (seg.tick_of(excited_at) >= static_cast<std::int64_t>(seg.end)) return;
    const double decayed_at = excited_at + exponential(rng, decay);
    const double u = uniform01(rng);
    t_free = decayed_at;
    if (u < p.isc_yield) {
      t_free += exponential(rng, triplet_rate);
    } else if (u < p.isc_yield + pc) {
      if (!record(seg, decayed_at, out)) return;
    }
  }
}

double burn_in_ns(const EmitterParams& p) {
  double ns = 20.0 * p.tau_excited_ns;
  if (const auto* cw = std::get_if<CwPump>(&p.pump)) {
    const double pump = cw->pump_rate_per_ns;
    if (pump > 0.0) ns += 20.0 / pump;
  } else {
    ns += 20.0 * 1e3 / std::get<PulsedPump>(p.pump).rep_rate_MHz;
  }
  if (p.isc_yield > 0.0) ns += 20.0 * p.tau_triplet_us * 1e3;
  return ns;
}

}  // namespace

PhotonStream simulate_emission(const EmitterParams& params, double duration_s, std::uint64_t seed,
                               const SimulationOptions& options) {
  params.validate();
  if (options.resolution_ps == 0) throw ConfigError("resolution_ps must be > 0");
  if (!(duration_s > 0.0)) throw ConfigError("simulation duration must be > 0");
  if (!(options.segment_s > 0.0)) throw ConfigError("segment_s must be > 0");
  if (options.drift) options.drift->validate();

  PhotonStream stream;
  stream.resolution_ps = options.resolution_ps;
  stream.duration_ticks = seconds_to_ticks(duration_s, options.resolution_ps);
  const Tick segment_ticks = std::max<Tick>(1, seconds_to_ticks(options.segment_s, options.resolution_ps));
  const std::size_t n_segments =
      static_cast<std::size_t>((stream.duration_ticks + segment_ticks - 1) / segment_ticks);
  const double burn_ns = burn_in_ns(params);
  const auto burn_ticks = static_cast<std::int64_t>(std::ceil(burn_ns * 1e3 / options.resolution_ps));

  std::vector<std::vector<Tick>> parts(n_segments);
  parallel_for(n_segments, worker_count(options.threads), [&](std::size_t i) {
    Segment seg;
    seg.start = static_cast<Tick>(i) * segment_ticks;
    seg.end = std::min<Tick>(seg.start + segment_ticks, stream.duration_ticks);
    seg.origin = static_cast<std::int64_t>(seg.start) - burn_ticks;
    seg.resolution_ps = static_cast<double>(options.resolution_ps);
    seg.ticks_per_ns = 1e3 / seg.resolution_ps;
    CounterRng rng(seed, i);
    auto& out = parts[i];
    if (std::holds_alternative<PulsedPump>(params.pump)) {
      simulate_pulsed(params, options.drift, seg, rng, out);
    } else if (options.drift) {
      simulate_cw_modulated(params, *options.drift, seg, rng, out);
    } else {
      simulate_cw_renewal(params, seg, rng, out);
    }
  });

  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  stream.timestamps.reserve(total);
  for (const auto& part : parts) stream.timestamps.insert(stream.timestamps.end(), part.begin(), part.end());
  return stream;
}

PhotonStream poisson_stream(double rate_cps, double duration_s, std::uint64_t seed,
                            std::uint64_t resolution_ps) {
  if (!(rate_cps >= 0.0)) throw ConfigError("poisson rate must be >= 0");
  PhotonStream stream;
  stream.resolution_ps = resolution_ps;
  stream.duration_ticks = seconds_to_ticks(duration_s, resolution_ps);
  if (rate_cps == 0.0) return stream;
  CounterRng rng(seed);
  const double rate_per_tick = rate_cps * resolution_ps * 1e-12;
  stream.timestamps.reserve(static_cast<std::size_t>(rate_cps * duration_s * 1.01) + 16);
  const auto end = static_cast<double>(stream.duration_ticks);
  for (double t = exponential(rng, rate_per_tick); t < end; t += exponential(rng, rate_per_tick)) {
    stream.timestamps.push_back(static_cast<Tick>(t));
  }
  return stream;
}

PhotonStream equispaced_stream(double period_s, double duration_s, std::uint64_t resolution_ps) {
  if (!(period_s > 0.0)) throw ConfigError("period must be > 0");
  PhotonStream stream;
  stream.resolution_ps = resolution_ps;
  stream.duration_ticks = seconds_to_ticks(duration_s, resolution_ps);
  const long double period_ticks = static_cast<long double>(period_s) * 1e12L / resolution_ps;
  for (std::uint64_t k = 0;; ++k) {
    const long double t = (k + 0.5L) * period_ticks;
    if (t >= static_cast<long double>(stream.duration_ticks)) break;
    stream.timestamps.push_back(static_cast<Tick>(t));
  }
  return stream;
}

PhotonStream thin(const PhotonStream& stream, double eta, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("thin: eta must lie in [0, 1]");
  PhotonStream out;
  out.resolution_ps = stream.resolution_ps;
  out.duration_ticks = stream.duration_ticks;
  out.channel_label = stream.channel_label;
  if (eta == 1.0) {
    out.timestamps = stream.timestamps;
    return out;
  }
  if (eta == 0.0) return out;
  CounterRng rng(seed);
  out.timestamps.reserve(static_cast<std::size_t>(stream.size() * eta * 1.01) + 16);
  for (Tick t : stream.timestamps) {
    if (uniform01(rng) < eta) out.timestamps.push_back(t);
  }
  return out;
}

PhotonStream merge(const PhotonStream& a, const PhotonStream& b) {
  if (a.resolution_ps != b.resolution_ps) {
    throw DataError("merge: resolution mismatch (" + std::to_string(a.resolution_ps) + " ps vs " +
                    std::to_string(b.resolution_ps) + " ps)");
  }
  PhotonStream out;
  out.resolution_ps = a.resolution_ps;
  out.duration_ticks = std::max(a.duration_ticks, b.duration_ticks);
  out.channel_label = a.channel_label;
  out.timestamps.resize(a.size() + b.size());
  std::merge(a.timestamps.begin(), a.timestamps.end(), b.timestamps.begin(), b.timestamps.end(),
             out.timestamps.begin());
  return out;
}

std::vector<std::uint64_t> window_counts(const PhotonStream& stream, double dt_s) {
  if (!(dt_s > 0.0)) throw ConfigError("window_counts: dt must be > 0");
  const long double width = static_cast<long double>(dt_s) * 1e12L / stream.resolution_ps;
  const long double n = std::floor(static_cast<long double>(stream.duration_ticks) / width * (1.0L + 1e-12L));
  if (n < 1.0L) throw ConfigError("window_counts: window longer than the stream duration");
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n), 0);
  for (Tick t : stream.timestamps) {
    const auto k = static_cast<std::size_t>(static_cast<long double>(t) / width);
    if (k < counts.size()) ++counts[k];
  }
  return counts;
}

VarianceReport variance_check(const PhotonStream& emitted, double eta, double dt_s, std::uint64_t seed) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("variance_check: eta must lie in [0, 1]");
  const auto measured = thin(emitted, eta, seed);
  const auto n = window_counts(emitted, dt_s);
  const auto m = window_counts(measured, dt_s);
  const std::size_t k = n.size();
  if (k < 100) {
    throw DataError("variance_check: " + std::to_string(k) + " windows available, at least 100 required");
  }

  auto mean_var = [](const std::vector<std::uint64_t>& x) {
    double mean = 0.0;
    for (auto v : x) mean += static_cast<double>(v);
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (auto v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / static_cast<double>(x.size() - 1)};
  };
  const auto [n_mean, n_var] = mean_var(n);
  const auto [m_mean, m_var] = mean_var(m);

  const double p = eta;
  const double q = 1.0 - eta;
  const double predicted = p * p * n_var + p * q * n_mean;

  // Var(s²_N | n): linear term from the cross products (n_k - n̄)·e_k, the
  // binomial noise e_k² itself, and their covariance through the third moment.
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double nk = static_cast<double>(n[i]);
    const double d = nk - n_mean;
    const double v = nk * p * q;
    const double mu3 = v * (q - p);
    const double mu4 = v * (1.0 + 3.0 * (nk - 2.0) * p * q);
    acc += 4.0 * p * p * d * d * v + (mu4 - v * v) + 4.0 * p * d * mu3;
  }
  const double kk = static_cast<double>(k - 1);
  const double sampling_var = std::max(0.0, acc / (kk * kk));
  const double diff = m_var - predicted;

  VarianceReport r;
  r.window_s = dt_s;
  r.n_windows = k;
  r.eta_used = eta;
  r.mean_emitted_flux = n_mean / dt_s;
  r.var_emitted_flux = n_var / (dt_s * dt_s);
  r.mean_measured_flux = m_mean / dt_s;
  r.var_measured_flux = m_var / (dt_s * dt_s);
  r.predicted_var = predicted / (dt_s * dt_s);
  if (sampling_var > 0.0) {
    r.z_score = diff / std::sqrt(sampling_var);
  } else {
    r.z_score = std::abs(diff) <= 1e-9 * std::max(1.0, predicted) ? 0.0 : INFINITY;
  }
  return r;
}

}  // namespace photonbench
