#include "photonbench/detectors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "photonbench/errors.hpp"
#include "photonbench/random.hpp"

namespace photonbench {

std::string_view to_string(DeadTimeModel model) {
  return model == DeadTimeModel::NonParalyzable ? "non_paralyzable" : "paralyzable";
}

DeadTimeModel parse_dead_time_model(std::string_view name) {
  std::string key;
  for (char c : name) {
    if (c == '-') c = '_';
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (key == "non_paralyzable" || key == "nonparalyzable") return DeadTimeModel::NonParalyzable;
  if (key == "paralyzable") return DeadTimeModel::Paralyzable;
  throw ConfigError("unknown dead-time model '" + std::string(name) +
                    "' (expected non_paralyzable or paralyzable)");
}

void SpadConfig::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConfigError("spad.efficiency: must lie in [0, 1]");
  if (!(dead_time_ns >= 0.0)) throw ConfigError("spad.dead_time_ns: must be >= 0");
  if (!(dark_rate_cps >= 0.0)) throw ConfigError("spad.dark_rate_cps: must be >= 0");
  if (!(jitter_fwhm_ns >= 0.0)) throw ConfigError("spad.jitter_fwhm_ns: must be >= 0");
}

void AnalogConfig::validate() const {
  if (!(responsivity_A_per_W > 0.0)) throw ConfigError("analog.responsivity_A_per_W: must be > 0");
  if (!(gain_V_per_A > 0.0)) throw ConfigError("analog.gain_V_per_A: must be > 0");
  if (!(nep_W_per_rtHz >= 0.0)) throw ConfigError("analog.nep_W_per_rtHz: must be >= 0");
  if (!(integration_time_s > 0.0)) throw ConfigError("analog.integration_time_s: must be > 0");
  if (!(linearity_correction >= 0.0 && linearity_correction < 1.0)) {
    throw ConfigError("analog.linearity_correction: must lie in [0, 1)");
  }
}

double AnalogConfig::voltage_noise_V() const {
  return nep_W_per_rtHz * std::sqrt(1.0 / (2.0 * integration_time_s)) * responsivity_A_per_W * gain_V_per_A;
}

namespace {

Tick dead_ticks(double dead_time_ns, std::uint64_t resolution_ps) {
  // Δ < d for integer Δ is equivalent to Δ < ceil(d).
  return static_cast<Tick>(std::ceil(dead_time_ns * 1e3 / static_cast<double>(resolution_ps) - 1e-9));
}

}  // namespace

PhotonStream apply_dead_time(const PhotonStream& stream, double dead_time_ns, DeadTimeModel model) {
  if (!(dead_time_ns >= 0.0)) throw ConfigError("dead_time_ns: must be >= 0");
  const Tick d = dead_ticks(dead_time_ns, stream.resolution_ps);
  PhotonStream out;
  out.resolution_ps = stream.resolution_ps;
  out.duration_ticks = stream.duration_ticks;
  out.channel_label = stream.channel_label;
  if (d == 0) {
    out.timestamps = stream.timestamps;
    return out;
  }
  out.timestamps.reserve(stream.size());
  bool first = true;
  Tick last = 0;
  for (Tick t : stream.timestamps) {
    const bool blocked = !first && t - last < d;
    if (!blocked) out.timestamps.push_back(t);
    if (model == DeadTimeModel::Paralyzable || !blocked) last = t;
    first = false;
  }
  return out;
}

double dead_time_correct(double measured_rate_cps, double dead_time_ns, DeadTimeModel model) {
  if (!(measured_rate_cps >= 0.0)) throw NumericalError("dead_time_correct: measured rate must be >= 0");
  if (!(dead_time_ns >= 0.0)) throw ConfigError("dead_time_ns: must be >= 0");
  const double d = dead_time_ns * 1e-9;
  const double m = measured_rate_cps;
  if (d == 0.0 || m == 0.0) return m;
  if (model == DeadTimeModel::NonParalyzable) {
    const double x = m * d;
    if (x >= 1.0) {
      throw NumericalError("dead_time_correct: measured rate x dead time = " + std::to_string(x) +
                           " >= 1 is unphysical for a non-paralyzable detector");
    }
    return m / (1.0 - x);
  }
  const double peak = 1.0 / d;
  if (m > peak / std::exp(1.0)) {
    throw NumericalError("dead_time_correct: measured rate exceeds the paralyzable maximum 1/(e*d)");
  }
  // Lower branch of m = n e^{-nd}: f(n) = n e^{-nd} - m is increasing on [m, 1/d].
  double lo = m;
  double hi = peak;
  double n = m / (1.0 - m * d) < peak ? m / (1.0 - m * d) : 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double e = std::exp(-n * d);
    const double f = n * e - m;
    if (f > 0.0) hi = n; else lo = n;
    const double df = e * (1.0 - n * d);
    double next = df > 0.0 ? n - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - n) <= 1e-14 * n || hi - lo <= 1e-13 * hi) return next;
    n = next;
  }
  return n;
}

PhotonStream detect_spad(const PhotonStream& stream, const SpadConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  stream.validate();
  PhotonStream clicks;
  clicks.resolution_ps = stream.resolution_ps;
  clicks.duration_ticks = stream.duration_ticks;
  clicks.channel_label = stream.channel_label;

  CounterRng keep(seed, 0);
  clicks.timestamps.reserve(static_cast<std::size_t>(stream.size() * cfg.efficiency) + 16);
  for (Tick t : stream.timestamps) {
    if (cfg.efficiency >= 1.0 || uniform01(keep) < cfg.efficiency) clicks.timestamps.push_back(t);
  }

  if (cfg.jitter_fwhm_ns > 0.0) {
    CounterRng jitter(seed, 1);
    const double sigma_ticks = cfg.jitter_fwhm_ns / (2.0 * std::sqrt(2.0 * std::log(2.0))) * 1e3 /
                               static_cast<double>(stream.resolution_ps);
    const double upper = static_cast<double>(stream.duration_ticks);
    for (Tick& t : clicks.timestamps) {
      const double moved = std::clamp(static_cast<double>(t) + sigma_ticks * standard_normal(jitter), 0.0, upper);
      t = static_cast<Tick>(std::llround(moved));
    }
    std::sort(clicks.timestamps.begin(), clicks.timestamps.end());
  }

  if (cfg.dark_rate_cps > 0.0 && stream.duration_ticks > 0) {
    CounterRng dark_rng(seed, 2);
    PhotonStream dark;
    dark.resolution_ps = stream.resolution_ps;
    dark.duration_ticks = stream.duration_ticks;
    const double rate_per_tick = cfg.dark_rate_cps * static_cast<double>(stream.resolution_ps) * 1e-12;
    const auto end = static_cast<double>(stream.duration_ticks);
    for (double t = exponential(dark_rng, rate_per_tick); t < end; t += exponential(dark_rng, rate_per_tick)) {
      dark.timestamps.push_back(static_cast<Tick>(t));
    }
    clicks = merge(clicks, dark);
  }

  return apply_dead_time(clicks, cfg.dead_time_ns, cfg.dead_time_model);
}

std::pair<PhotonStream, PhotonStream> hbt_split(const PhotonStream& stream, std::uint64_t seed) {
  PhotonStream a;
  PhotonStream b;
  a.resolution_ps = b.resolution_ps = stream.resolution_ps;
  a.duration_ticks = b.duration_ticks = stream.duration_ticks;
  a.channel_label = 1;
  b.channel_label = 2;
  a.timestamps.reserve(stream.size() / 2 + 16);
  b.timestamps.reserve(stream.size() / 2 + 16);
  CounterRng rng(seed);
  for (Tick t : stream.timestamps) {
    ((rng() >> 63) == 0 ? a : b).timestamps.push_back(t);
  }
  return {std::move(a), std::move(b)};
}

std::vector<double> read_analog(double mean_power_W, const AnalogConfig& cfg, std::size_t n_samples,
                                std::uint64_t seed) {
  cfg.validate();
  if (n_samples == 0) throw ConfigError("read_analog: n_samples must be >= 1");
  if (!(mean_power_W >= 0.0)) throw ConfigError("read_analog: mean power must be >= 0");
  const double mean = mean_power_W * cfg.responsivity_A_per_W * cfg.gain_V_per_A;
  const double sigma = cfg.voltage_noise_V();
  std::vector<double> v(n_samples, mean);
  if (sigma > 0.0) {
    CounterRng rng(seed);
    for (double& x : v) x += sigma * standard_normal(rng);
  }
  return v;
}

}  // namespace photonbench
