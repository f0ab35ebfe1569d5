#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace photonbench {

/// Counter-based generator: the n-th output is a SplitMix64 finalisation of
/// key + n·γ. Independent streams are obtained by deriving new keys, so a
/// simulation split into segments draws the same numbers regardless of
/// which thread runs which segment.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(mix(key)) {}
  CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(derive(seed, stream)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix(key_ + kGamma * ++counter_); }

  std::uint64_t counter() const { return counter_; }

  /// Subseed for stream `stream` of `seed`.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    return mix(mix(seed) ^ mix(stream + 0x632be59bd9b4e019ULL));
  }

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Uniform on [0, 1).
inline double uniform01(CounterRng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform on (0, 1).
inline double uniform_open(CounterRng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline bool bernoulli(CounterRng& rng, double p) { return uniform01(rng) < p; }

/// Exponential waiting time by inverse CDF.
inline double exponential(CounterRng& rng, double rate) {
  return -std::log(uniform_open(rng)) / rate;
}

/// Standard normal (Box–Muller, one variate per call).
inline double standard_normal(CounterRng& rng) {
  const double u1 = uniform_open(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Number of Bernoulli(p) trials up to and including the first success.
inline std::uint64_t geometric(CounterRng& rng, double p) {
  if (p >= 1.0) return 1;
  const double k = std::floor(std::log(uniform_open(rng)) / std::log1p(-p));
  if (k >= 9.0e18) return std::numeric_limits<std::uint64_t>::max();
  return 1 + static_cast<std::uint64_t>(k);
}

/// Gamma(shape, rate) for shape >= 1 (Marsaglia–Tsang). Equals the sum of
/// `shape` independent exponentials when shape is integral.
inline double gamma_variate(CounterRng& rng, double shape, double rate) {
  if (shape == 1.0) return exponential(rng, rate);
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open(rng);
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

}  // namespace photonbench
