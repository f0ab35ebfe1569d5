#pragma once

#include <optional>
#include <variant>

namespace photonbench {

/// CODATA 2018 exact constants.
inline constexpr double kPlanck = 6.62607015e-34;        ///< J·s
inline constexpr double kSpeedOfLight = 299792458.0;     ///< m/s

/// Continuous-wave pumping. The rate is tied to optical power by a linear
/// coefficient kappa (1/(ns·µW)) measured at the objective entrance.
struct CwPump {
  double pump_rate_per_ns = 0.25;
  double kappa_per_ns_uW = 1.0 / 120.0;

  static CwPump from_power(double power_uW, double kappa_per_ns_uW);
  double power_uW() const { return pump_rate_per_ns / kappa_per_ns_uW; }
};

/// Pulsed pumping with instantaneous pulses.
struct PulsedPump {
  double rep_rate_MHz = 20.0;
  double p_exc = 1.0;  ///< excitation probability per pulse when in the ground state
};

using PumpMode = std::variant<CwPump, PulsedPump>;

/// Empirical high-power roll-off (1 + (power/p_q)^m)^-1.
struct Quench {
  double p_q_uW = 100.0;
  double exponent = 2.0;
};

/// Three-level (ground, excited, triplet) emitter.
struct EmitterParams {
  double tau_excited_ns = 4.0;
  PumpMode pump = CwPump{};
  double quantum_yield = 1.0;
  /// Assumed triplet defaults: about 2% shelved time at the default pump.
  double isc_yield = 3.27e-5;      ///< excited -> triplet branching
  double tau_triplet_us = 5.0;
  std::optional<Quench> quench;
  double collection_efficiency = 1.0;  ///< optics, filtering and fiber coupling

  /// Throws ConfigError naming the offending field.
  void validate() const;

  /// Probability that one excited-state decay yields a collected photon.
  double collected_photon_probability() const {
    return collection_efficiency * quantum_yield * (1.0 - isc_yield);
  }
};

/// Pump rate after the optional quench attenuation (1/ns). CW only.
double effective_pump_rate(const EmitterParams& params);

/// Closed-form steady-state collected photon rate (1/s) of the CW renewal
/// cycle ground -> excited -> (triplet) -> ground.
double steady_state_rate(const EmitterParams& params);

/// Fraction of time the emitter spends shelved in the triplet (CW).
double triplet_occupation(const EmitterParams& params);

struct G2Params {
  double b = 1.0;         ///< dip depth
  double t1_ns = 2.0;     ///< dip time constant
  double rate_r = 0.0;    ///< 1/s

  void validate() const;
};

struct RadiantSample {
  double photon_flux = 0.0;    ///< photons/s
  double wavelength_nm = 785.6;
  double optical_power_W = 0.0;

  static RadiantSample from_flux(double photon_flux, double wavelength_nm);
};

/// (1 - b e^{-|t|/t1}) e^{-R|t|}, t in ns.
double g2_model(double t_ns, const G2Params& p);

/// Partial derivatives of g2_model with respect to (b, t1, R).
struct G2Gradient {
  double value;
  double d_b;
  double d_t1;
  double d_rate;
};
G2Gradient g2_model_gradient(double t_ns, const G2Params& p);

double g2_zero(double b);

/// 1/(1/tau + P), in ns.
double antibunch_timescale(double tau_ns, double pump_rate_per_ns);

/// r_inf·P/(P + p_sat), optionally multiplied by (1 + (P/p_q)^m)^-1.
double saturation_rate(double power_uW, double r_inf, double p_sat_uW,
                       const std::optional<Quench>& quench = std::nullopt);

/// Energy of one photon, hc/λ, in J.
double photon_energy(double wavelength_nm);

/// Φ = n·hc/λ in W.
double flux_to_power(double photon_flux, double wavelength_nm);

/// n = Φ·λ/(hc) in photons/s.
double power_to_flux(double power_W, double wavelength_nm);

}  // namespace photonbench
