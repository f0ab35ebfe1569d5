#include "photonbench/photophysics.hpp"

#include <cmath>
#include <string>

#include "photonbench/errors.hpp"

namespace photonbench {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

bool is_fraction(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

CwPump CwPump::from_power(double power_uW, double kappa_per_ns_uW) {
  require(power_uW >= 0.0, "pump power must be >= 0");
  require(kappa_per_ns_uW > 0.0, "kappa must be > 0");
  return CwPump{kappa_per_ns_uW * power_uW, kappa_per_ns_uW};
}

void EmitterParams::validate() const {
  require(tau_excited_ns > 0.0 && std::isfinite(tau_excited_ns), "emitter.tau_excited_ns: must be > 0");
  require(is_fraction(quantum_yield), "emitter.quantum_yield: must lie in [0, 1]");
  require(is_fraction(isc_yield), "emitter.isc_yield: must lie in [0, 1]");
  require(is_fraction(collection_efficiency), "emitter.collection_efficiency: must lie in [0, 1]");
  require(isc_yield == 0.0 || tau_triplet_us > 0.0, "emitter.tau_triplet_us: must be > 0 when isc_yield > 0");
  if (const auto* cw = std::get_if<CwPump>(&pump)) {
    require(cw->pump_rate_per_ns >= 0.0 && std::isfinite(cw->pump_rate_per_ns),
            "emitter.pump.pump_rate_per_ns: must be >= 0");
    require(cw->kappa_per_ns_uW > 0.0, "emitter.pump.kappa_per_ns_uW: must be > 0");
  } else {
    const auto& pulsed = std::get<PulsedPump>(pump);
    require(pulsed.rep_rate_MHz > 0.0 && std::isfinite(pulsed.rep_rate_MHz),
            "emitter.pump.rep_rate_MHz: must be > 0");
    require(is_fraction(pulsed.p_exc), "emitter.pump.p_exc: must lie in [0, 1]");
  }
  if (quench) {
    require(quench->p_q_uW > 0.0, "emitter.quench.p_q_uW: must be > 0");
    require(quench->exponent > 0.0, "emitter.quench.exponent: must be > 0");
  }
}

double effective_pump_rate(const EmitterParams& params) {
  const auto& cw = std::get<CwPump>(params.pump);
  double rate = cw.pump_rate_per_ns;
  if (params.quench) {
    rate /= 1.0 + std::pow(cw.power_uW() / params.quench->p_q_uW, params.quench->exponent);
  }
  return rate;
}

namespace {

// Mean duration (ns) of one ground -> excited -> ground cycle.
double mean_cycle_ns(const EmitterParams& params) {
  const double pump = effective_pump_rate(params);
  if (pump <= 0.0) return INFINITY;
  return 1.0 / pump + params.tau_excited_ns + params.isc_yield * params.tau_triplet_us * 1e3;
}

}  // namespace

double steady_state_rate(const EmitterParams& params) {
  const double cycle = mean_cycle_ns(params);
  if (!std::isfinite(cycle)) return 0.0;
  return params.collected_photon_probability() / cycle * 1e9;
}

double triplet_occupation(const EmitterParams& params) {
  const double cycle = mean_cycle_ns(params);
  if (!std::isfinite(cycle)) return 0.0;
  return params.isc_yield * params.tau_triplet_us * 1e3 / cycle;
}

void G2Params::validate() const {
  require(is_fraction(b), "g2.b: must lie in [0, 1]");
  require(t1_ns > 0.0, "g2.t1_ns: must be > 0");
  require(rate_r >= 0.0, "g2.rate_r: must be >= 0");
}

RadiantSample RadiantSample::from_flux(double photon_flux, double wavelength_nm) {
  return RadiantSample{photon_flux, wavelength_nm, flux_to_power(photon_flux, wavelength_nm)};
}

double g2_model(double t_ns, const G2Params& p) {
  const double at = std::abs(t_ns);
  return (1.0 - p.b * std::exp(-at / p.t1_ns)) * std::exp(-p.rate_r * at * 1e-9);
}

G2Gradient g2_model_gradient(double t_ns, const G2Params& p) {
  const double at = std::abs(t_ns);
  const double dip = std::exp(-at / p.t1_ns);
  const double tail = std::exp(-p.rate_r * at * 1e-9);
  const double shape = 1.0 - p.b * dip;
  return G2Gradient{
      shape * tail,
      -dip * tail,
      -p.b * dip * at / (p.t1_ns * p.t1_ns) * tail,
      -shape * tail * at * 1e-9,
  };
}

double g2_zero(double b) {
  if (!is_fraction(b)) throw ConfigError("g2_zero: b must lie in [0, 1]");
  return 1.0 - b;
}

double antibunch_timescale(double tau_ns, double pump_rate_per_ns) {
  if (!(tau_ns > 0.0)) throw ConfigError("antibunch_timescale: tau must be > 0");
  if (!(pump_rate_per_ns >= 0.0)) throw ConfigError("antibunch_timescale: pump rate must be >= 0");
  return 1.0 / (1.0 / tau_ns + pump_rate_per_ns);
}

double saturation_rate(double power_uW, double r_inf, double p_sat_uW,
                       const std::optional<Quench>& quench) {
  if (!(power_uW >= 0.0)) throw ConfigError("saturation_rate: power must be >= 0");
  if (!(r_inf > 0.0)) throw ConfigError("saturation_rate: r_inf must be > 0");
  if (!(p_sat_uW > 0.0)) throw ConfigError("saturation_rate: p_sat must be > 0");
  double rate = r_inf * power_uW / (power_uW + p_sat_uW);
  if (quench) rate /= 1.0 + std::pow(power_uW / quench->p_q_uW, quench->exponent);
  return rate;
}

double photon_energy(double wavelength_nm) {
  if (!(wavelength_nm > 0.0)) throw ConfigError("wavelength must be > 0");
  return kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
}

double flux_to_power(double photon_flux, double wavelength_nm) {
  if (!(photon_flux >= 0.0)) throw ConfigError("flux_to_power: flux must be >= 0");
  return photon_flux * photon_energy(wavelength_nm);
}

double power_to_flux(double power_W, double wavelength_nm) {
  if (!(power_W >= 0.0)) throw ConfigError("power_to_flux: power must be >= 0");
  return power_W / photon_energy(wavelength_nm);
}

}  // namespace photonbench
