#include "photonbench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "photonbench/errors.hpp"
#include "photonbench/presets.hpp"

namespace photonbench {

using nlohmann::json;

namespace {

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string where(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
    }
  }

  void unsigned_int(const char* key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer() || (v->is_number_integer() && !v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
        throw ConfigError(where(key) + ": expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  const json* take(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where(it.key().c_str()) + ": unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_pump(const json& j, const std::string& path, PumpMode& pump) {
  ObjectReader r(j, path);
  std::string mode = std::holds_alternative<CwPump>(pump) ? "cw" : "pulsed";
  r.string("mode", mode);
  if (mode == "cw") {
    CwPump cw = std::holds_alternative<CwPump>(pump) ? std::get<CwPump>(pump) : CwPump{};
    r.number("kappa_per_ns_uW", cw.kappa_per_ns_uW);
    if (r.has("pump_rate_per_ns") && r.has("power_uW")) {
      throw ConfigError(path + ": give either pump_rate_per_ns or power_uW, not both");
    }
    r.number("pump_rate_per_ns", cw.pump_rate_per_ns);
    if (r.has("power_uW")) {
      double power = 0.0;
      r.number("power_uW", power);
      cw = CwPump::from_power(power, cw.kappa_per_ns_uW);
    }
    pump = cw;
  } else if (mode == "pulsed") {
    PulsedPump p = std::holds_alternative<PulsedPump>(pump) ? std::get<PulsedPump>(pump) : PulsedPump{};
    r.number("rep_rate_MHz", p.rep_rate_MHz);
    r.number("p_exc", p.p_exc);
    pump = p;
  } else {
    throw ConfigError(path + ".mode: expected \"cw\" or \"pulsed\"");
  }
  r.finish();
}

void read_emitter(const json& j, EmitterParams& e) {
  ObjectReader r(j, "emitter");
  r.number("tau_excited_ns", e.tau_excited_ns);
  if (const json* p = r.take("pump")) read_pump(*p, "emitter.pump", e.pump);
  r.number("quantum_yield", e.quantum_yield);
  r.number("isc_yield", e.isc_yield);
  r.number("tau_triplet_us", e.tau_triplet_us);
  r.number("collection_efficiency", e.collection_efficiency);
  if (const json* q = r.take("quench")) {
    if (q->is_null()) {
      e.quench.reset();
    } else {
      Quench quench = e.quench.value_or(Quench{});
      ObjectReader qr(*q, "emitter.quench");
      qr.number("p_q_uW", quench.p_q_uW);
      qr.number("exponent", quench.exponent);
      qr.finish();
      e.quench = quench;
    }
  }
  r.finish();
}

void read_spad(const json& j, const std::string& path, SpadConfig& s) {
  ObjectReader r(j, path);
  r.number("efficiency", s.efficiency);
  r.number("dead_time_ns", s.dead_time_ns);
  if (r.has("dead_time_model")) {
    std::string m;
    r.string("dead_time_model", m);
    try {
      s.dead_time_model = parse_dead_time_model(m);
    } catch (const ConfigError& e) {
      throw ConfigError(path + ".dead_time_model: " + e.what());
    }
  }
  r.number("dark_rate_cps", s.dark_rate_cps);
  r.number("jitter_fwhm_ns", s.jitter_fwhm_ns);
  r.finish();
}

void read_analog(const json& j, AnalogConfig& a) {
  ObjectReader r(j, "analog");
  r.number("responsivity_A_per_W", a.responsivity_A_per_W);
  r.number("gain_V_per_A", a.gain_V_per_A);
  r.number("nep_W_per_rtHz", a.nep_W_per_rtHz);
  r.number("integration_time_s", a.integration_time_s);
  r.number("linearity_correction", a.linearity_correction);
  r.finish();
}

void read_simulation(const json& j, SimulationSettings& s) {
  ObjectReader r(j, "simulation");
  r.number("duration_s", s.duration_s);
  r.unsigned_int("resolution_ps", s.resolution_ps);
  r.number("segment_s", s.segment_s);
  r.number("background_cps", s.background_cps);
  if (r.has("output")) {
    std::string out;
    r.string("output", out);
    if (out == "emission") s.output = SimulationOutput::Emission;
    else if (out == "detected") s.output = SimulationOutput::Detected;
    else if (out == "hbt") s.output = SimulationOutput::Hbt;
    else throw ConfigError("simulation.output: expected \"emission\", \"detected\" or \"hbt\"");
  }
  if (const json* d = r.take("drift")) {
    if (d->is_null()) {
      s.drift.reset();
    } else {
      if (!d->is_array()) throw ConfigError("simulation.drift: expected an array of [time_s, factor] pairs");
      PumpModulation m;
      for (std::size_t i = 0; i < d->size(); ++i) {
        const json& k = (*d)[i];
        if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number()) {
          throw ConfigError("simulation.drift[" + std::to_string(i) + "]: expected [time_s, factor]");
        }
        m.knots.emplace_back(k[0].get<double>(), k[1].get<double>());
      }
      s.drift = m;
    }
  }
  r.finish();
}

void read_correlator(const json& j, CorrelatorSettings& c) {
  ObjectReader r(j, "correlator");
  if (r.has("mode")) {
    std::string m;
    r.string("mode", m);
    try {
      c.mode = parse_histogram_mode(m);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("correlator.mode: ") + e.what());
    }
  }
  r.number("bin_width_ns", c.bin_width_ns);
  r.number("t_min_ns", c.t_min_ns);
  r.number("t_max_ns", c.t_max_ns);
  r.finish();
}

void read_type_b(const json& j, TypeBUncertainties& t) {
  ObjectReader r(j, "calibration.type_b_percent");
  r.number("wavelength", t.wavelength);
  r.number("responsivity", t.responsivity);
  r.number("gain", t.gain);
  r.number("linearity", t.linearity);
  r.number("source_stability", t.source_stability);
  if (const json* d = r.take("dead_time_model")) {
    if (d->is_null()) {
      t.dead_time_model.reset();
    } else {
      if (!d->is_number()) throw ConfigError("calibration.type_b_percent.dead_time_model: expected a number or null");
      t.dead_time_model = d->get<double>();
    }
  }
  r.finish();
}

void read_calibration(const json& j, CalibrationSettings& c) {
  ObjectReader r(j, "calibration");
  r.number("wavelength_nm", c.wavelength_nm);
  r.number("spad_dark_cps", c.spad_dark_cps);
  r.number("spad_dead_time_ns", c.spad_dead_time_ns);
  if (r.has("dead_time_model")) {
    std::string m;
    r.string("dead_time_model", m);
    try {
      c.dead_time_model = parse_dead_time_model(m);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("calibration.dead_time_model: ") + e.what());
    }
  }
  if (const json* t = r.take("type_b_percent")) read_type_b(*t, c.type_b);
  std::uint64_t n = c.n_voltage_samples;
  r.unsigned_int("n_voltage_samples", n);
  c.n_voltage_samples = n;
  n = c.n_gates;
  r.unsigned_int("n_gates", n);
  c.n_gates = n;
  r.number("gate_s", c.gate_s);
  r.number("source_drift", c.source_drift);
  r.finish();
}

json pump_to_json(const PumpMode& pump) {
  if (const auto* cw = std::get_if<CwPump>(&pump)) {
    return {{"mode", "cw"}, {"pump_rate_per_ns", cw->pump_rate_per_ns}, {"kappa_per_ns_uW", cw->kappa_per_ns_uW}};
  }
  const auto& p = std::get<PulsedPump>(pump);
  return {{"mode", "pulsed"}, {"rep_rate_MHz", p.rep_rate_MHz}, {"p_exc", p.p_exc}};
}

json spad_to_json(const SpadConfig& s) {
  return {{"efficiency", s.efficiency},
          {"dead_time_ns", s.dead_time_ns},
          {"dead_time_model", std::string(to_string(s.dead_time_model))},
          {"dark_rate_cps", s.dark_rate_cps},
          {"jitter_fwhm_ns", s.jitter_fwhm_ns}};
}

}  // namespace

void WorkbenchConfig::validate() const {
  emitter.validate();
  for (std::size_t i = 0; i < spad.size(); ++i) {
    try {
      spad[i].validate();
    } catch (const ConfigError& e) {
      std::string msg = e.what();
      throw ConfigError("spad[" + std::to_string(i) + "]" + msg.substr(msg.find('.') == std::string::npos ? 0 : msg.find('.')));
    }
  }
  analog.validate();
  if (!(simulation.duration_s > 0.0)) throw ConfigError("simulation.duration_s: must be > 0");
  if (simulation.resolution_ps == 0) throw ConfigError("simulation.resolution_ps: must be > 0");
  if (!(simulation.segment_s > 0.0)) throw ConfigError("simulation.segment_s: must be > 0");
  if (!(simulation.background_cps >= 0.0)) throw ConfigError("simulation.background_cps: must be >= 0");
  if (simulation.drift) simulation.drift->validate();
  if (!(correlator.bin_width_ns > 0.0)) throw ConfigError("correlator.bin_width_ns: must be > 0");
  if (!(correlator.t_max_ns > correlator.t_min_ns)) throw ConfigError("correlator.t_max_ns: must exceed t_min_ns");
  if (!(calibration.wavelength_nm > 0.0)) throw ConfigError("calibration.wavelength_nm: must be > 0");
  if (!(calibration.spad_dark_cps >= 0.0)) throw ConfigError("calibration.spad_dark_cps: must be >= 0");
  if (!(calibration.spad_dead_time_ns >= 0.0)) throw ConfigError("calibration.spad_dead_time_ns: must be >= 0");
  if (calibration.n_voltage_samples == 0) throw ConfigError("calibration.n_voltage_samples: must be >= 1");
  if (calibration.n_gates == 0) throw ConfigError("calibration.n_gates: must be >= 1");
  if (!(calibration.gate_s > 0.0)) throw ConfigError("calibration.gate_s: must be > 0");
  if (!(calibration.source_drift >= 0.0)) throw ConfigError("calibration.source_drift: must be >= 0");
}

std::uint64_t WorkbenchConfig::require_seed() const {
  if (!seed) throw ConfigError("seed: required for stochastic commands");
  return *seed;
}

WorkbenchConfig parse_config(const json& j) {
  WorkbenchConfig cfg;
  ObjectReader r(j, "");
  if (r.has("scenario_preset")) {
    std::string name;
    r.string("scenario_preset", name);
    const Preset& p = find_preset(name);
    cfg.scenario_preset = name;
    cfg.emitter = p.emitter;
    cfg.spad = {p.hbt_spad, p.hbt_spad};
    cfg.simulation.background_cps = p.background_cps;
  }
  if (r.has("seed")) {
    std::uint64_t seed = 0;
    r.unsigned_int("seed", seed);
    cfg.seed = seed;
  }
  if (const json* e = r.take("emitter")) read_emitter(*e, cfg.emitter);
  if (const json* s = r.take("spad")) {
    if (s->is_array()) {
      if (s->empty() || s->size() > 2) throw ConfigError("spad: expected one or two detector objects");
      read_spad((*s)[0], "spad[0]", cfg.spad[0]);
      cfg.spad[1] = cfg.spad[0];
      if (s->size() == 2) read_spad((*s)[1], "spad[1]", cfg.spad[1]);
    } else {
      read_spad(*s, "spad", cfg.spad[0]);
      cfg.spad[1] = cfg.spad[0];
    }
  }
  if (const json* a = r.take("analog")) read_analog(*a, cfg.analog);
  if (const json* s = r.take("simulation")) read_simulation(*s, cfg.simulation);
  if (const json* c = r.take("correlator")) read_correlator(*c, cfg.correlator);
  if (const json* c = r.take("calibration")) read_calibration(*c, cfg.calibration);
  r.finish();
  cfg.validate();
  return cfg;
}

WorkbenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return parse_config(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json config_to_json(const WorkbenchConfig& cfg) {
  json j;
  if (cfg.scenario_preset) j["scenario_preset"] = *cfg.scenario_preset;
  if (cfg.seed) j["seed"] = *cfg.seed;
  const auto& e = cfg.emitter;
  j["emitter"] = {{"tau_excited_ns", e.tau_excited_ns},
                  {"pump", pump_to_json(e.pump)},
                  {"quantum_yield", e.quantum_yield},
                  {"isc_yield", e.isc_yield},
                  {"tau_triplet_us", e.tau_triplet_us},
                  {"collection_efficiency", e.collection_efficiency},
                  {"quench", e.quench ? json{{"p_q_uW", e.quench->p_q_uW}, {"exponent", e.quench->exponent}} : json(nullptr)}};
  j["spad"] = json::array({spad_to_json(cfg.spad[0]), spad_to_json(cfg.spad[1])});
  const auto& a = cfg.analog;
  j["analog"] = {{"responsivity_A_per_W", a.responsivity_A_per_W},
                 {"gain_V_per_A", a.gain_V_per_A},
                 {"nep_W_per_rtHz", a.nep_W_per_rtHz},
                 {"integration_time_s", a.integration_time_s},
                 {"linearity_correction", a.linearity_correction}};
  const auto& s = cfg.simulation;
  const char* outputs[] = {"emission", "detected", "hbt"};
  j["simulation"] = {{"duration_s", s.duration_s},
                     {"resolution_ps", s.resolution_ps},
                     {"segment_s", s.segment_s},
                     {"background_cps", s.background_cps},
                     {"output", outputs[static_cast<int>(s.output)]}};
  if (s.drift) {
    json knots = json::array();
    for (const auto& [t, f] : s.drift->knots) knots.push_back({t, f});
    j["simulation"]["drift"] = knots;
  } else {
    j["simulation"]["drift"] = nullptr;
  }
  j["correlator"] = {{"mode", std::string(to_string(cfg.correlator.mode))},
                     {"bin_width_ns", cfg.correlator.bin_width_ns},
                     {"t_min_ns", cfg.correlator.t_min_ns},
                     {"t_max_ns", cfg.correlator.t_max_ns}};
  const auto& c = cfg.calibration;
  j["calibration"] = {{"wavelength_nm", c.wavelength_nm},
                      {"spad_dark_cps", c.spad_dark_cps},
                      {"spad_dead_time_ns", c.spad_dead_time_ns},
                      {"dead_time_model", std::string(to_string(c.dead_time_model))},
                      {"type_b_percent",
                       {{"wavelength", c.type_b.wavelength},
                        {"responsivity", c.type_b.responsivity},
                        {"gain", c.type_b.gain},
                        {"linearity", c.type_b.linearity},
                        {"source_stability", c.type_b.source_stability},
                        {"dead_time_model", c.type_b.dead_time_model ? json(*c.type_b.dead_time_model) : json(nullptr)}}},
                      {"n_voltage_samples", c.n_voltage_samples},
                      {"n_gates", c.n_gates},
                      {"gate_s", c.gate_s},
                      {"source_drift", c.source_drift}};
  return j;
}

}  // namespace photonbench
