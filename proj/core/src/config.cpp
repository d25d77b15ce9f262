#include "levnano/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "detail.hpp"
#include "levnano/constants.hpp"
#include "levnano/errors.hpp"
#include "levnano/timeseries_io.hpp"

namespace levnano {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

double to_double(const std::string& v) {
  std::string t = trim(v);
  if (t.empty()) throw InvalidParameter("expected a number, got an empty value");
  // strtod accepts the forms people write in configs (1e-4, .5, 2E3)
  char* end = nullptr;
  double d = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size() || !std::isfinite(d)) throw InvalidParameter("expected a number, got '" + t + "'");
  return d;
}

std::uint64_t to_u64(const std::string& v) {
  std::string t = trim(v);
  std::uint64_t x = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw InvalidParameter("expected a non-negative integer, got '" + t + "'");
  return x;
}

int to_int(const std::string& v) {
  std::string t = trim(v);
  int x = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw InvalidParameter("expected an integer, got '" + t + "'");
  return x;
}

bool to_bool(const std::string& v) {
  std::string t = lower(trim(v));
  if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
  if (t == "false" || t == "no" || t == "0" || t == "off") return false;
  throw InvalidParameter("expected true/false, got '" + t + "'");
}

std::vector<std::string> to_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string t = trim(item);
    if (t.empty()) throw InvalidParameter("empty list element in '" + trim(v) + "'");
    out.push_back(t);
  }
  return out;
}

std::vector<double> to_double_list(const std::string& v) {
  std::vector<double> out;
  for (const auto& s : to_list(v)) out.push_back(to_double(s));
  return out;
}

std::vector<Axis> to_axes(const std::string& v) {
  std::vector<Axis> out;
  for (const auto& s : to_list(v)) {
    if (s.size() != 1) throw InvalidParameter("axis must be one of x, y, z; got '" + s + "'");
    out.push_back(parse_axis(s[0]));
  }
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

std::string axes_str(const std::vector<Axis>& v) {
  std::vector<std::string> s;
  for (Axis a : v) s.emplace_back(1, axis_name(a));
  return join(s);
}

using detail::fmt;


struct Key {
  const char* section;
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define LEVNANO_DOUBLE(sec, key, field)                                            \
  Key { sec, key, [](RunConfig& c, const std::string& v) { c.field = to_double(v); }, \
        [](const RunConfig& c) { return fmt(c.field); } }
#define LEVNANO_SIZE(sec, key, field)                                                                  \
  Key { sec, key, [](RunConfig& c, const std::string& v) { c.field = static_cast<std::size_t>(to_u64(v)); }, \
        [](const RunConfig& c) { return std::to_string(c.field); } }
#define LEVNANO_BOOL(sec, key, field)                                            \
  Key { sec, key, [](RunConfig& c, const std::string& v) { c.field = to_bool(v); }, \
        [](const RunConfig& c) { return std::string(c.field ? "true" : "false"); } }

Key f0_key(const char* name, Axis a) {
  return {"sim", name,
          [a](RunConfig& c, const std::string& v) { c.sim.f0_hz[a] = to_double(v); },
          [a](const RunConfig& c) {
            auto it = c.sim.f0_hz.find(a);
            return it == c.sim.f0_hz.end() ? std::string() : fmt(it->second);
          }};
}

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = {
      Key{"run", "seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64(v); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      Key{"run", "out", [](RunConfig& c, const std::string& v) { c.out = trim(v); },
          [](const RunConfig& c) { return c.out.generic_string(); }},

      LEVNANO_DOUBLE("particle", "radius", particle.radius),
      LEVNANO_DOUBLE("particle", "density", particle.density),
      Key{"particle", "mass",
          [](RunConfig& c, const std::string& v) {
            std::string t = lower(trim(v));
            if (t == "derived" || t.empty()) c.particle.mass.reset();
            else c.particle.mass = to_double(v);
          },
          [](const RunConfig& c) { return c.particle.mass ? fmt(*c.particle.mass) : std::string("derived"); }},
      Key{"particle", "charges", [](RunConfig& c, const std::string& v) { c.particle.charges = to_int(v); },
          [](const RunConfig& c) { return std::to_string(c.particle.charges); }},
      LEVNANO_DOUBLE("particle", "nucleus_mass", particle.nucleus_mass),
      LEVNANO_DOUBLE("particle", "lattice_constant", particle.lattice_constant),

      LEVNANO_DOUBLE("gas", "pressure_mbar", gas.pressure_mbar),
      LEVNANO_DOUBLE("gas", "temperature", gas.temperature),
      LEVNANO_DOUBLE("gas", "molecular_mass", gas.molecular_mass),

      LEVNANO_DOUBLE("trap", "r0", trap.r0),
      LEVNANO_DOUBLE("trap", "z0", trap.z0),
      LEVNANO_DOUBLE("trap", "eta_ac", trap.eta_ac),
      LEVNANO_DOUBLE("trap", "kappa_dc", trap.kappa_dc),
      LEVNANO_DOUBLE("trap", "dc_voltage", trap.dc_voltage),
      LEVNANO_DOUBLE("trap", "ac_voltage", trap.ac_voltage),
      LEVNANO_DOUBLE("trap", "drive_freq_hz", trap.drive_freq_hz),

      LEVNANO_DOUBLE("noise", "excess_force_psd", noise.excess_force_psd),
      LEVNANO_DOUBLE("noise", "voltage_psd", noise.voltage_psd),
      LEVNANO_DOUBLE("noise", "field_distance", noise.field_distance),

      Key{"sim", "engine", [](RunConfig& c, const std::string& v) { c.sim.engine = parse_engine(lower(trim(v))); },
          [](const RunConfig& c) { return to_string(c.sim.engine); }},
      LEVNANO_DOUBLE("sim", "duration", sim.duration),
      LEVNANO_DOUBLE("sim", "output_rate", sim.output_rate),
      LEVNANO_DOUBLE("sim", "solver_step", sim.solver_step),
      Key{"sim", "axes", [](RunConfig& c, const std::string& v) { c.sim.axes = to_axes(v); },
          [](const RunConfig& c) { return axes_str(c.sim.axes); }},
      f0_key("f0_x_hz", Axis::x),
      f0_key("f0_y_hz", Axis::y),
      f0_key("f0_z_hz", Axis::z),
      Key{"sim", "gamma_hz",
          [](RunConfig& c, const std::string& v) {
            if (lower(trim(v)) == "gas") c.sim.gamma_hz.reset();
            else c.sim.gamma_hz = to_double(v);
          },
          [](const RunConfig& c) { return c.sim.gamma_hz ? fmt(*c.sim.gamma_hz) : std::string("gas"); }},
      LEVNANO_BOOL("sim", "thermal_start", sim.thermal_start),
      LEVNANO_DOUBLE("sim", "x0", sim.x0),
      Key{"sim", "drift_shape",
          [](RunConfig& c, const std::string& v) { c.sim.drift_shape = parse_drift_shape(lower(trim(v))); },
          [](const RunConfig& c) { return to_string(c.sim.drift_shape); }},
      LEVNANO_DOUBLE("sim", "drift_offset_hz", sim.drift_offset_hz),
      LEVNANO_DOUBLE("sim", "drift_rate_hz_per_s", sim.drift_rate_hz_per_s),
      LEVNANO_DOUBLE("sim", "drift_amplitude_hz", sim.drift_amplitude_hz),
      LEVNANO_DOUBLE("sim", "drift_period_s", sim.drift_period_s),
      LEVNANO_DOUBLE("sim", "noise_floor", sim.noise_floor),
      LEVNANO_BOOL("sim", "anti_alias", sim.anti_alias),
      LEVNANO_SIZE("sim", "max_samples", sim.max_samples),
      LEVNANO_DOUBLE("sim", "camera_rate", sim.camera_rate),
      LEVNANO_DOUBLE("sim", "pixel_size", sim.pixel_size),

      LEVNANO_DOUBLE("lockin", "f_lo_hz", lockin.f_lo_hz),
      Key{"lockin", "order", [](RunConfig& c, const std::string& v) { c.lockin.order = to_int(v); },
          [](const RunConfig& c) { return std::to_string(c.lockin.order); }},
      LEVNANO_DOUBLE("lockin", "cutoff_hz", lockin.cutoff_hz),
      LEVNANO_SIZE("lockin", "decimation", lockin.decimation),

      LEVNANO_DOUBLE("fit", "segment_s", fit.segment_s),
      LEVNANO_DOUBLE("fit", "overlap", fit.overlap),
      LEVNANO_DOUBLE("fit", "f_min_hz", fit.f_min_hz),
      LEVNANO_DOUBLE("fit", "f_max_hz", fit.f_max_hz),
      LEVNANO_BOOL("fit", "window_aware", fit.window_aware),
      Key{"fit", "weights",
          [](RunConfig& c, const std::string& v) {
            std::string t = lower(trim(v));
            if (t == "model") c.fit.weights = WeightScheme::model;
            else if (t == "data") c.fit.weights = WeightScheme::data;
            else throw InvalidParameter("weights must be 'model' or 'data'");
          },
          [](const RunConfig& c) { return std::string(c.fit.weights == WeightScheme::model ? "model" : "data"); }},
      LEVNANO_SIZE("fit", "block", fit.block),

      Key{"sweep", "pressures_mbar", [](RunConfig& c, const std::string& v) { c.sweep.pressures_mbar = to_double_list(v); },
          [](const RunConfig& c) {
            std::vector<std::string> s;
            for (double p : c.sweep.pressures_mbar) s.push_back(fmt(p));
            return join(s);
          }},
      LEVNANO_DOUBLE("sweep", "duration", sweep.duration),
      LEVNANO_DOUBLE("sweep", "output_rate", sweep.output_rate),
      LEVNANO_DOUBLE("sweep", "excess_gamma_hz", sweep.excess_gamma_hz),
      Key{"sweep", "axes", [](RunConfig& c, const std::string& v) { c.sweep.axes = to_axes(v); },
          [](const RunConfig& c) { return axes_str(c.sweep.axes); }},
      LEVNANO_SIZE("sweep", "segments", sweep.segments),
      LEVNANO_DOUBLE("sweep", "confidence", sweep.confidence),

      LEVNANO_DOUBLE("bounds", "gamma_cm_hz", bounds.gamma_cm_hz),
      LEVNANO_DOUBLE("bounds", "confidence", bounds.confidence),
      Key{"bounds", "models",
          [](RunConfig& c, const std::string& v) {
            auto m = to_list(lower(v));
            for (const auto& s : m)
              if (s != "dcsl" && s != "ddp") throw InvalidParameter("model must be dcsl or ddp, got '" + s + "'");
            c.bounds.models = m;
          },
          [](const RunConfig& c) { return join(c.bounds.models); }},
      LEVNANO_SIZE("bounds", "grid", bounds.grid),
      LEVNANO_DOUBLE("bounds", "dcsl_T", bounds.dcsl_T),
      Key{"bounds", "dcsl_variant",
          [](RunConfig& c, const std::string& v) { c.bounds.dcsl_variant = parse_collapse_variant(lower(trim(v))); },
          [](const RunConfig& c) { return to_string(c.bounds.dcsl_variant); }},
      LEVNANO_DOUBLE("bounds", "lambda_min", bounds.lambda_min),
      LEVNANO_DOUBLE("bounds", "lambda_max", bounds.lambda_max),
      LEVNANO_DOUBLE("bounds", "rc_min", bounds.rc_min),
      LEVNANO_DOUBLE("bounds", "rc_max", bounds.rc_max),
      Key{"bounds", "ddp_variant",
          [](RunConfig& c, const std::string& v) { c.bounds.ddp_variant = parse_collapse_variant(lower(trim(v))); },
          [](const RunConfig& c) { return to_string(c.bounds.ddp_variant); }},
      LEVNANO_DOUBLE("bounds", "R0_min", bounds.R0_min),
      LEVNANO_DOUBLE("bounds", "R0_max", bounds.R0_max),
      LEVNANO_DOUBLE("bounds", "ddp_T_min", bounds.ddp_T_min),
      LEVNANO_DOUBLE("bounds", "ddp_T_max", bounds.ddp_T_max),
      LEVNANO_DOUBLE("bounds", "ddp_T_scan", bounds.ddp_T_scan),
  };
  return keys;
}

#undef LEVNANO_DOUBLE
#undef LEVNANO_SIZE
#undef LEVNANO_BOOL

bool known_section(const std::string& s) {
  for (const auto& k : schema())
    if (s == k.section) return true;
  return false;
}

void check_positive(double v, const char* what) {
  if (!(v > 0)) throw ConfigError(std::string(what) + " must be > 0");
}

void validate(const RunConfig& c) {
  check_positive(c.particle.radius, "particle.radius");
  check_positive(c.particle.density, "particle.density");
  if (c.particle.mass) check_positive(*c.particle.mass, "particle.mass");
  if (c.particle.charges < 0) throw ConfigError("particle.charges must be >= 0");
  check_positive(c.particle.nucleus_mass, "particle.nucleus_mass");
  check_positive(c.particle.lattice_constant, "particle.lattice_constant");
  if (!(c.gas.pressure_mbar >= 0)) throw ConfigError("gas.pressure_mbar must be >= 0");
  check_positive(c.gas.temperature, "gas.temperature");
  check_positive(c.gas.molecular_mass, "gas.molecular_mass");
  check_positive(c.trap.drive_freq_hz, "trap.drive_freq_hz");
  if (!(c.noise.excess_force_psd >= 0) || !(c.noise.voltage_psd >= 0))
    throw ConfigError("noise PSDs must be >= 0");
  check_positive(c.noise.field_distance, "noise.field_distance");
  check_positive(c.sim.duration, "sim.duration");
  check_positive(c.sim.output_rate, "sim.output_rate");
  if (c.sim.axes.empty()) throw ConfigError("sim.axes must list at least one axis");
  for (auto [a, f] : c.sim.f0_hz) check_positive(f, "sim.f0_*_hz");
  if (c.sim.gamma_hz && !(*c.sim.gamma_hz >= 0)) throw ConfigError("sim.gamma_hz must be >= 0");
  if (!(c.sim.camera_rate >= 0) || !(c.sim.pixel_size >= 0) || !(c.sim.noise_floor >= 0))
    throw ConfigError("sim camera_rate, pixel_size and noise_floor must be >= 0");
  if (c.lockin.order < 1) throw ConfigError("lockin.order must be >= 1");
  check_positive(c.lockin.cutoff_hz, "lockin.cutoff_hz");
  if (c.lockin.decimation < 1) throw ConfigError("lockin.decimation must be >= 1");
  if (!(c.fit.overlap >= 0 && c.fit.overlap < 1)) throw ConfigError("fit.overlap must lie in [0, 1)");
  if (c.fit.block < 1) throw ConfigError("fit.block must be >= 1");
  for (double p : c.sweep.pressures_mbar) check_positive(p, "sweep.pressures_mbar entries");
  check_positive(c.sweep.duration, "sweep.duration");
  check_positive(c.sweep.output_rate, "sweep.output_rate");
  if (c.sweep.segments < 1) throw ConfigError("sweep.segments must be >= 1");
  if (!(c.sweep.confidence > 0 && c.sweep.confidence < 1)) throw ConfigError("sweep.confidence must lie in (0, 1)");
  if (!(c.bounds.gamma_cm_hz >= 0)) throw ConfigError("bounds.gamma_cm_hz must be >= 0");
  if (c.bounds.grid < 10) throw ConfigError("bounds.grid must be >= 10");
  if (!(c.bounds.lambda_min > 0 && c.bounds.lambda_max > c.bounds.lambda_min) ||
      !(c.bounds.rc_min > 0 && c.bounds.rc_max > c.bounds.rc_min) ||
      !(c.bounds.R0_min > 0 && c.bounds.R0_max > c.bounds.R0_min) ||
      !(c.bounds.ddp_T_min > 0 && c.bounds.ddp_T_max > c.bounds.ddp_T_min))
    throw ConfigError("bounds ranges need 0 < min < max");
  check_positive(c.bounds.dcsl_T, "bounds.dcsl_T");
  check_positive(c.bounds.ddp_T_scan, "bounds.ddp_T_scan");
}

}  // namespace

IniDocument parse_ini(const std::string& text) {
  IniDocument doc;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("unterminated section header", line);
      section = lower(trim(s.substr(1, s.size() - 2)));
      if (section.empty()) throw ConfigError("empty section name", line);
      if (doc.count(section)) throw ConfigError("section [" + section + "] appears twice", line);
      doc[section].line = line;
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    if (section.empty()) throw ConfigError("key outside of any [section]", line);
    std::string key = lower(trim(s.substr(0, eq)));
    std::string value = s.substr(eq + 1);
    // trailing comments need whitespace before the marker
    for (const char* mark : {" #", " ;", "\t#", "\t;"}) {
      auto p = value.find(mark);
      if (p != std::string::npos) value = value.substr(0, p);
    }
    if (key.empty()) throw ConfigError("empty key", line);
    auto& sec = doc[section].entries;
    if (sec.count(key)) throw ConfigError("key '" + key + "' set twice in [" + section + "]", line);
    sec[key] = {trim(value), line};
  }
  return doc;
}

RunConfig parse_config(const std::string& text) {
  IniDocument doc = parse_ini(text);
  RunConfig cfg;
  for (const auto& [section, block] : doc) {
    if (!known_section(section)) throw ConfigError("unknown section [" + section + "]", block.line);
    for (const auto& [key, entry] : block.entries) {
      // key lookup is case-insensitive; schema names with capitals are stored lower-cased
      const Key* k = nullptr;
      for (const auto& cand : schema())
        if (section == cand.section && key == lower(cand.name)) k = &cand;
      if (!k) throw ConfigError("unknown key '" + section + "." + key + "'", entry.line);
      try {
        k->set(cfg, entry.value);
      } catch (const InvalidParameter& e) {
        throw ConfigError(section + "." + key + ": " + e.what(), entry.line);
      }
    }
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

std::string RunConfig::canonical() const {
  std::string s;
  std::string last;
  for (const auto& k : schema()) {
    // where results go is not part of what is computed
    if (std::string(k.section) == "run" && std::string(k.name) == "out") continue;
    if (last != k.section) {
      s += std::string(s.empty() ? "" : "\n") + "[" + k.section + "]\n";
      last = k.section;
    }
    std::string v = k.get(*this);
    if (!v.empty()) s += std::string(k.name) + " = " + v + "\n";
  }
  return s;
}

ParticleSpec RunConfig::particle_spec() const {
  ParticleSpec p = particle.mass ? ParticleSpec::measured(particle.radius, particle.density, *particle.mass, particle.charges)
                                 : ParticleSpec::sphere(particle.radius, particle.density, particle.charges);
  p.avg_nucleus_mass = particle.nucleus_mass;
  p.lattice_constant = particle.lattice_constant;
  p.validate();
  return p;
}

GasEnvironment RunConfig::gas_environment() const {
  GasEnvironment g;
  g.pressure = constants::mbar_to_pa(gas.pressure_mbar);
  g.temperature = gas.temperature;
  g.molecular_mass = gas.molecular_mass;
  g.validate();
  return g;
}

TrapConfig RunConfig::trap_config() const {
  TrapConfig t;
  t.r0 = trap.r0;
  t.z0 = trap.z0;
  t.eta_ac = trap.eta_ac;
  t.kappa_dc = trap.kappa_dc;
  t.dc_voltage = trap.dc_voltage;
  t.ac_voltage = trap.ac_voltage;
  t.drive_angular_freq = constants::two_pi * trap.drive_freq_hz;
  t.validate();
  return t;
}

double RunConfig::excess_force_psd() const {
  return noise.excess_force_psd + voltage_noise_force_psd(particle.charges, noise.voltage_psd, noise.field_distance);
}

double RunConfig::omega0(Axis a) const {
  auto it = sim.f0_hz.find(a);
  if (it != sim.f0_hz.end()) return constants::two_pi * it->second;
  TrapConfig t = trap_config();
  return secular_frequency(mathieu_params(t, particle_spec()), t.drive_angular_freq, a);
}

double RunConfig::gamma() const {
  if (sim.gamma_hz) return constants::two_pi * *sim.gamma_hz;
  return gas_damping(particle_spec(), gas_environment());
}

SimPlan RunConfig::sim_plan() const {
  SimPlan p;
  p.duration = sim.duration;
  p.solver_step = sim.solver_step;
  p.output_rate = sim.output_rate;
  p.seed = seed;
  p.mass = particle_spec().mass;
  p.measurement_noise_floor = sim.noise_floor;
  p.engine = sim.engine;
  p.max_samples = sim.max_samples;
  if (sim.anti_alias) p.anti_alias = AntiAlias{};
  const double g = gamma();
  const double S_F = thermal_force_psd(gas.temperature, p.mass, g) + excess_force_psd();
  for (Axis a : sim.axes) {
    AxisPlan ax;
    ax.axis = a;
    ax.omega0 = sim.engine == Engine::mathieu ? 0.0 : omega0(a);
    ax.gamma = g;
    ax.force_psd = S_F;
    ax.thermal_start = sim.thermal_start;
    ax.x0 = sim.x0;
    ax.X0 = sim.x0;
    ax.drift.shape = sim.drift_shape;
    ax.drift.offset = constants::two_pi * sim.drift_offset_hz;
    ax.drift.linear_rate = constants::two_pi * sim.drift_rate_hz_per_s;
    ax.drift.mod_amplitude = constants::two_pi * sim.drift_amplitude_hz;
    ax.drift.mod_period = sim.drift_period_s;
    p.axes.push_back(ax);
  }
  return p;
}

}  // namespace levnano
