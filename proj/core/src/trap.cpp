#include "levnano/trap.hpp"

#include <algorithm>
#include <cmath>

#include "levnano/constants.hpp"
#include "levnano/errors.hpp"

namespace levnano {

namespace c = constants;

char axis_name(Axis a) { return "xyz"[static_cast<int>(a)]; }

Axis parse_axis(char ch) {
  switch (ch) {
    case 'x': case 'X': return Axis::x;
    case 'y': case 'Y': return Axis::y;
    case 'z': case 'Z': return Axis::z;
  }
  throw InvalidParameter(std::string("unknown axis '") + ch + "'");
}

double sphere_mass(double radius, double density) {
  return 4.0 / 3.0 * c::pi * radius * radius * radius * density;
}

ParticleSpec ParticleSpec::sphere(double radius, double density, int charge_count) {
  ParticleSpec p;
  p.radius = radius;
  p.density = density;
  p.mass = sphere_mass(radius, density);
  p.charge_count = charge_count;
  p.avg_nucleus_mass = c::m0;
  p.lattice_constant = 0.4e-9;
  p.validate();
  return p;
}

ParticleSpec ParticleSpec::measured(double radius, double density, double mass, int charge_count) {
  ParticleSpec p = sphere(radius, density, charge_count);
  p.mass = mass;
  p.mass_measured = true;
  p.validate();
  return p;
}

ParticleSpec ParticleSpec::reference_silica() { return measured(231e-9, 1850.0, 9.6e-17, 80); }

double ParticleSpec::charge() const { return charge_count * c::e_charge; }

void ParticleSpec::validate() const {
  if (!(radius > 0)) throw InvalidParameter("particle radius must be > 0");
  if (!(density > 0)) throw InvalidParameter("particle density must be > 0");
  if (!(mass > 0)) throw InvalidParameter("particle mass must be > 0");
  if (charge_count < 0) throw InvalidParameter("charge count must be >= 0");
  if (!(avg_nucleus_mass > 0)) throw InvalidParameter("average nucleus mass must be > 0");
  if (!(lattice_constant > 0)) throw InvalidParameter("lattice constant must be > 0");
  if (!mass_measured) {
    double m = sphere_mass(radius, density);
    if (std::abs(mass - m) > 1e-12 * m)
      throw InvalidParameter("derived particle mass disagrees with 4/3 pi rho r^3");
  }
}

GasEnvironment GasEnvironment::nitrogen_mbar(double pressure_mbar, double temperature) {
  GasEnvironment g;
  g.pressure = c::mbar_to_pa(pressure_mbar);
  g.temperature = temperature;
  g.molecular_mass = 4.65e-26;
  g.validate();
  return g;
}

void GasEnvironment::validate() const {
  if (!(pressure >= 0)) throw InvalidParameter("gas pressure must be >= 0");
  if (!(temperature > 0)) throw InvalidParameter("gas temperature must be > 0");
  if (!(molecular_mass > 0)) throw InvalidParameter("gas molecular mass must be > 0");
}

void TrapConfig::validate() const {
  if (!(r0 > 0) || !(z0 > 0)) throw InvalidParameter("trap distances r0, z0 must be > 0");
  if (!(eta_ac > 0 && eta_ac <= 1)) throw InvalidParameter("eta_ac must lie in (0, 1]");
  if (!(kappa_dc > 0 && kappa_dc <= 1)) throw InvalidParameter("kappa_dc must lie in (0, 1]");
  if (!(drive_angular_freq > 0)) throw InvalidParameter("drive frequency must be > 0");
}

MathieuParams mathieu_params(const TrapConfig& trap, const ParticleSpec& particle) {
  trap.validate();
  if (!(particle.mass > 0)) throw InvalidParameter("particle mass must be > 0");
  double qm = particle.charge() / particle.mass;
  if (!(qm > 0)) throw InvalidParameter("particle must carry a positive charge");

  double wd2 = trap.drive_angular_freq * trap.drive_angular_freq;
  double a_radial = -qm * 4.0 * trap.kappa_dc * trap.dc_voltage / (trap.z0 * trap.z0 * wd2);
  double q_radial = qm * 2.0 * trap.eta_ac * trap.ac_voltage / (trap.r0 * trap.r0 * wd2);

  MathieuParams mp;
  mp.a = {a_radial, a_radial, -2.0 * a_radial};
  mp.q = {q_radial, -q_radial, 0.0};
  return mp;
}

double secular_frequency(const MathieuParams& mp, double drive_angular_freq, Axis axis) {
  if (!(drive_angular_freq > 0)) throw InvalidParameter("drive frequency must be > 0");
  int i = static_cast<int>(axis);
  double radicand = mp.a[i] + 0.5 * mp.q[i] * mp.q[i];
  if (!(radicand > 0)) {
    throw UntrappedAxis(axis_name(axis),
                        std::string("axis ") + axis_name(axis) +
                            " is untrapped (a + q^2/2 = " + std::to_string(radicand) + ")");
  }
  return 0.5 * drive_angular_freq * std::sqrt(radicand);
}

std::array<double, 3> secular_frequencies(const MathieuParams& mp, double drive_angular_freq) {
  return {secular_frequency(mp, drive_angular_freq, Axis::x),
          secular_frequency(mp, drive_angular_freq, Axis::y),
          secular_frequency(mp, drive_angular_freq, Axis::z)};
}

StabilityReport stability_check(const MathieuParams& mp) {
  StabilityReport r;
  for (int i = 0; i < 3; ++i) {
    r.trapped[i] = mp.a[i] + 0.5 * mp.q[i] * mp.q[i] > 0;
    r.max_abs_q = std::max(r.max_abs_q, std::abs(mp.q[i]));
  }
  r.pseudo_potential_valid = r.max_abs_q <= pseudo_potential_q_limit;
  return r;
}

double gas_damping(const ParticleSpec& particle, const GasEnvironment& gas) {
  gas.validate();
  const double kT = c::k_B * gas.temperature;
  const double v_t = std::sqrt(8.0 * kT / (c::pi * gas.molecular_mass));
  const double R2 = particle.radius * particle.radius;
  return 4.0 * c::pi * gas.molecular_mass * R2 * v_t * gas.pressure / (3.0 * kT * particle.mass) *
         (1.0 + c::pi / 8.0);
}

double thermal_force_psd(double temperature, double mass, double gamma) {
  if (!(temperature > 0) || !(mass > 0) || !(gamma >= 0))
    throw InvalidParameter("thermal_force_psd requires T > 0, m > 0, gamma >= 0");
  return 2.0 * c::k_B * temperature * mass * gamma;
}

double voltage_noise_force_psd(int charge_count, double voltage_psd, double field_distance) {
  if (!(field_distance > 0)) throw InvalidParameter("field distance D must be > 0");
  double q = charge_count * c::e_charge;
  return q * q * voltage_psd / (field_distance * field_distance);
}

std::array<double, 2> field_gradient(const FieldGeometry& geom, double mean_x, double mean_y) {
  if (!(geom.D > 0) || !(geom.D1 > 0)) throw InvalidParameter("D and D1 must be > 0");
  return {1.0 / geom.D + mean_x / geom.D1, 1.0 / geom.D + mean_y / geom.D1};
}

double heating_rate(double force_psd, double mass, double omega) {
  return force_psd / (2.0 * mass * c::hbar * omega);
}

double NoiseBudget::thermal_force_psd_at(double pressure_pa) const {
  return thermal_psd_per_pa * pressure_pa;
}

double NoiseBudget::effective_temperature(double pressure_pa) const {
  if (excess_force_psd == 0.0) return temperature;
  return temperature * (1.0 + excess_force_psd / thermal_force_psd_at(pressure_pa));
}

NoiseBudget noise_budget(const std::vector<NoiseSource>& excess, const ParticleSpec& particle,
                         double omega0, const GasEnvironment& gas) {
  if (!(omega0 > 0)) throw InvalidParameter("reference secular frequency must be > 0");
  gas.validate();

  NoiseBudget nb;
  nb.reference_secular_freq = omega0;
  nb.mass = particle.mass;
  nb.temperature = gas.temperature;
  for (const auto& src : excess) {
    if (!(src.force_psd >= 0)) throw InvalidParameter("force PSD of '" + src.label + "' is negative");
    nb.entries.push_back({src.label, src.force_psd, heating_rate(src.force_psd, particle.mass, omega0)});
    nb.excess_force_psd += src.force_psd;
  }

  GasEnvironment unit = gas;
  unit.pressure = 1.0;
  nb.thermal_psd_per_pa = thermal_force_psd(gas.temperature, particle.mass, gas_damping(particle, unit));
  double s_th = nb.thermal_force_psd_at(gas.pressure);
  nb.entries.push_back({"thermal", s_th, heating_rate(s_th, particle.mass, omega0)});
  nb.three_db_pressure = nb.excess_force_psd / nb.thermal_psd_per_pa;
  return nb;
}

}  // namespace levnano
