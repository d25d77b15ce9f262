#pragma once

// Closed-form physics of the linear Paul trap, the residual gas, and the
// force-noise budget of a levitated sphere.
//
// Force PSDs (S_F) throughout the library are white-noise correlation
// strengths, <F(t)F(t')> = S_F delta(t - t'). With S_F = 2 k_B T m gamma the
// Langevin oscillator thermalizes at T.

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace levnano {

enum class Axis { x = 0, y = 1, z = 2 };

char axis_name(Axis a);
Axis parse_axis(char c);

struct ParticleSpec {
  double radius = 0.0;            // m
  double density = 0.0;           // kg/m^3
  double mass = 0.0;              // kg
  int charge_count = 0;           // elementary charges
  double avg_nucleus_mass = 0.0;  // kg, collapse-model building block
  double lattice_constant = 0.0;  // m
  bool mass_measured = false;     // mass set independently of radius/density

  // Sphere with mass 4/3 pi rho r^3 and default collapse constants.
  static ParticleSpec sphere(double radius, double density, int charge_count);
  // Measured mass; the radius is kept as given (it is only used for geometry).
  static ParticleSpec measured(double radius, double density, double mass, int charge_count);
  // The 231 nm silica sphere used throughout the examples and acceptance runs.
  static ParticleSpec reference_silica();

  double charge() const;
  void validate() const;
};

double sphere_mass(double radius, double density);

struct GasEnvironment {
  double pressure = 0.0;        // Pa
  double temperature = 293.0;   // K
  double molecular_mass = 4.65e-26;  // kg (N2)

  static GasEnvironment nitrogen_mbar(double pressure_mbar, double temperature = 293.0);
  void validate() const;
};

struct TrapConfig {
  double r0 = 1.1e-3;       // m, centre to AC electrodes
  double z0 = 3.5e-3;       // m, centre to DC end caps
  double eta_ac = 0.82;
  double kappa_dc = 0.086;
  double dc_voltage = 100.0;  // U_o, V
  double ac_voltage = 200.0;  // V_o, V
  double drive_angular_freq = 2.0 * 3.14159265358979323846 * 2000.0;  // rad/s

  void validate() const;
};

struct MathieuParams {
  std::array<double, 3> a{};
  std::array<double, 3> q{};
};

MathieuParams mathieu_params(const TrapConfig& trap, const ParticleSpec& particle);

// omega_i = (omega_d / 2) sqrt(a_i + q_i^2 / 2). Throws UntrappedAxis for a
// non-positive radicand.
double secular_frequency(const MathieuParams& mp, double drive_angular_freq, Axis axis);
std::array<double, 3> secular_frequencies(const MathieuParams& mp, double drive_angular_freq);

struct StabilityReport {
  std::array<bool, 3> trapped{};
  double max_abs_q = 0.0;
  bool pseudo_potential_valid = false;
};

inline constexpr double pseudo_potential_q_limit = 0.4;

StabilityReport stability_check(const MathieuParams& mp);

/// Epstein drag on a sphere in free molecular flow, rad/s.
double gas_damping(const ParticleSpec& particle, const GasEnvironment& gas);

double thermal_force_psd(double temperature, double mass, double gamma);

// (n_ch e)^2 S_VV / D^2
double voltage_noise_force_psd(int charge_count, double voltage_psd, double field_distance);

struct FieldGeometry {
  double D = 2.3e-3;   // m
  double D1 = 1.5e-6;  // m
};

// First-order field per volt, E/V, at the mean particle position (x, y components).
std::array<double, 2> field_gradient(const FieldGeometry& geom, double mean_x, double mean_y);

struct NoiseSource {
  std::string label;
  double force_psd = 0.0;  // N^2/Hz
};

struct NoiseBudgetEntry {
  std::string label;
  double force_psd = 0.0;
  double heating_rate = 0.0;  // quanta/s
};

struct NoiseBudget {
  std::vector<NoiseBudgetEntry> entries;  // excess sources, then the thermal entry last
  double reference_secular_freq = 0.0;    // rad/s
  double mass = 0.0;
  double temperature = 0.0;
  double excess_force_psd = 0.0;
  // Thermal S_F per unit pressure in Pa (gas damping is linear in pressure).
  double thermal_psd_per_pa = 0.0;
  // Pressure (Pa) at which excess and thermal force noise are equal.
  double three_db_pressure = 0.0;

  double thermal_force_psd_at(double pressure_pa) const;
  double effective_temperature(double pressure_pa) const;
};

double heating_rate(double force_psd, double mass, double omega);

NoiseBudget noise_budget(const std::vector<NoiseSource>& excess, const ParticleSpec& particle,
                         double omega0, const GasEnvironment& gas);

}  // namespace levnano
