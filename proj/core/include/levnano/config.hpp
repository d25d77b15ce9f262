#pragma once

// Run configuration: INI text with [section] headers, `key = value` lines and
// '#' or ';' comments. Every key is validated against a fixed schema before
// any computation; unknown sections or keys are rejected with their line.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levnano/collapse.hpp"
#include "levnano/fit.hpp"
#include "levnano/simulate.hpp"
#include "levnano/trap.hpp"

namespace levnano {

struct IniEntry {
  std::string value;
  int line = 0;
};

struct IniSection {
  int line = 0;  // of the [header]
  std::map<std::string, IniEntry> entries;
};
using IniDocument = std::map<std::string, IniSection>;

IniDocument parse_ini(const std::string& text);

struct ParticleConfig {
  double radius = 231e-9;
  double density = 1850.0;
  std::optional<double> mass = 9.6e-17;
  int charges = 80;
  double nucleus_mass = 1.66053906660e-27;
  double lattice_constant = 0.4e-9;
};

struct GasConfig {
  double pressure_mbar = 1e-4;
  double temperature = 293.0;
  double molecular_mass = 4.65e-26;
};

struct TrapConfigSection {
  double r0 = 1.1e-3, z0 = 3.5e-3;
  double eta_ac = 0.82, kappa_dc = 0.086;
  double dc_voltage = 100.0, ac_voltage = 200.0;
  double drive_freq_hz = 2000.0;
};

struct NoiseConfig {
  double excess_force_psd = 0.0;  // N^2/Hz
  double voltage_psd = 0.0;       // V^2/Hz
  double field_distance = 2.3e-3; // m
};

struct SimConfig {
  Engine engine = Engine::secular;
  double duration = 200.0;
  double output_rate = 2000.0;
  double solver_step = 0.0;
  std::vector<Axis> axes{Axis::x};
  std::map<Axis, double> f0_hz;       // overrides of the trap secular frequencies
  std::optional<double> gamma_hz;     // override of the gas damping
  bool thermal_start = true;
  double x0 = 0.0;
  DriftShape drift_shape = DriftShape::none;
  double drift_offset_hz = 0.0;
  double drift_rate_hz_per_s = 0.0;
  double drift_amplitude_hz = 0.0;
  double drift_period_s = 3600.0;
  double noise_floor = 0.0;
  bool anti_alias = false;
  std::size_t max_samples = 200'000'000;
  double camera_rate = 0.0;  // 0: no camera model
  double pixel_size = 0.0;   // 0: no quantization
};

struct LockinSection {
  double f_lo_hz = 0.0;  // 0: the axis secular frequency
  int order = 4;
  double cutoff_hz = 10.0;
  std::size_t decimation = 10;
};

struct FitSection {
  double segment_s = 0.0;  // 0: record length / 8
  double overlap = 0.5;
  double f_min_hz = 0.0;
  double f_max_hz = 0.0;
  bool window_aware = true;
  WeightScheme weights = WeightScheme::model;
  std::size_t block = 1;
};

struct SweepSection {
  std::vector<double> pressures_mbar;
  double duration = 86400.0;
  double output_rate = 0.5;
  double excess_gamma_hz = 0.0;
  std::vector<Axis> axes{Axis::x, Axis::y};
  std::size_t segments = 16;
  double confidence = 0.95;
};

struct BoundsSection {
  double gamma_cm_hz = 48e-6;
  double confidence = 0.95;
  std::vector<std::string> models{"dcsl", "ddp"};
  std::size_t grid = 200;
  double dcsl_T = 1e-7;
  CollapseVariant dcsl_variant = CollapseVariant::sphere;
  double lambda_min = 1e-20, lambda_max = 1e-4;
  double rc_min = 1e-9, rc_max = 1e-3;
  CollapseVariant ddp_variant = CollapseVariant::single_particle;
  double R0_min = 1e-18, R0_max = 1e-2;
  double ddp_T_min = 1e-18, ddp_T_max = 1e12;
  double ddp_T_scan = 2.7;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  ParticleConfig particle;
  GasConfig gas;
  TrapConfigSection trap;
  NoiseConfig noise;
  SimConfig sim;
  LockinSection lockin;
  FitSection fit;
  SweepSection sweep;
  BoundsSection bounds;

  ParticleSpec particle_spec() const;
  GasEnvironment gas_environment() const;
  TrapConfig trap_config() const;
  /// Excess force PSD from the noise section, N^2/Hz.
  double excess_force_psd() const;
  /// Secular frequency of an axis, rad/s (override, else trap pseudopotential).
  double omega0(Axis a) const;
  double gamma() const;
  SimPlan sim_plan() const;

  /// Canonical text form without the output location; hashing it identifies the run.
  std::string canonical() const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace levnano
