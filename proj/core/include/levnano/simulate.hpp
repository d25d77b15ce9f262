#pragma once

// Synthetic records of a trapped particle: thermal Langevin motion at the
// secular level, slowly varying quadratures in the rotating frame, and the
// full Mathieu equation with micromotion.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "levnano/filters.hpp"
#include "levnano/rng.hpp"
#include "levnano/timeseries.hpp"
#include "levnano/trap.hpp"

namespace levnano {

enum class DriftShape { none, sinusoidal, linear, sinusoidal_linear };
enum class Engine { secular, quadrature, mathieu };

std::string to_string(DriftShape s);
std::string to_string(Engine e);
DriftShape parse_drift_shape(const std::string& s);
Engine parse_engine(const std::string& s);

/// Deterministic secular-frequency excursion,
/// d_omega(t) = offset + linear_rate t + mod_amplitude sin(2 pi t / mod_period).
/// The linear and sinusoidal terms only act when `shape` includes them.
struct DriftProfile {
  double offset = 0.0;         // rad/s
  double linear_rate = 0.0;    // rad/s^2
  double mod_amplitude = 0.0;  // rad/s
  double mod_period = 0.0;     // s
  DriftShape shape = DriftShape::none;

  bool has_linear() const noexcept;
  bool has_sinusoid() const noexcept;
  bool is_constant() const noexcept { return !has_linear() && !has_sinusoid(); }

  double delta_omega(double t) const noexcept;
  /// Accumulated phase, integral of delta_omega from 0 to t.
  double phase(double t) const noexcept;
  /// Lower bound of delta_omega over [0, duration].
  double min_delta_omega(double duration) const noexcept;
  /// Upper bound of |delta_omega| over [0, duration].
  double max_abs_delta_omega(double duration) const noexcept;

  void validate() const;
};

struct AxisPlan {
  Axis axis = Axis::x;
  double omega0 = 0.0;     // rad/s; ignored by the Mathieu engine
  double gamma = 0.0;      // rad/s
  double force_psd = 0.0;  // N^2/Hz, <F F'> = S_F delta
  DriftProfile drift;
  // Start from the stationary distribution; otherwise from the fields below.
  bool thermal_start = true;
  double x0 = 0.0, v0 = 0.0;  // displacement engines
  double X0 = 0.0, Y0 = 0.0;  // quadrature engine
};

struct SimPlan {
  double duration = 0.0;     // s
  double solver_step = 0.0;  // s, 0 selects the largest admissible step
  double output_rate = 0.0;  // Hz
  std::uint64_t seed = 0;
  double mass = 0.0;         // kg
  std::vector<AxisPlan> axes;
  // One-sided white displacement-noise floor, m^2/Hz.
  double measurement_noise_floor = 0.0;
  Engine engine = Engine::secular;
  std::size_t max_samples = 200'000'000;
  // Low-pass applied at the solver rate before sampling (integrator engines).
  std::optional<AntiAlias> anti_alias;

  std::size_t sample_count() const;
  void validate() const;
};

/// Constant-coefficient oscillator advanced by the exact Gaussian transition
/// of (x, v) over a fixed step h.
class ExactOscillatorStep {
 public:
  ExactOscillatorStep(double omega, double gamma, double accel_psd, double h);

  void advance(double& x, double& v, RandomStream& rng) const;
  void advance_noiseless(double& x, double& v) const noexcept;

  double stationary_var_x() const noexcept { return s_x_; }
  double stationary_var_v() const noexcept { return s_v_; }

 private:
  double m00_, m01_, m10_, m11_;
  double l00_ = 0, l10_ = 0, l11_ = 0;
  double s_x_ = 0, s_v_ = 0;
  bool noisy_ = false;
};

std::vector<TimeSeries> simulate_secular(const SimPlan& plan);

/// Streams exact OU quadratures, rotated by the accumulated drift phase:
/// X + iY = (X' + iY') exp(-i phi(t)).
class QuadratureGenerator {
 public:
  QuadratureGenerator(const AxisPlan& axis, double mass, double sample_rate, RandomStream rng,
                      double noise_floor = 0.0);

  void next(double& X, double& Y);
  std::size_t index() const noexcept { return n_; }
  double stationary_variance() const noexcept { return var_; }
  double sample_rate() const noexcept { return fs_; }

 private:
  AxisPlan axis_;
  double fs_;
  RandomStream rng_;
  RandomStream noise_rng_;
  double var_ = 0.0;
  double decay_ = 1.0;
  double kick_ = 0.0;
  double floor_sd_ = 0.0;
  double xr_ = 0.0, yr_ = 0.0;
  std::size_t n_ = 0;
};

/// Displacement u = X cos(w0 t) + Y sin(w0 t) synthesised from streamed
/// quadratures; valid in the rotating-wave regime gamma << w0.
class CarrierSynthesizer {
 public:
  CarrierSynthesizer(const AxisPlan& axis, double mass, double sample_rate, RandomStream rng,
                     double noise_floor = 0.0);

  double next();
  const QuadratureGenerator& quadratures() const noexcept { return gen_; }

 private:
  QuadratureGenerator gen_;
  double f0_;
  double fs_;
  RandomStream noise_rng_;
  double floor_sd_;
};

std::vector<QuadratureSeries> simulate_quadrature(const SimPlan& plan);

std::vector<TimeSeries> simulate_mathieu(const SimPlan& plan, const TrapConfig& trap,
                                         const ParticleSpec& particle);
std::vector<TimeSeries> simulate_mathieu(const SimPlan& plan, const MathieuParams& mp,
                                         double drive_angular_freq);

struct MeasurementModel {
  double camera_rate = 0.0;  // Hz; must divide the input rate
  double noise_floor = 0.0;  // one-sided, m^2/Hz
  std::optional<double> pixel_size;
  bool anti_alias = true;
};

TimeSeries apply_measurement(const TimeSeries& ts, const MeasurementModel& model,
                             std::uint64_t seed);

}  // namespace levnano
