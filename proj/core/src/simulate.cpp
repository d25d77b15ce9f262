#include "levnano/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "detail.hpp"
#include "levnano/constants.hpp"
#include "levnano/errors.hpp"

namespace levnano {

namespace c = constants;
using detail::fmt;

std::string to_string(DriftShape s) {
  switch (s) {
    case DriftShape::none: return "none";
    case DriftShape::sinusoidal: return "sinusoidal";
    case DriftShape::linear: return "linear";
    case DriftShape::sinusoidal_linear: return "sinusoidal+linear";
  }
  return "?";
}

std::string to_string(Engine e) {
  switch (e) {
    case Engine::secular: return "secular";
    case Engine::quadrature: return "quadrature";
    case Engine::mathieu: return "mathieu";
  }
  return "?";
}

DriftShape parse_drift_shape(const std::string& s) {
  if (s == "none") return DriftShape::none;
  if (s == "sinusoidal") return DriftShape::sinusoidal;
  if (s == "linear") return DriftShape::linear;
  if (s == "sinusoidal+linear" || s == "sinusoidal_linear") return DriftShape::sinusoidal_linear;
  throw InvalidParameter("unknown drift shape '" + s + "'");
}

Engine parse_engine(const std::string& s) {
  if (s == "secular") return Engine::secular;
  if (s == "quadrature") return Engine::quadrature;
  if (s == "mathieu") return Engine::mathieu;
  throw InvalidParameter("unknown engine '" + s + "'");
}

// --- drift -----------------------------------------------------------------

bool DriftProfile::has_linear() const noexcept {
  return (shape == DriftShape::linear || shape == DriftShape::sinusoidal_linear) && linear_rate != 0.0;
}

bool DriftProfile::has_sinusoid() const noexcept {
  return (shape == DriftShape::sinusoidal || shape == DriftShape::sinusoidal_linear) &&
         mod_amplitude != 0.0;
}

double DriftProfile::delta_omega(double t) const noexcept {
  double d = offset;
  if (has_linear()) d += linear_rate * t;
  if (has_sinusoid()) d += mod_amplitude * std::sin(c::two_pi * t / mod_period);
  return d;
}

double DriftProfile::phase(double t) const noexcept {
  double p = offset * t;
  if (has_linear()) p += 0.5 * linear_rate * t * t;
  if (has_sinusoid()) {
    double half = c::pi * t / mod_period;
    // 1 - cos(2u) = 2 sin^2(u), no cancellation for small t
    p += mod_amplitude * mod_period / c::two_pi * 2.0 * std::sin(half) * std::sin(half);
  }
  return p;
}

double DriftProfile::min_delta_omega(double duration) const noexcept {
  double d = offset;
  if (has_linear()) d += std::min(0.0, linear_rate * duration);
  if (has_sinusoid()) d -= std::abs(mod_amplitude);
  return d;
}

double DriftProfile::max_abs_delta_omega(double duration) const noexcept {
  double d = std::abs(offset);
  if (has_linear()) d += std::abs(linear_rate) * duration;
  if (has_sinusoid()) d += std::abs(mod_amplitude);
  return d;
}

void DriftProfile::validate() const {
  if (!std::isfinite(offset) || !std::isfinite(linear_rate) || !std::isfinite(mod_amplitude))
    throw InvalidParameter("drift parameters must be finite");
  bool sin = shape == DriftShape::sinusoidal || shape == DriftShape::sinusoidal_linear;
  if (sin && !(mod_period > 0)) throw InvalidParameter("drift mod_period must be > 0");
}

// --- plan ------------------------------------------------------------------

std::size_t SimPlan::sample_count() const {
  return static_cast<std::size_t>(std::llround(duration * output_rate));
}

void SimPlan::validate() const {
  if (!(duration > 0)) throw InvalidParameter("sim duration must be > 0");
  if (!(output_rate > 0)) throw InvalidParameter("sim output_rate must be > 0");
  if (!(mass > 0)) throw InvalidParameter("sim mass must be > 0");
  if (!(solver_step >= 0)) throw InvalidParameter("sim solver_step must be >= 0");
  if (!(measurement_noise_floor >= 0)) throw InvalidParameter("measurement noise floor must be >= 0");
  if (axes.empty()) throw InvalidParameter("sim plan has no axes");
  if (solver_step > 0 && output_rate * solver_step > 1.0 + 1e-12)
    throw InvalidParameter("output_rate must not exceed 1/solver_step");
  if (sample_count() < 2) throw InvalidParameter("sim produces fewer than 2 samples");
  if (sample_count() > max_samples)
    throw InvalidParameter("sim needs " + std::to_string(sample_count()) +
                           " samples per axis, above the cap of " + std::to_string(max_samples));

  std::set<Axis> seen;
  for (const auto& ax : axes) {
    if (!seen.insert(ax.axis).second)
      throw InvalidParameter(std::string("axis ") + axis_name(ax.axis) + " listed twice");
    if (!(ax.gamma >= 0)) throw InvalidParameter("gamma must be >= 0");
    if (!(ax.force_psd >= 0)) throw InvalidParameter("force PSD must be >= 0");
    if (ax.force_psd > 0 && !(ax.gamma > 0))
      throw InvalidParameter("a driven axis needs gamma > 0 to reach a stationary state");
    ax.drift.validate();
    if (engine == Engine::mathieu) {
      if (!ax.drift.is_constant() || ax.drift.offset != 0.0)
        throw InvalidParameter("the Mathieu engine does not take a drift profile");
      continue;
    }
    if (!(ax.omega0 > 0)) throw InvalidParameter("secular frequency omega0 must be > 0");
    if (ax.omega0 + ax.drift.offset <= 0)
      throw UntrappedAxis(axis_name(ax.axis), std::string("axis ") + axis_name(ax.axis) +
                                                  " untrapped at t=0: omega(t) <= 0");
  }
}

namespace {

std::string axis_label(Axis a) { return std::string(1, axis_name(a)); }

void echo_plan(std::map<std::string, std::string>& md, const SimPlan& plan, const AxisPlan& ax) {
  md["engine"] = to_string(plan.engine);
  md["seed"] = std::to_string(plan.seed);
  md["axis"] = axis_label(ax.axis);
  md["duration_s"] = fmt(plan.duration);
  md["mass_kg"] = fmt(plan.mass);
  md["omega0_rad_s"] = fmt(ax.omega0);
  md["gamma_rad_s"] = fmt(ax.gamma);
  md["force_psd_N2_Hz"] = fmt(ax.force_psd);
  md["drift_shape"] = to_string(ax.drift.shape);
  md["noise_floor_m2_Hz"] = fmt(plan.measurement_noise_floor);
}

RandomStream axis_stream(const SimPlan& plan, Axis a) {
  return RandomStream(plan.seed).substream("axis:" + axis_label(a));
}

RandomStream noise_stream(std::uint64_t seed, const std::string& label) {
  return RandomStream(seed).substream("measurement:" + label);
}

void add_white_floor(std::vector<double>& v, double floor, double rate, RandomStream rng) {
  if (floor <= 0) return;
  // one-sided level S over [0, fs/2] -> variance S fs / 2
  double sd = std::sqrt(floor * rate / 2.0);
  for (double& x : v) x += sd * rng.normal();
}

void check_finite(const std::vector<double>& v, const std::string& what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw NumericalFailure(what + ": non-finite sample at index " + std::to_string(i));
}

// Splitting integrator: B(h/2) A(h/2) O(h) A(h/2) B(h/2), with an exact
// velocity Ornstein-Uhlenbeck step for O.
template <class Stiffness>
std::vector<double> integrate_baoab(const AxisPlan& ax, double mass, double h, std::size_t sub,
                                    std::size_t n_out, Stiffness stiffness, bool require_positive,
                                    double limit, double x, double v, RandomStream& rng,
                                    const std::optional<AntiAlias>& aa, double out_rate) {
  const double D = ax.force_psd / (mass * mass);
  double c1 = 1.0, c2 = 0.0;
  if (ax.gamma > 0) {
    c1 = std::exp(-ax.gamma * h);
    c2 = std::sqrt(D / (2.0 * ax.gamma) * -std::expm1(-2.0 * ax.gamma * h));
  }
  const bool noisy = D > 0;

  std::optional<CascadedLowPass> lp;
  if (aa && sub > 1) {
    lp.emplace(aa->order, aa->cutoff_fraction * out_rate, out_rate * static_cast<double>(sub));
    lp->reset(x);
  }

  std::vector<double> out(n_out);
  out[0] = x;
  const std::size_t steps = (n_out - 1) * sub;
  double k = stiffness(0.0);
  for (std::size_t s = 0; s < steps; ++s) {
    double t1 = static_cast<double>(s + 1) * h;
    v -= 0.5 * h * k * x;
    x += 0.5 * h * v;
    v = c1 * v + (noisy ? c2 * rng.normal() : 0.0);
    x += 0.5 * h * v;
    k = stiffness(t1);
    if (require_positive && !(k > 0))
      throw UntrappedAxis(axis_name(ax.axis), std::string("axis ") + axis_name(ax.axis) +
                                                  " untrapped at t=" + fmt(t1) + " s: omega(t) <= 0");
    v -= 0.5 * h * k * x;

    if (limit > 0 && !(std::abs(x) <= limit))
      throw NumericalFailure(std::string("instability on axis ") + axis_name(ax.axis) + " at t=" +
                             fmt(t1) + " s: amplitude exceeds 1e3 x reference sigma");
    double y = lp ? lp->process(x) : x;
    if ((s + 1) % sub == 0) out[(s + 1) / sub] = y;
  }
  return out;
}

// Largest step <= h_max that divides the output interval.
std::size_t substeps(double out_rate, double h_max) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil((1.0 / out_rate) / h_max - 1e-9)));
}

}  // namespace

// --- exact constant-coefficient update --------------------------------------

ExactOscillatorStep::ExactOscillatorStep(double omega, double gamma, double accel_psd, double h) {
  if (!(omega > 0) || !(gamma >= 0) || !(accel_psd >= 0) || !(h > 0))
    throw InvalidParameter("exact step needs omega > 0, gamma >= 0, noise >= 0, h > 0");
  // e^{Ah} for A = [[0, 1], [-w^2, -g]]
  const double g2 = 0.5 * gamma;
  const double disc = omega * omega - g2 * g2;
  double cs, sn;  // "cos" and "sin(W h)/W" of the appropriate branch
  if (disc > 0) {
    double W = std::sqrt(disc);
    cs = std::cos(W * h);
    sn = std::sin(W * h) / W;
  } else if (disc < 0) {
    double W = std::sqrt(-disc);
    cs = std::cosh(W * h);
    sn = std::sinh(W * h) / W;
  } else {
    cs = 1.0;
    sn = h;
  }
  const double e = std::exp(-g2 * h);
  m00_ = e * (cs + g2 * sn);
  m01_ = e * sn;
  m10_ = -e * omega * omega * sn;
  m11_ = e * (cs - g2 * sn);

  if (accel_psd > 0) {
    if (!(gamma > 0)) throw InvalidParameter("a driven oscillator needs gamma > 0");
    noisy_ = true;
    s_x_ = accel_psd / (2.0 * gamma * omega * omega);
    s_v_ = accel_psd / (2.0 * gamma);
    // Sigma(h) = Sigma_inf - M Sigma_inf M^T
    double a = s_x_ - (m00_ * m00_ * s_x_ + m01_ * m01_ * s_v_);
    double b = -(m00_ * m10_ * s_x_ + m01_ * m11_ * s_v_);
    double d = s_v_ - (m10_ * m10_ * s_x_ + m11_ * m11_ * s_v_);
    if (a > 0) {
      l00_ = std::sqrt(a);
      l10_ = b / l00_;
      l11_ = std::sqrt(std::max(0.0, d - l10_ * l10_));
    } else {
      l11_ = std::sqrt(std::max(0.0, d));
    }
  }
}

void ExactOscillatorStep::advance_noiseless(double& x, double& v) const noexcept {
  double xn = m00_ * x + m01_ * v;
  double vn = m10_ * x + m11_ * v;
  x = xn;
  v = vn;
}

void ExactOscillatorStep::advance(double& x, double& v, RandomStream& rng) const {
  advance_noiseless(x, v);
  if (!noisy_) return;
  double z1 = rng.normal(), z2 = rng.normal();
  x += l00_ * z1;
  v += l10_ * z1 + l11_ * z2;
}

// --- secular engine ---------------------------------------------------------

std::vector<TimeSeries> simulate_secular(const SimPlan& plan) {
  if (plan.engine != Engine::secular) throw InvalidParameter("plan engine is not 'secular'");
  plan.validate();
  const std::size_t n = plan.sample_count();
  const double D_over = 1.0 / (plan.mass * plan.mass);

  std::vector<TimeSeries> out;
  for (const auto& ax : plan.axes) {
    RandomStream rng = axis_stream(plan, ax.axis);
    const double omega_c = ax.omega0 + ax.drift.offset;
    const double D = ax.force_psd * D_over;
    double x = ax.x0, v = ax.v0;
    double sx = 0, sv = 0;
    if (D > 0) {
      sx = std::sqrt(D / (2 * ax.gamma * omega_c * omega_c));
      sv = std::sqrt(D / (2 * ax.gamma));
    }
    if (ax.thermal_start && D > 0) {
      x = sx * rng.normal();
      v = sv * rng.normal();
    }

    TimeSeries ts;
    ts.sample_rate = plan.output_rate;
    ts.label = axis_label(ax.axis);
    echo_plan(ts.metadata, plan, ax);

    if (ax.drift.is_constant()) {
      // Exact in distribution at any step, so the state is sampled directly
      // at the output rate.
      ExactOscillatorStep step(omega_c, ax.gamma, D, 1.0 / plan.output_rate);
      ts.values.resize(n);
      ts.values[0] = x;
      for (std::size_t i = 1; i < n; ++i) {
        step.advance(x, v, rng);
        ts.values[i] = x;
      }
      ts.metadata["integrator"] = "exact";
    } else {
      double w_max = ax.omega0 + ax.drift.max_abs_delta_omega(plan.duration);
      double h_max = 1.0 / (50.0 * w_max / c::two_pi);
      if (plan.solver_step > 0) {
        if (plan.solver_step > h_max * (1 + 1e-12))
          throw InvalidParameter("solver_step exceeds 1/(50 f0) for axis " + ts.label);
        h_max = plan.solver_step;
      }
      std::size_t sub = substeps(plan.output_rate, h_max);
      double h = 1.0 / (plan.output_rate * static_cast<double>(sub));
      double amp0 = std::hypot(ax.x0, ax.v0 / omega_c);
      double limit = 1e3 * std::max(sx, amp0);
      auto stiff = [&](double t) {
        double w = ax.omega0 + ax.drift.delta_omega(t);
        return w > 0 ? w * w : -1.0;
      };
      ts.values = integrate_baoab(ax, plan.mass, h, sub, n, stiff, true, limit, x, v, rng,
                                  plan.anti_alias, plan.output_rate);
      ts.metadata["integrator"] = "baoab";
      ts.metadata["solver_step_s"] = fmt(h);
    }
    add_white_floor(ts.values, plan.measurement_noise_floor, plan.output_rate,
                    noise_stream(plan.seed, ts.label));
    check_finite(ts.values, "secular engine");
    out.push_back(std::move(ts));
  }
  return out;
}

// --- quadrature engine ------------------------------------------------------

QuadratureGenerator::QuadratureGenerator(const AxisPlan& axis, double mass, double sample_rate,
                                         RandomStream rng, double noise_floor)
    : axis_(axis),
      fs_(sample_rate),
      rng_(rng.substream("ou")),
      noise_rng_(rng.substream("floor")) {
  if (!(mass > 0) || !(sample_rate > 0)) throw InvalidParameter("quadrature generator needs m, fs > 0");
  if (!(axis.omega0 > 0)) throw InvalidParameter("quadrature generator needs omega0 > 0");
  if (!(axis.gamma < axis.omega0 / 100.0))
    throw InvalidParameter("rotating-wave approximation invalid: gamma must be < omega0/100");
  if (axis.force_psd > 0 && !(axis.gamma > 0))
    throw InvalidParameter("a driven axis needs gamma > 0");
  axis.drift.validate();

  const double h = 1.0 / sample_rate;
  decay_ = std::exp(-0.5 * axis.gamma * h);
  if (axis.force_psd > 0) {
    var_ = axis.force_psd / (2.0 * mass * mass * axis.omega0 * axis.omega0 * axis.gamma);
    kick_ = std::sqrt(var_ * -std::expm1(-axis.gamma * h));
  }
  // White displacement floor S -> per-quadrature variance S fs after demodulation.
  floor_sd_ = std::sqrt(noise_floor * sample_rate);

  if (axis.thermal_start && var_ > 0) {
    double sd = std::sqrt(var_);
    xr_ = sd * rng_.normal();
    yr_ = sd * rng_.normal();
  } else {
    xr_ = axis.X0;
    yr_ = axis.Y0;
  }
}

void QuadratureGenerator::next(double& X, double& Y) {
  double t = static_cast<double>(n_) / fs_;
  double phi = axis_.drift.phase(t);
  double cp = std::cos(phi), sp = std::sin(phi);
  X = xr_ * cp + yr_ * sp;
  Y = yr_ * cp - xr_ * sp;
  if (floor_sd_ > 0) {
    X += floor_sd_ * noise_rng_.normal();
    Y += floor_sd_ * noise_rng_.normal();
  }
  ++n_;
  xr_ *= decay_;
  yr_ *= decay_;
  if (kick_ > 0) {
    xr_ += kick_ * rng_.normal();
    yr_ += kick_ * rng_.normal();
  }
}

CarrierSynthesizer::CarrierSynthesizer(const AxisPlan& axis, double mass, double sample_rate,
                                       RandomStream rng, double noise_floor)
    : gen_(axis, mass, sample_rate, rng.substream("quadratures")),
      f0_(axis.omega0 / c::two_pi),
      fs_(sample_rate),
      noise_rng_(rng.substream("floor")),
      floor_sd_(std::sqrt(noise_floor * sample_rate / 2.0)) {}

double CarrierSynthesizer::next() {
  std::size_t n = gen_.index();
  // phase reduced exactly in cycles before scaling, keeps day-long records precise
  double cyc = std::fmod(f0_ * static_cast<double>(n), fs_) / fs_;
  double th = c::two_pi * cyc;
  double X, Y;
  gen_.next(X, Y);
  double u = X * std::cos(th) + Y * std::sin(th);
  if (floor_sd_ > 0) u += floor_sd_ * noise_rng_.normal();
  return u;
}

std::vector<QuadratureSeries> simulate_quadrature(const SimPlan& plan) {
  if (plan.engine != Engine::quadrature) throw InvalidParameter("plan engine is not 'quadrature'");
  plan.validate();
  const std::size_t n = plan.sample_count();

  std::vector<QuadratureSeries> out;
  for (const auto& ax : plan.axes) {
    if (ax.omega0 + ax.drift.min_delta_omega(plan.duration) <= 0)
      throw UntrappedAxis(axis_name(ax.axis), std::string("axis ") + axis_name(ax.axis) +
                                                  " drift drives omega(t) <= 0 within the run");
    QuadratureGenerator gen(ax, plan.mass, plan.output_rate, axis_stream(plan, ax.axis),
                            plan.measurement_noise_floor);
    QuadratureSeries q;
    q.sample_rate = plan.output_rate;
    q.label = axis_label(ax.axis);
    echo_plan(q.metadata, plan, ax);
    q.metadata["stationary_variance_m2"] = fmt(gen.stationary_variance());
    q.X.resize(n);
    q.Y.resize(n);
    for (std::size_t i = 0; i < n; ++i) gen.next(q.X[i], q.Y[i]);
    check_finite(q.X, "quadrature engine");
    check_finite(q.Y, "quadrature engine");
    out.push_back(std::move(q));
  }
  return out;
}

// --- Mathieu engine ---------------------------------------------------------

std::vector<TimeSeries> simulate_mathieu(const SimPlan& plan, const TrapConfig& trap,
                                         const ParticleSpec& particle) {
  SimPlan p = plan;
  if (!(p.mass > 0)) p.mass = particle.mass;
  return simulate_mathieu(p, mathieu_params(trap, particle), trap.drive_angular_freq);
}

std::vector<TimeSeries> simulate_mathieu(const SimPlan& plan, const MathieuParams& mp,
                                         double wd) {
  if (plan.engine != Engine::mathieu) throw InvalidParameter("plan engine is not 'mathieu'");
  if (!(wd > 0)) throw InvalidParameter("drive frequency must be > 0");
  plan.validate();
  const std::size_t n = plan.sample_count();
  const auto report = stability_check(mp);

  std::vector<TimeSeries> out;
  for (const auto& ax : plan.axes) {
    int i = static_cast<int>(ax.axis);
    if (!report.trapped[i]) secular_frequency(mp, wd, ax.axis);  // throws UntrappedAxis
    const double w_sec = secular_frequency(mp, wd, ax.axis);
    const double a = mp.a[i], q = mp.q[i];
    const double D = ax.force_psd / (plan.mass * plan.mass);

    RandomStream rng = axis_stream(plan, ax.axis);
    double x = ax.x0, v = ax.v0, sx = 0;
    if (D > 0) sx = std::sqrt(D / (2 * ax.gamma * w_sec * w_sec));
    if (ax.thermal_start && D > 0) {
      x = sx * rng.normal();
      v = std::sqrt(D / (2 * ax.gamma)) * rng.normal();
    }

    double h_max = c::two_pi / (50.0 * std::max(w_sec, wd));
    if (plan.solver_step > 0) {
      if (plan.solver_step > h_max * (1 + 1e-12))
        throw InvalidParameter("solver_step exceeds 2 pi/(50 max(w_sec, w_d))");
      h_max = plan.solver_step;
    }
    std::size_t sub = substeps(plan.output_rate, h_max);
    double h = 1.0 / (plan.output_rate * static_cast<double>(sub));
    double limit = 1e3 * std::max(sx, std::hypot(ax.x0, ax.v0 / w_sec));
    const double k0 = 0.25 * wd * wd;
    auto stiff = [&](double t) { return k0 * (a + 2.0 * q * std::cos(wd * t)); };

    TimeSeries ts;
    ts.sample_rate = plan.output_rate;
    ts.label = axis_label(ax.axis);
    AxisPlan echo = ax;
    echo.omega0 = w_sec;
    echo_plan(ts.metadata, plan, echo);
    ts.metadata["mathieu_a"] = fmt(a);
    ts.metadata["mathieu_q"] = fmt(q);
    ts.metadata["drive_rad_s"] = fmt(wd);
    ts.metadata["solver_step_s"] = fmt(h);
    ts.values = integrate_baoab(ax, plan.mass, h, sub, n, stiff, false, limit, x, v, rng,
                                plan.anti_alias, plan.output_rate);
    add_white_floor(ts.values, plan.measurement_noise_floor, plan.output_rate,
                    noise_stream(plan.seed, ts.label));
    check_finite(ts.values, "mathieu engine");
    out.push_back(std::move(ts));
  }
  return out;
}

// --- measurement model ------------------------------------------------------

TimeSeries apply_measurement(const TimeSeries& ts, const MeasurementModel& model,
                             std::uint64_t seed) {
  if (!(model.camera_rate > 0)) throw InvalidParameter("camera rate must be > 0");
  if (model.camera_rate > ts.sample_rate * (1 + 1e-12))
    throw InvalidParameter("camera rate exceeds the input sample rate");
  if (!(model.noise_floor >= 0)) throw InvalidParameter("noise floor must be >= 0");
  if (model.pixel_size && !(*model.pixel_size > 0)) throw InvalidParameter("pixel size must be > 0");
  double ratio = ts.sample_rate / model.camera_rate;
  auto factor = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(factor)) > 1e-9 * ratio)
    throw InvalidParameter("camera rate must divide the input sample rate");

  AntiAlias aa;
  TimeSeries out;
  out.sample_rate = ts.sample_rate / static_cast<double>(factor);
  out.t0 = ts.t0;
  out.label = ts.label;
  out.metadata = ts.metadata;
  out.values = decimate(ts.values, ts.sample_rate, factor, model.anti_alias ? &aa : nullptr);
  add_white_floor(out.values, model.noise_floor, out.sample_rate, noise_stream(seed, "camera:" + ts.label));
  if (model.pixel_size) {
    double p = *model.pixel_size;
    for (double& x : out.values) x = std::round(x / p) * p;
  }
  out.metadata["camera_rate_Hz"] = fmt(out.sample_rate);
  out.metadata["camera_noise_floor_m2_Hz"] = fmt(model.noise_floor);
  if (model.pixel_size) out.metadata["pixel_size_m"] = fmt(*model.pixel_size);
  return out;
}

}  // namespace levnano
