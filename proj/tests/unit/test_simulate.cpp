#include "doctest.h"

#include <cmath>

#include "levnano/constants.hpp"
#include "levnano/errors.hpp"
#include "levnano/simulate.hpp"
#include "levnano/stats.hpp"

using namespace levnano;
namespace c = levnano::constants;

namespace {

const double kMass = 9.6e-17;

AxisPlan thermal_axis(double f0, double gamma_hz, double T = 293.0) {
  AxisPlan ax;
  ax.omega0 = c::two_pi * f0;
  ax.gamma = c::two_pi * gamma_hz;
  ax.force_psd = thermal_force_psd(T, kMass, ax.gamma);
  return ax;
}

// zero-crossing frequency, linear interpolation between samples
double crossing_frequency(const TimeSeries& ts) {
  double first = -1, last = -1;
  int n = 0;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (ts.values[i - 1] < 0 && ts.values[i] >= 0) {
      double t = ts.time(i - 1) + (-ts.values[i - 1]) / (ts.values[i] - ts.values[i - 1]) / ts.sample_rate;
      if (first < 0) first = t;
      last = t;
      ++n;
    }
  }
  return (n - 1) / (last - first);
}

}  // namespace

TEST_CASE("exact step reproduces the damped oscillator") {
  const double w = 10.0, h = 1e-3;
  for (double g : {0.5, 2 * w, 50.0}) {  // under-, critically and over-damped
    ExactOscillatorStep step(w, g, 0.0, h);
    double x = 1.0, v = 0.0;
    const int n = 700;
    for (int i = 0; i < n; ++i) step.advance_noiseless(x, v);
    double t = n * h, expect;
    double disc = g * g / 4 - w * w;
    if (std::abs(disc) < 1e-12) {
      expect = std::exp(-g * t / 2) * (1 + g * t / 2);
    } else if (disc < 0) {
      double w1 = std::sqrt(-disc);
      expect = std::exp(-g * t / 2) * (std::cos(w1 * t) + g / (2 * w1) * std::sin(w1 * t));
    } else {
      double s = std::sqrt(disc);
      double r1 = -g / 2 + s, r2 = -g / 2 - s;
      expect = (r1 * std::exp(r2 * t) - r2 * std::exp(r1 * t)) / (r1 - r2);
    }
    CHECK(x == doctest::Approx(expect).epsilon(1e-9));
  }
}

TEST_CASE("exact step stationary variance") {
  const double w = 100.0, g = 3.0, D = 2.0;
  ExactOscillatorStep s(w, g, D, 1e-3);
  CHECK(s.stationary_var_x() == doctest::Approx(D / (2 * g * w * w)));
  CHECK(s.stationary_var_v() == doctest::Approx(D / (2 * g)));
}

TEST_CASE("secular engine: equipartition and determinism") {
  SimPlan plan;
  plan.duration = 100.0;
  plan.output_rate = 2000.0;
  plan.mass = kMass;
  plan.seed = 7;
  plan.axes = {thermal_axis(100.0, 5.0)};
  auto a = simulate_secular(plan);
  REQUIRE(a.size() == 1);
  CHECK(a[0].size() == 200000);
  const double w = plan.axes[0].omega0;
  double expect = c::k_B * 293.0 / (kMass * w * w);
  CHECK(sample_variance(a[0].values) == doctest::Approx(expect).epsilon(0.05));

  auto b = simulate_secular(plan);
  CHECK(a[0].values == b[0].values);
  plan.seed = 8;
  auto d = simulate_secular(plan);
  CHECK(a[0].values != d[0].values);
}

TEST_CASE("secular engine with drift stays on the drifting frequency") {
  SimPlan plan;
  plan.duration = 20.0;
  plan.output_rate = 4000.0;
  plan.mass = kMass;
  plan.seed = 1;
  AxisPlan ax = thermal_axis(100.0, 0.0);
  ax.force_psd = 0;
  ax.thermal_start = false;
  ax.x0 = 1e-6;
  ax.drift.shape = DriftShape::none;
  ax.drift.offset = c::two_pi * 5.0;
  plan.axes = {ax};
  auto ts = simulate_secular(plan)[0];
  CHECK(crossing_frequency(ts) == doctest::Approx(105.0).epsilon(1e-4));
}

TEST_CASE("drift that pushes the frequency below zero aborts with the axis") {
  SimPlan plan;
  plan.duration = 10.0;
  plan.output_rate = 1000.0;
  plan.mass = kMass;
  AxisPlan ax = thermal_axis(50.0, 1.0);
  ax.axis = Axis::y;
  ax.drift.shape = DriftShape::linear;
  ax.drift.linear_rate = -c::two_pi * 10.0;
  plan.axes = {ax};
  try {
    simulate_secular(plan);
    FAIL("expected UntrappedAxis");
  } catch (const UntrappedAxis& e) {
    CHECK(e.axis() == 'y');
  }
}

TEST_CASE("drift phase is the integral of the frequency offset") {
  DriftProfile d;
  d.shape = DriftShape::sinusoidal_linear;
  d.offset = 0.3;
  d.linear_rate = 1e-3;
  d.mod_amplitude = 2.0;
  d.mod_period = 50.0;
  for (double t : {0.0, 3.0, 17.5, 120.0}) {
    double h = 1e-4;
    double dphi = (d.phase(t + h) - d.phase(t - h)) / (2 * h);
    CHECK(dphi == doctest::Approx(d.delta_omega(t)).epsilon(1e-7));
  }
  CHECK(d.phase(0.0) == 0.0);
}

TEST_CASE("mathieu engine: secular frequency and stability edge") {
  const double wd = c::two_pi * 2000.0;
  SimPlan plan;
  plan.engine = Engine::mathieu;
  plan.duration = 10.0;
  plan.output_rate = 40000.0;
  plan.mass = kMass;
  AxisPlan ax;
  ax.thermal_start = false;
  ax.x0 = 1e-6;
  plan.axes = {ax};

  MathieuParams mp;
  mp.q = {0.2, -0.2, 0.0};
  auto ts = simulate_mathieu(plan, mp, wd)[0];
  double f_pseudo = wd / 2 * std::sqrt(0.02) / c::two_pi;
  CHECK(crossing_frequency(ts) == doctest::Approx(f_pseudo).epsilon(0.01));

  // a = 0: first instability at q = 0.908
  plan.duration = 0.5;
  mp.q = {0.85, -0.85, 0.0};
  CHECK_NOTHROW(simulate_mathieu(plan, mp, wd));
  mp.q = {0.95, -0.95, 0.0};
  CHECK_THROWS_AS(simulate_mathieu(plan, mp, wd), NumericalFailure);
}

TEST_CASE("quadrature engine statistics") {
  const double fs = 10.0;
  AxisPlan ax = thermal_axis(150.0, 0.05);
  QuadratureGenerator gen(ax, kMass, fs, RandomStream(3));
  const double var = ax.force_psd / (2 * kMass * kMass * ax.omega0 * ax.omega0 * ax.gamma);
  CHECK(gen.stationary_variance() == doctest::Approx(var));
  const std::size_t n = 400000;
  std::vector<double> X(n);
  double Y;
  for (auto& x : X) gen.next(x, Y);
  CHECK(sample_variance(X) == doctest::Approx(var).epsilon(0.05));
  double num = 0, den = 0, mu = mean(X);
  for (std::size_t i = 1; i < n; ++i) num += (X[i] - mu) * (X[i - 1] - mu);
  for (double x : X) den += (x - mu) * (x - mu);
  CHECK(num / den == doctest::Approx(std::exp(-ax.gamma / (2 * fs))).epsilon(2e-3));
}

TEST_CASE("quadrature engine requires the rotating-wave regime") {
  AxisPlan ax = thermal_axis(1.0, 0.5);
  CHECK_THROWS_AS(QuadratureGenerator(ax, kMass, 10.0, RandomStream(1)), InvalidParameter);
}

TEST_CASE("measurement model") {
  TimeSeries ts;
  ts.sample_rate = 1000.0;
  ts.values.resize(10000);
  for (std::size_t i = 0; i < ts.size(); ++i) ts.values[i] = 1e-6 * std::sin(0.01 * static_cast<double>(i));
  MeasurementModel mm;
  mm.camera_rate = 300.0;
  CHECK_THROWS_AS(apply_measurement(ts, mm, 1), InvalidParameter);
  mm.camera_rate = 100.0;
  mm.pixel_size = 1e-8;
  auto out = apply_measurement(ts, mm, 1);
  CHECK(out.sample_rate == 100.0);
  CHECK(out.size() == 1000);
  for (double v : out.values) CHECK(std::abs(v / 1e-8 - std::round(v / 1e-8)) < 1e-6);
}
