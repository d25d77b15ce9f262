#include "doctest.h"

#include <cmath>

#include "levnano/constants.hpp"
#include "levnano/demod.hpp"
#include "levnano/errors.hpp"
#include "levnano/rng.hpp"

using namespace levnano;
namespace c = levnano::constants;

TEST_CASE("single-pole cascade") {
  CascadedLowPass lp(4, 10.0, 1000.0);
  CHECK(lp.alpha() == doctest::Approx(-std::expm1(-c::two_pi * 10.0 / 1000.0)));
  CHECK(lp.power_gain(0.0) == doctest::Approx(1.0));
  CHECK(lp.power_gain(5.0) > lp.power_gain(20.0));
  CHECK(lp.settling_samples() == 500);
  // unit step settles
  double y = 0;
  for (int i = 0; i < 2000; ++i) y = lp.process(1.0);
  CHECK(y == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lp.noise_bandwidth() > 0);
  CHECK(lp.noise_bandwidth() < 10.0 * c::pi / 2);
}

TEST_CASE("lock-in recovers a tone's quadratures") {
  TimeSeries ts;
  ts.sample_rate = 5000.0;
  const double f0 = 317.0, A = 2.5e-7, phi = 0.7;
  ts.values.resize(50000);
  for (std::size_t i = 0; i < ts.size(); ++i)
    ts.values[i] = A * std::cos(c::two_pi * f0 * ts.time(i) + phi);
  LockinConfig cfg;
  cfg.f_lo = f0;
  cfg.cutoff = 20.0;
  cfg.decimation = 10;
  auto q = lockin(ts, cfg);
  CHECK(q.sample_rate == doctest::Approx(500.0));
  REQUIRE(q.size() > 100);
  // u = X cos + Y sin
  CHECK(q.X.back() == doctest::Approx(A * std::cos(phi)).epsilon(1e-4));
  CHECK(q.Y.back() == doctest::Approx(-A * std::sin(phi)).epsilon(1e-4));
  // settling discarded, time axis shifted accordingly
  CHECK(q.t0 >= 5.0 / cfg.cutoff);
  auto amp = amplitude(q);
  CHECK(amp.R.back() == doctest::Approx(A).epsilon(1e-4));
  CHECK(amp.R2.back() == doctest::Approx(A * A).epsilon(2e-4));
}

TEST_CASE("lock-in configuration checks") {
  LockinConfig cfg;
  cfg.f_lo = 100.0;
  cfg.cutoff = 60.0;
  cfg.decimation = 10;
  CHECK_THROWS_AS(cfg.validate(1000.0), InvalidParameter);  // cutoff above output Nyquist
  cfg.cutoff = 5.0;
  CHECK_NOTHROW(cfg.validate(1000.0));
  cfg.f_lo = 600.0;
  CHECK_THROWS_AS(cfg.validate(1000.0), InvalidParameter);
}

TEST_CASE("rayleigh estimators agree on rayleigh samples") {
  RandomStream rng(11);
  const double s = 2.0;
  std::vector<double> R(200000);
  for (auto& r : R) r = s * std::hypot(rng.normal(), rng.normal());
  auto st = rayleigh_stats(R);
  CHECK(st.sigma_from_mean == doctest::Approx(s).epsilon(0.01));
  CHECK(st.sigma_from_var == doctest::Approx(s).epsilon(0.01));
  CHECK(st.relative_difference < 0.02);
  CHECK_FALSE(st.low_sample_warning);
  REQUIRE(st.bin_centers.size() == 50);
  // histogram normalized
  double area = 0;
  for (std::size_t k = 0; k < st.density.size(); ++k)
    area += st.density[k] * (st.bin_centers[1] - st.bin_centers[0]);
  CHECK(area == doctest::Approx(1.0).epsilon(1e-9));

  auto few = rayleigh_stats(R, 12.0);
  CHECK(few.low_sample_warning);
  CHECK(rayleigh_density(s, s) == doctest::Approx(std::exp(-0.5) / s));
}
