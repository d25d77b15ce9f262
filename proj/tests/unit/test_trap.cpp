#include "doctest.h"

#include <cmath>

#include "levnano/constants.hpp"
#include "levnano/errors.hpp"
#include "levnano/trap.hpp"

using namespace levnano;
namespace c = levnano::constants;

// Reference values: tests/oracles/golden.py (50-digit mpmath).

TEST_CASE("mathieu parameters of the reference trap") {
  auto mp = mathieu_params(TrapConfig{}, ParticleSpec::reference_silica());
  CHECK(mp.q[0] == doctest::Approx(0.22919117601239808).epsilon(1e-13));
  CHECK(mp.q[1] == doctest::Approx(-0.22919117601239808).epsilon(1e-13));
  CHECK(mp.q[2] == 0.0);
  CHECK(mp.a[0] == doctest::Approx(-0.002374279121538093).epsilon(1e-13));
  CHECK(mp.a[1] == doctest::Approx(mp.a[0]).epsilon(1e-15));
  CHECK(mp.a[2] == doctest::Approx(0.004748558243076186).epsilon(1e-13));

  auto w = secular_frequencies(mp, TrapConfig{}.drive_angular_freq);
  CHECK(w[0] / c::two_pi == doctest::Approx(154.56396235680206).epsilon(1e-13));
  CHECK(w[1] == doctest::Approx(w[0]));
  CHECK(w[2] / c::two_pi == doctest::Approx(68.909783362568961).epsilon(1e-13));

  auto st = stability_check(mp);
  CHECK(st.trapped[0]);
  CHECK(st.trapped[2]);
  CHECK(st.pseudo_potential_valid);
}

TEST_CASE("large ac voltage leaves the pseudopotential regime") {
  TrapConfig t;
  t.ac_voltage = 400.0;
  auto st = stability_check(mathieu_params(t, ParticleSpec::reference_silica()));
  CHECK(st.max_abs_q > pseudo_potential_q_limit);
  CHECK_FALSE(st.pseudo_potential_valid);
}

TEST_CASE("inverted end-cap voltage untraps z and names it") {
  TrapConfig t;
  t.dc_voltage = -100.0;
  auto mp = mathieu_params(t, ParticleSpec::reference_silica());
  CHECK_FALSE(stability_check(mp).trapped[2]);
  try {
    secular_frequency(mp, t.drive_angular_freq, Axis::z);
    FAIL("expected UntrappedAxis");
  } catch (const UntrappedAxis& e) {
    CHECK(e.axis() == 'z');
  }
  CHECK(secular_frequency(mp, t.drive_angular_freq, Axis::x) > 0);
}

TEST_CASE("epstein damping") {
  auto p = ParticleSpec::reference_silica();
  double g = gas_damping(p, GasEnvironment::nitrogen_mbar(1e-4));
  CHECK(g / c::two_pi == doctest::Approx(0.027921570286050207).epsilon(1e-12));
  // linear in pressure
  double g7 = gas_damping(p, GasEnvironment::nitrogen_mbar(1e-7));
  CHECK(g7 * 1e3 == doctest::Approx(g).epsilon(1e-12));
  CHECK_THROWS_AS(gas_damping(p, GasEnvironment::nitrogen_mbar(-1.0)), InvalidParameter);
}

TEST_CASE("force spectra and heating") {
  const double m = 9.6e-17, gamma = 0.1, T = 293.0;
  CHECK(thermal_force_psd(T, m, gamma) == doctest::Approx(2 * c::k_B * T * m * gamma));
  CHECK(heating_rate(1e-38, m, 1000.0) == doctest::Approx(1e-38 / (2 * m * c::hbar * 1000.0)));
  const double S_VV = 1e-12, D = 2.3e-3;
  CHECK(voltage_noise_force_psd(80, S_VV, D) ==
        doctest::Approx(std::pow(80 * c::e_charge, 2) * S_VV / (D * D)));
}

TEST_CASE("noise budget: 3 dB pressure balances thermal and excess force") {
  auto p = ParticleSpec::reference_silica();
  const double excess = 1e-40;
  auto nb = noise_budget({{"drive", excess}}, p, c::two_pi * 150.0, GasEnvironment::nitrogen_mbar(1e-7));
  REQUIRE(nb.entries.size() == 2);
  CHECK(nb.entries.back().label == "thermal");
  CHECK(nb.thermal_force_psd_at(nb.three_db_pressure) == doctest::Approx(excess).epsilon(1e-12));
  // at the 3 dB point the effective temperature doubles
  CHECK(nb.effective_temperature(nb.three_db_pressure) == doctest::Approx(2 * 293.0).epsilon(1e-12));
  // excess-free budget is thermal at every pressure
  auto nb0 = noise_budget({}, p, c::two_pi * 150.0, GasEnvironment::nitrogen_mbar(1e-7));
  CHECK(nb0.effective_temperature(1e-5) == doctest::Approx(293.0));
}

TEST_CASE("particle validation") {
  CHECK_THROWS_AS(ParticleSpec::sphere(-1e-7, 1850, 10), InvalidParameter);
  auto s = ParticleSpec::sphere(100e-9, 2000, 10);
  CHECK(s.mass == doctest::Approx(4.0 / 3.0 * c::pi * 1e-21 * 2000));
  CHECK(ParticleSpec::reference_silica().charge() == doctest::Approx(80 * c::e_charge));
  CHECK(parse_axis('y') == Axis::y);
  CHECK_THROWS_AS(parse_axis('w'), InvalidParameter);
}
