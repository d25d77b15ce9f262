#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "levnano/collapse.hpp"
#include "levnano/constants.hpp"
#include "levnano/errors.hpp"

using namespace levnano;
namespace c = levnano::constants;

// Reference values: tests/oracles/golden.py (50-digit mpmath, closed forms).

TEST_CASE("chi") {
  CHECK(chi(c::amu, 1e-7, 1.5e-6) == doctest::Approx(0.26949296734161093).epsilon(1e-12));
}

TEST_CASE("sphere brackets across the series switch") {
  struct P { double x, v; };
  for (P p : {P{1e-3, 1.6658335832777877e-7}, P{0.3, 0.012939691893170307}, P{0.49, 0.031509635753461249},
              P{0.51, 0.033811574154485326}, P{2, 0.27067056647322538}, P{50, 0.96}})
    CHECK(dcsl_sphere_bracket(p.x) == doctest::Approx(p.v).epsilon(1e-12));
  for (P p : {P{1e-2, 1.6666166677380767e-13}, P{0.3, 0.00011828179543030367}, P{0.49, 0.0021489230148930897},
              P{0.51, 0.0027160771591916728}, P{1, 0.12576882445341173}, P{5, 148.55673136316829}})
    CHECK(ddp_sphere_bracket(p.x) == doctest::Approx(p.v).epsilon(1e-11));
  // continuity at the switch
  CHECK(dcsl_sphere_bracket(0.5 - 1e-12) == doctest::Approx(dcsl_sphere_bracket(0.5)).epsilon(1e-10));
  CHECK(ddp_sphere_bracket(0.5 - 1e-12) == doctest::Approx(ddp_sphere_bracket(0.5)).epsilon(1e-10));
}

TEST_CASE("dCSL rates and spectrum") {
  auto p = ParticleSpec::reference_silica();
  DcslParams d{1e-14, 1.5e-6, 1e-7};
  CHECK(eta_dcsl_sphere(p, d) == doctest::Approx(2.236078978549301e+18).epsilon(1e-11));
  CHECK(gamma_dcsl(p, d) == doctest::Approx(0.00011909272932652722).epsilon(1e-11));
  CHECK(s_dcsl_psd(c::two_pi * 150, p, d, c::two_pi * 81e-6) ==
        doctest::Approx(2.4880900932565049e-50).epsilon(1e-11));
  // linear in lambda
  DcslParams d2 = d;
  d2.lambda *= 10;
  CHECK(gamma_dcsl(p, d2) == doctest::Approx(10 * gamma_dcsl(p, d)).epsilon(1e-13));
}

TEST_CASE("dDP single-particle rate") {
  auto p = ParticleSpec::reference_silica();
  CHECK(gamma_ddp(p, {1e-15, 2.7}) == doctest::Approx(442063.24001020958).epsilon(1e-11));
}

namespace {

double F(double x) { return x < 1e-4 ? 1.0 - x * x / 10.0 : 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x); }

double kspace(const std::function<double(double)>& f, std::initializer_list<double> breaks) {
  double sum = 0, a = 0;
  for (double b : breaks) {
    sum += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
    a = b;
  }
  return sum + boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                   f, a, std::numeric_limits<double>::infinity(), 15, 1e-13);
}

}  // namespace

TEST_CASE("sphere strengths against k-space integrals") {
  auto p = ParticleSpec::reference_silica();
  const double r = p.radius, m = p.mass;
  for (double rc : {1e-8, 1e-7, 1e-6, 1e-5}) {
    auto f = [&](double k) { return std::pow(k, 4) * std::exp(-k * k * rc * rc) * F(k * r) * F(k * r); };
    double eta = 4 * 1e-8 * m * m * std::pow(rc, 3) / (3 * std::sqrt(c::pi) * c::m0 * c::m0) *
                 kspace(f, {1 / r, 1 / rc, 10 / rc});
    CHECK(eta_csl_sphere(p, 1e-8, rc) == doctest::Approx(eta).epsilon(1e-7));
  }
  for (double R0 : {1e-9, 1e-7, 1e-6}) {
    auto f = [&](double k) { return k * k * std::exp(-k * k * R0 * R0) * F(k * r) * F(k * r); };
    double eta = 2 * c::G * m * m / (3 * c::pi * c::hbar) * kspace(f, {1 / r, 1 / R0, 10 / R0});
    CHECK(eta_dp_sphere(p, R0) == doctest::Approx(eta).epsilon(1e-7));
  }
}

TEST_CASE("hot limit recovers the standard models") {
  auto p = ParticleSpec::reference_silica();
  CHECK(eta_dcsl_sphere(p, {1e-8, 1e-7, 1e12}) == doctest::Approx(eta_csl_sphere(p, 1e-8, 1e-7)).epsilon(1e-6));
  CHECK(eta_ddp_sphere(p, {1e-7, 1e12}) == doctest::Approx(eta_dp_sphere(p, 1e-7)).epsilon(1e-6));
}

TEST_CASE("exclusion maps") {
  auto p = ParticleSpec::reference_silica();
  GridAxis rc{"r_C", log_space(1e-8, 1e-4, 40)}, lam{"lambda", log_space(1e-20, 1e-6, 40)};
  auto zero = dcsl_exclusion(p, 1e-7, {0.0, 0.95}, rc, lam);
  CHECK(zero.excluded_count() == 40 * 40);
  CHECK(zero.boundary.empty());

  auto g = dcsl_exclusion(p, 1e-7, {48e-6, 0.95}, rc, lam);
  CHECK(g.excluded_count() > 0);
  CHECK(g.excluded_count() < 1600);
  CHECK(g.indeterminate == 0);
  auto big = ParticleSpec::sphere(10e-6, 1850, 80);
  auto gb = dcsl_exclusion(big, 1e-7, {48e-6, 0.95}, rc, lam);
  CHECK(exclusion_contains(gb, g));
  CHECK(gb.excluded_count() > g.excluded_count());
  // boundary crossings lie on the threshold
  auto b = g.boundary.front();
  CHECK(gamma_dcsl(p, {b.axis2, b.axis1, 1e-7}) / c::two_pi == doctest::Approx(48e-6).epsilon(1e-9));

  CHECK_THROWS_AS(log_space(1.0, 0.5, 10), InvalidParameter);
}

TEST_CASE("one-dimensional exclusion intervals") {
  auto axis = log_space(1.0, 100.0, 101);
  auto iv = exclusion_intervals([](double x) { return c::two_pi * (x > 10 && x < 50 ? 2.0 : 0.5); }, axis, {1.0, 0.95});
  REQUIRE(iv.size() == 1);
  CHECK(iv[0].lo > 9.0);
  CHECK(iv[0].hi < 51.0);
  CHECK_FALSE(iv[0].lo_at_edge);
  auto all = exclusion_intervals([](double) { return 10.0; }, axis, {1.0, 0.95});
  REQUIRE(all.size() == 1);
  CHECK(all[0].lo_at_edge);
  CHECK(all[0].hi_at_edge);
}
