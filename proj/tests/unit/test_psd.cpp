#include "doctest.h"

#include <cmath>

#include "levnano/constants.hpp"
#include "levnano/psd.hpp"
#include "levnano/rng.hpp"

using namespace levnano;
namespace c = levnano::constants;

TEST_CASE("hann window constants") {
  auto w = hann_window(1024);
  CHECK(w[0] == 0.0);
  CHECK(w[512] == doctest::Approx(1.0));
  CHECK(window_enbw(w, 1024.0) == doctest::Approx(1.5).epsilon(1e-12));
  // adjacent-bin correlations 4/9 and 1/36
  CHECK(periodogram_bin_inflation(w) == doctest::Approx(1.0 + 2.0 * (4.0 / 9.0 + 1.0 / 36.0)).epsilon(1e-10));
  // 50% overlap: c_1 = 1/6
  const std::size_t K = 20;
  double expect = K / (1.0 + 2.0 * (1.0 - 1.0 / K) / 36.0);
  CHECK(welch_effective_segments(w, 512, K) == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("white noise level and Parseval") {
  RandomStream rng(5);
  const double fs = 200.0, s = 0.3;
  std::vector<double> x(1 << 18);
  for (auto& v : x) v = s * rng.normal();
  auto p = welch_psd(x, fs, 1024);
  double level = 0;
  for (std::size_t k = 1; k + 1 < p.values.size(); ++k) level += p.values[k];
  level /= static_cast<double>(p.values.size() - 2);
  CHECK(level == doctest::Approx(2 * s * s / fs).epsilon(0.01));
  CHECK(p.integrated_power() == doctest::Approx(s * s).epsilon(0.01));
  CHECK(p.resolution() == doctest::Approx(fs / 1024));
}

TEST_CASE("bin-centred tone carries its power") {
  const double fs = 1000.0, A = 3.0;
  const std::size_t N = 1000;
  std::vector<double> x(20 * N);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = A * std::sin(c::two_pi * 100.0 * static_cast<double>(i) / fs);
  auto p = welch_psd(x, fs, N);
  CHECK(p.values[100] * p.enbw == doctest::Approx(A * A / 2).epsilon(1e-9));
}

TEST_CASE("streaming global-mean removal equals the two-pass estimate") {
  RandomStream rng(9);
  std::vector<double> x(50000);
  double drift = 0;
  for (auto& v : x) v = 5.0 + (drift += 0.01 * rng.normal());
  auto two = welch_psd(x, 10.0, 2048);
  WelchAccumulator acc(2048, 0.5, 10.0, MeanRemoval::global);
  acc.push(x.data(), x.size());
  auto one = acc.result();
  REQUIRE(one.values.size() == two.values.size());
  for (std::size_t k = 1; k < one.values.size(); ++k)
    CHECK(one.values[k] == doctest::Approx(two.values[k]).epsilon(1e-8).scale(two.values[1]));
}

TEST_CASE("jackknife replicates") {
  RandomStream rng(2);
  std::vector<double> x(4096 * 40);
  for (auto& v : x) v = rng.normal();
  auto p = welch_psd(x, 1.0, 4096);
  CHECK(p.jackknife.size() >= 8);
  CHECK(p.jackknife.size() <= 16);
  // the replicates average back to roughly the full estimate
  double a = 0, b = 0;
  for (const auto& r : p.jackknife) a += r[200];
  a /= static_cast<double>(p.jackknife.size());
  b = p.values[200];
  CHECK(a == doctest::Approx(b).epsilon(0.05));

  std::vector<double> shortx(4096 * 3);
  for (auto& v : shortx) v = rng.normal();
  CHECK(welch_psd(shortx, 1.0, 4096).jackknife.empty());
}

TEST_CASE("expected periodogram") {
  const double fs = 4.0, s2 = 0.7;
  auto white = expected_periodogram([&](double t) { return t == 0.0 ? s2 : 0.0; }, 256, fs);
  for (std::size_t k = 1; k < 128; ++k) CHECK(white[k] == doctest::Approx(2 * s2 / fs).epsilon(1e-10));

  // narrow exponential ACF: the periodogram expectation is the aliased Lorentzian convolved with the window
  const double g = 0.02;
  auto e = expected_periodogram([&](double t) { return std::exp(-g * std::abs(t)); }, 4096, fs);
  double power = 0;
  for (std::size_t k = 1; k < e.size(); ++k) power += e[k] * fs / 4096;
  power += e[0] * fs / 4096;
  CHECK(power == doctest::Approx(1.0).epsilon(0.02));
}
