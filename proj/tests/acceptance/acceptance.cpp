// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any fails. argv[1]: scratch directory.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "levnano/collapse.hpp"
#include "levnano/config.hpp"
#include "levnano/constants.hpp"
#include "levnano/demod.hpp"
#include "levnano/fit.hpp"
#include "levnano/manifest.hpp"
#include "levnano/pipeline.hpp"
#include "levnano/psd.hpp"
#include "levnano/simulate.hpp"
#include "levnano/stats.hpp"
#include "levnano/timeseries_io.hpp"

using namespace levnano;
namespace c = levnano::constants;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int prec = 4) {
  char b[64];
  std::snprintf(b, sizeof b, "%.*g", prec, v);
  return b;
}

const ParticleSpec kParticle = ParticleSpec::reference_silica();
const double kT = 293.0;

AxisPlan thermal_axis(double f0, double gamma_hz) {
  AxisPlan ax;
  ax.omega0 = c::two_pi * f0;
  ax.gamma = c::two_pi * gamma_hz;
  ax.force_psd = thermal_force_psd(kT, kParticle.mass, ax.gamma);
  return ax;
}

double secular_x() {
  return secular_frequency(mathieu_params(TrapConfig{}, kParticle), TrapConfig{}.drive_angular_freq, Axis::x) /
         c::two_pi;
}

// R^2 spectrum fit of a quadrature record (window-aware model, jackknife errors).
LorentzFit r2_fit(const std::vector<double>& r2, double rate, std::size_t N,
                  double span = 0.0, std::function<double(double)> response = {}) {
  auto psd = welch_psd(r2, rate, N, 0.5);
  R2FitOptions o;
  o.window_aware = true;
  o.averaging_time = span;
  o.response = std::move(response);
  return fit_r2_psd(psd, o);
}

// 1. Epstein damping at 1e-4 mbar against the measured 28.5 mHz.
Outcome ac1() {
  double g = gas_damping(kParticle, GasEnvironment::nitrogen_mbar(1e-4)) / c::two_pi;
  double rel = std::abs(g - 28.5e-3) / 28.5e-3;
  return {rel < 0.10, "gamma/2pi = " + num(g * 1e3) + " mHz vs 28.5 mHz (" + num(100 * rel, 3) + "% off, limit 10%)"};
}

// 2. Equipartition of the thermal secular engine over 5 seeds.
Outcome ac2() {
  Outcome o{true, ""};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimPlan plan;
    plan.duration = 200.0;
    plan.output_rate = 2000.0;
    plan.mass = kParticle.mass;
    plan.seed = seed;
    plan.axes = {thermal_axis(secular_x(), 1.0)};
    auto ts = simulate_secular(plan).front();
    auto T = effective_temperature(ts, kParticle.mass, plan.axes[0].omega0);
    double z = (T.temperature - kT) / T.standard_error;
    o.pass = o.pass && std::abs(z) < 3.0;
    o.detail += (seed > 1 ? ", " : "") + num(T.temperature, 4) + "+-" + num(T.standard_error, 2) + " K";
  }
  o.detail = "T_eff over 5 seeds: " + o.detail + " (each within 3 SE of 293 K)";
  return o;
}

// 3. R^2 closure on the quadrature engine: 10 mHz, 1e5 s.
Outcome ac3() {
  SimPlan plan;
  plan.engine = Engine::quadrature;
  plan.duration = 1e5;
  plan.output_rate = 1.0;
  plan.mass = kParticle.mass;
  plan.seed = 1;
  plan.axes = {thermal_axis(secular_x(), 10e-3)};
  auto q = simulate_quadrature(plan).front();
  auto a = amplitude(q);
  auto fit = r2_fit(a.R2, 1.0, 4000);
  double s2 = mean(a.R2) / 2.0;
  double ratio = r2_autocovariance(0.0, fit.gamma, fit.amplitude) / (4.0 * s2 * s2);
  double z = (fit.gamma_hz - 10e-3) / fit.gamma_hz_err;
  bool pass = std::abs(ratio - 1.0) < 0.05 && std::abs(z) < 2.0;
  return {pass, "fitted total power / 4 sigma^4 = " + num(ratio, 4) + "; gamma/2pi = " + num(fit.gamma_hz * 1e3) +
                    " +- " + num(fit.gamma_hz_err * 1e3, 2) + " mHz (" + num(z, 2) + " sigma from 10 mHz)"};
}

struct DriftRun {
  LorentzFit r2;
  std::optional<DisplacementFit> disp;
};

// Carrier-level record through the lock-in; displacement Welch runs alongside.
DriftRun drift_run(double drift_amp_hz, double gamma_hz, double duration, std::uint64_t seed, bool with_disp) {
  const double fs = 1000.0, f0 = 300.0;
  AxisPlan ax = thermal_axis(f0, gamma_hz);
  if (drift_amp_hz > 0) {
    ax.drift.shape = DriftShape::sinusoidal;
    ax.drift.mod_amplitude = c::two_pi * drift_amp_hz;
    ax.drift.mod_period = 3600.0;
  }
  CarrierSynthesizer syn(ax, kParticle.mass, fs, RandomStream(seed).substream("carrier"));
  LockinConfig lc;
  lc.f_lo = f0;
  lc.cutoff = 100.0;  // 8x the drift amplitude
  lc.decimation = 2;  // 500 Hz quadratures
  Lockin li(lc, fs);
  const std::size_t block = 1000;  // R^2 averaged to 0.5 Hz
  std::vector<double> r2;
  double acc = 0;
  std::size_t k = 0;
  WelchAccumulator disp(static_cast<std::size_t>(fs * 1000.0), 0.5, fs);
  const std::size_t n = static_cast<std::size_t>(duration * fs);
  double X, Y;
  for (std::size_t i = 0; i < n; ++i) {
    double u = syn.next();
    if (with_disp) disp.push(u);
    if (li.push(u, X, Y)) {
      acc += X * X + Y * Y;
      if (++k == block) {
        r2.push_back(acc / block);
        acc = 0;
        k = 0;
      }
    }
  }
  DriftRun out;
  const double fq = fs / static_cast<double>(lc.decimation);
  out.r2 = r2_fit(r2, fq / block, nice_fft_size(static_cast<std::size_t>(0.5 * 2000.0)),
                  block / fq, r2_response(lc, fs));
  if (with_disp) {
    DisplacementFitOptions o;
    o.window = {f0 - 40.0, f0 + 40.0};
    out.disp = fit_displacement_psd(disp.result(), kParticle.mass, o);
  }
  return out;
}

// 4. Drift immunity: paired runs with and without a 12.5 Hz sinusoidal drift.
Outcome ac4() {
  const double g = 5e-3, T = 4e4;
  auto flat = drift_run(0.0, g, T, 4, false);
  auto drift = drift_run(12.5, g, T, 4, true);
  double joint = std::hypot(flat.r2.gamma_hz_err, drift.r2.gamma_hz_err);
  double z = (drift.r2.gamma_hz - flat.r2.gamma_hz) / joint;
  double bias = drift.disp->gamma_hz / g;
  bool pass = std::abs(z) < 2.0 && bias > 10.0;
  return {pass, "R^2 gamma/2pi: " + num(flat.r2.gamma_hz * 1e3) + " +- " + num(flat.r2.gamma_hz_err * 1e3, 2) +
                    " mHz (no drift) vs " + num(drift.r2.gamma_hz * 1e3) + " +- " +
                    num(drift.r2.gamma_hz_err * 1e3, 2) + " mHz (drift ratio 2500), " + num(z, 2) +
                    " joint sigma; displacement fit on drifted run " + num(drift.disp->gamma_hz * 1e3) +
                    " mHz = " + num(bias, 3) + "x true"};
}

// 5. Displacement-PSD and R^2 fits agree on drift-free records, 5 seeds.
Outcome ac5() {
  Outcome o{true, ""};
  const double g = 10e-3, fs = 800.0, f0 = 150.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SimPlan plan;
    plan.duration = 2e4;
    plan.output_rate = fs;
    plan.mass = kParticle.mass;
    plan.seed = seed;
    plan.axes = {thermal_axis(f0, g)};
    auto ts = simulate_secular(plan).front();

    auto psd = welch_psd(ts.values, fs, static_cast<std::size_t>(fs * 1000.0), 0.5);
    DisplacementFitOptions dopt;
    dopt.window = {f0 - 0.5, f0 + 0.5};
    auto d = fit_displacement_psd(psd, kParticle.mass, dopt);

    LockinConfig lc;
    lc.f_lo = f0;
    lc.cutoff = 5.0;
    lc.decimation = 20;  // 40 Hz quadratures
    auto q = lockin(ts, lc);
    auto r2 = block_average(amplitude(q).R2, 40);
    auto f = r2_fit(r2, 1.0, 1000, 40 / q.sample_rate, r2_response(lc, fs));

    double z = (d.gamma_hz - f.gamma_hz) / std::hypot(d.gamma_hz_err, f.gamma_hz_err);
    o.pass = o.pass && std::abs(z) < 2.0;
    o.detail += std::string(seed > 1 ? "; " : "") + num(d.gamma_hz * 1e3) + " vs " + num(f.gamma_hz * 1e3) +
                " mHz (" + num(z, 2) + " sigma)";
  }
  o.detail = "displacement vs R^2 at 10 mHz: " + o.detail;
  return o;
}

// 6. Monte-Carlo pressure sweeps with reference-scale errors and no excess damping.
Outcome ac6() {
  const auto P = reference_sweep_pressures();
  int in_range = 0, in_range_one = 0;
  double lo = 1e9, hi = -1e9;
  RandomStream root(2024);
  for (int rep = 0; rep < 100; ++rep) {
    RandomStream rng = root.substream(static_cast<std::uint64_t>(rep));
    auto L = linewidth_vs_pressure(synthetic_sweep(P, reference_sweep_slope, 0.0, rng), 0.95);
    double b = L.upper_limit();
    in_range += b >= 10e-6 && b <= 100e-6;
    double b1 = L.upper_limit_one_sided();
    in_range_one += b1 >= 10e-6 && b1 <= 100e-6;
    lo = std::min(lo, b);
    hi = std::max(hi, b);
  }
  return {in_range >= 90, std::to_string(in_range) + "/100 bounds in [10, 100] uHz (range " + num(lo * 1e6, 3) +
                              " .. " + num(hi * 1e6, 3) + " uHz); strict one-sided t limit: " +
                              std::to_string(in_range_one) + "/100"};
}

// 7. dCSL boundary minimum for the measured bound.
Outcome ac7() {
  auto g = dcsl_exclusion(kParticle, 1e-7, {48e-6, 0.95}, {"r_C", log_space(1e-9, 1e-3, 200)},
                          {"lambda", log_space(1e-20, 1e-4, 200)});
  auto b = g.boundary_minimum();
  bool pass = b.axis1 >= 0.5e-6 && b.axis1 <= 5e-6 && b.axis2 >= 1e-15 && b.axis2 <= 1e-13;
  return {pass, "boundary minimum at r_C = " + num(b.axis1 * 1e6, 3) + " um, lambda = " + num(b.axis2, 3) +
                    " 1/s (200x200 grid)"};
}

// 8. Single-particle dDP at 2.7 K.
Outcome ac8() {
  auto axis = log_space(1e-20, 1e-8, 1201);
  auto iv = exclusion_intervals([](double r0) { return gamma_ddp(kParticle, {r0, 2.7}); }, axis, {48e-6, 0.95});
  if (iv.size() != 1) return {false, std::to_string(iv.size()) + " excluded intervals"};
  bool pass = iv[0].lo <= 1e-17 && iv[0].hi >= 1e-13 && iv[0].hi <= 1e-11;
  return {pass, "excluded R0 in [" + num(iv[0].lo, 3) + ", " + num(iv[0].hi, 3) + "] m" +
                    (iv[0].lo_at_edge ? " (lower end reaches the 1e-20 m scan edge)" : "")};
}

double form(double x) { return x < 1e-4 ? 1.0 - x * x / 10.0 : 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x); }

// Integral over [0, inf) split at the form-factor oscillation scale.
double kspace(const std::function<double(double)>& f, double r, double L) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double step = std::min(c::pi / r, 0.5 / L), kmax = 12.0 / L;
  double sum = 0;
  for (double a = 0; a < kmax; a += step) sum += GK::integrate(f, a, std::min(a + step, kmax), 8, 1e-12);
  return sum + GK::integrate(f, kmax, std::numeric_limits<double>::infinity(), 8, 1e-12);
}

// 9. Limit recovery and closed forms against k-space quadrature, 100 random points.
Outcome ac9() {
  RandomStream rng(99);
  auto logu = [&](double lo, double hi) { return std::exp(std::log(lo) + rng.uniform() * (std::log(hi) - std::log(lo))); };
  double worst_hot = 0, worst_csl = 0, worst_dp = 0;
  for (int i = 0; i < 100; ++i) {
    auto p = ParticleSpec::sphere(logu(50e-9, 5e-6), 2000.0, 10);
    const double r = p.radius, m = p.mass;
    double rc = logu(1e-8, 1e-4), lam = logu(1e-20, 1e-6), R0 = logu(1e-9, 1e-4);

    worst_hot = std::max(worst_hot, std::abs(eta_dcsl_sphere(p, {lam, rc, 1e12}) / eta_csl_sphere(p, lam, rc) - 1));
    worst_hot = std::max(worst_hot, std::abs(eta_ddp_sphere(p, {R0, 1e12}) / eta_dp_sphere(p, R0) - 1));

    double ic = kspace([&](double k) { return std::pow(k, 4) * std::exp(-k * k * rc * rc) * std::pow(form(k * r), 2); },
                       r, rc);
    double csl = 4 * lam * m * m * std::pow(rc, 3) / (3 * std::sqrt(c::pi) * c::m0 * c::m0) * ic;
    worst_csl = std::max(worst_csl, std::abs(eta_csl_sphere(p, lam, rc) / csl - 1));

    double id = kspace([&](double k) { return k * k * std::exp(-k * k * R0 * R0) * std::pow(form(k * r), 2); }, r, R0);
    double dp = 2 * c::G * m * m / (3 * c::pi * c::hbar) * id;
    worst_dp = std::max(worst_dp, std::abs(eta_dp_sphere(p, R0) / dp - 1));
  }
  bool pass = worst_hot < 1e-6 && worst_csl < 1e-6 && worst_dp < 1e-6;
  return {pass, "max relative deviation: T=1e12 K limit " + num(worst_hot, 2) + ", CSL sphere vs quadrature " +
                    num(worst_csl, 2) + ", DP sphere vs quadrature " + num(worst_dp, 2) + " (limit 1e-6)"};
}

// 10. reproduce-paper twice with the same seed.
Outcome ac10(const fs::path& work) {
  RunConfig cfg;
  cfg.seed = 17;
  cfg.out = work / "reproduce_a";
  fs::remove_all(cfg.out);
  auto a = reproduce_paper(cfg);
  cfg.out = work / "reproduce_b";
  fs::remove_all(cfg.out);
  auto b = reproduce_paper(cfg);
  std::size_t same = 0, total = 0;
  for (const auto& entry : fs::directory_iterator(a.out_dir)) {
    auto name = entry.path().filename();
    if (name == "manifest.json") continue;
    ++total;
    if (fs::exists(b.out_dir / name) && read_file(entry.path()) == read_file(b.out_dir / name)) ++same;
  }
  bool pass = total > 0 && same == total && a.manifest.outputs.size() == b.manifest.outputs.size();
  return {pass, std::to_string(same) + "/" + std::to_string(total) + " data files byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "levnano_acceptance";
  fs::create_directories(work);

  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all = {
      {"AC1 Epstein damping", ac1},
      {"AC2 equipartition", ac2},
      {"AC3 R^2 closure", ac3},
      {"AC4 drift immunity", ac4},
      {"AC5 method agreement", ac5},
      {"AC6 sweep intercept bound", ac6},
      {"AC7 dCSL boundary minimum", ac7},
      {"AC8 dDP single-particle exclusion", ac8},
      {"AC9 limit recovery and k-space oracles", ac9},
      {"AC10 determinism", [&] { return ac10(work); }},
  };
  int failed = 0;
  for (const auto& cr : all) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", cr.name, o.detail.c_str(), s);
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
