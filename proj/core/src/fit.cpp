#include "levnano/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "levnano/constants.hpp"
#include "levnano/errors.hpp"
#include "levnano/least_squares.hpp"
#include "levnano/stats.hpp"

namespace levnano {

namespace c = constants;

namespace {

struct BinRange {
  std::size_t lo = 0, hi = 0;  // inclusive
  std::size_t count() const { return hi - lo + 1; }
};

BinRange select_bins(const PsdEstimate& psd, const FitWindow& w, std::size_t min_bins) {
  if (psd.values.size() < 4) throw InvalidParameter("PSD has too few bins to fit");
  BinRange r;
  const std::size_t last = psd.values.size() - 2;  // skip the Nyquist bin
  r.lo = 2;
  if (w.f_min > 0) {
    r.lo = 1;
    while (r.lo <= last && psd.frequencies[r.lo] < w.f_min) ++r.lo;
  }
  r.hi = last;
  if (w.f_max > 0)
    while (r.hi > r.lo && psd.frequencies[r.hi] > w.f_max) --r.hi;
  if (r.lo > r.hi || r.count() < min_bins)
    throw InvalidParameter("fit window holds fewer than " + std::to_string(min_bins) + " bins");
  return r;
}

double effective_k(const PsdEstimate& psd) {
  return psd.effective_segments > 0 ? psd.effective_segments : static_cast<double>(psd.segment_count);
}

// Per-bin errors value / sqrt(K_eff), floored so empty bins keep finite weight.
Eigen::VectorXd bin_errors(const Eigen::VectorXd& level, double k_eff) {
  double floor = 1e-12 * level.cwiseAbs().maxCoeff();
  if (!(floor > 0)) floor = 1e-300;
  return level.cwiseAbs().cwiseMax(floor) / std::sqrt(k_eff);
}

}  // namespace

// --- R^2 Lorentzian -----------------------------------------------------------

double r2_lorentzian(double f, double gamma, double A) {
  double w = c::two_pi * f;
  return 16.0 * A / (gamma * (w * w + gamma * gamma));
}

double r2_autocovariance(double tau, double gamma, double A) {
  return 4.0 * A * std::exp(-gamma * std::abs(tau)) / (gamma * gamma);
}

double r2_autocovariance_averaged(double tau, double gamma, double A, double span) {
  if (!(span > 0)) return r2_autocovariance(tau, gamma, A);
  tau = std::abs(tau);
  const double x = gamma * span;
  double c;
  if (tau >= span) {
    double s = x > 1e-4 ? 2.0 * std::sinh(x / 2.0) / x : 1.0 + x * x / 24.0;
    c = std::exp(-gamma * tau) * s * s;
  } else {
    // second difference of F(u) = (e^{-g|u|} + g|u| - 1) / g^2
    auto F = [gamma](double u) {
      double y = gamma * std::abs(u);
      return (y > 1e-3 ? std::expm1(-y) + y : y * y / 2.0 - y * y * y / 6.0 + y * y * y * y / 24.0) /
             (gamma * gamma);
    };
    c = (F(tau + span) + F(span - tau) - 2.0 * F(tau)) / (span * span);
  }
  return 4.0 * A * c / (gamma * gamma);
}

double LorentzFit::quadrature_variance() const { return std::sqrt(amplitude) / gamma; }

namespace {

double boxcar_gain(double f, double span) {
  if (!(span > 0) || f == 0) return 1.0;
  double x = c::pi * f * span;
  double r = std::sin(x) / x;
  return r * r;
}

}  // namespace

double LorentzFit::model(double f) const {
  return r2_lorentzian(f, gamma, amplitude) * boxcar_gain(f, averaging_time) * (response ? response(f) : 1.0);
}

namespace {

LorentzFit fit_r2_once(const PsdEstimate& psd, const R2FitOptions& opt) {
  FitWindow win = opt.window;
  if (opt.response && !(win.f_max > 0)) {
    const std::size_t last = psd.values.size() >= 2 ? psd.values.size() - 2 : 0;
    std::size_t k = 1;
    while (k <= last && opt.response(psd.frequencies[k]) >= 0.5) ++k;
    if (k <= last) win.f_max = psd.frequencies[k - 1];
  }
  const BinRange br = select_bins(psd, win, 4);
  const Eigen::Index m = static_cast<Eigen::Index>(br.count());
  Eigen::VectorXd f(m), y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    f[i] = psd.frequencies[br.lo + static_cast<std::size_t>(i)];
    y[i] = psd.values[br.lo + static_cast<std::size_t>(i)];
  }
  const double df = psd.resolution();
  const double k_eff = effective_k(psd);
  Eigen::VectorXd gain = Eigen::VectorXd::Ones(m);
  if (opt.response)
    for (Eigen::Index i = 0; i < m; ++i) gain[i] = opt.response(f[i]);

  auto model = [&](double gamma, double A) {
    Eigen::VectorXd out(m);
    if (opt.window_aware) {
      auto full = expected_periodogram(
          [&](double t) { return r2_autocovariance_averaged(t, gamma, A, opt.averaging_time); },
                                       psd.segment_length, psd.sample_rate);
      for (Eigen::Index i = 0; i < m; ++i) out[i] = full[br.lo + static_cast<std::size_t>(i)];
    } else {
      for (Eigen::Index i = 0; i < m; ++i)
        out[i] = r2_lorentzian(f[i], gamma, A) * boxcar_gain(f[i], opt.averaging_time);
    }
    if (opt.response) out = out.cwiseProduct(gain);
    return out;
  };

  // Initial linewidth from the half-power point of the smoothed spectrum.
  double g0;
  if (opt.initial_gamma) {
    g0 = *opt.initial_gamma;
  } else {
    Eigen::VectorXd yc = y.cwiseQuotient(gain);
    for (Eigen::Index i = 0; i < m; ++i) yc[i] /= boxcar_gain(f[i], opt.averaging_time);
    auto smooth = [&](Eigen::Index i) {
      Eigen::Index a = std::max<Eigen::Index>(0, i - 1), b = std::min<Eigen::Index>(m - 1, i + 1);
      return yc.segment(a, b - a + 1).mean();
    };
    double level = smooth(0);
    Eigen::Index k = 1;
    while (k < m && smooth(k) > 0.5 * level) ++k;
    double f_half = k < m ? f[k] : f[m - 1];
    double w_lo = c::two_pi * f[0], w_half = c::two_pi * f_half;
    // S(w_half) / S(w_lo) = 1/2 for a Lorentzian of width gamma
    double g2 = w_half * w_half - 2.0 * w_lo * w_lo;
    g0 = g2 > 0 ? std::sqrt(g2) : w_half;
  }
  if (!(g0 > 0)) throw InvalidParameter("initial linewidth must be > 0");
  double A0;
  if (opt.initial_amplitude) {
    A0 = *opt.initial_amplitude;
  } else {
    // amplitude enters linearly: weighted least squares at fixed gamma
    Eigen::VectorXd u = model(g0, 1.0);
    Eigen::VectorXd s = bin_errors(y, k_eff);
    A0 = (u.cwiseProduct(y).cwiseQuotient(s.cwiseProduct(s))).sum() /
         (u.cwiseProduct(u).cwiseQuotient(s.cwiseProduct(s))).sum();
    if (!(A0 > 0)) A0 = y[0] * g0 * g0 * g0 / 16.0;
  }
  if (!(A0 > 0)) throw NumericalFailure("R^2 spectrum has no positive power in the fit window");

  LmOptions lo;
  lo.lower = Eigen::Vector2d(std::log(c::two_pi * df * 1e-3), std::log(A0) - 200.0);
  lo.upper = Eigen::Vector2d(std::log(c::two_pi * f[m - 1] * 1e3), std::log(A0) + 200.0);
  // A flat spectrum leaves a degenerate valley (A ~ gamma^3) the solver walks
  // along without end; report that as an unreliable fit rather than an error.
  lo.throw_on_cap = false;

  Eigen::VectorXd sigma = bin_errors(y, k_eff);
  ResidualFn res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    r = (model(std::exp(p[0]), std::exp(p[1])) - y).cwiseQuotient(sigma);
  };
  LmResult lm = levenberg_marquardt(res, Eigen::Vector2d(std::log(g0), std::log(A0)), m, lo);
  int iters = lm.iterations;
  bool converged = lm.converged;
  if (opt.weights == WeightScheme::model && converged) {
    sigma = bin_errors(model(std::exp(lm.params[0]), std::exp(lm.params[1])), k_eff);
    lm = levenberg_marquardt(res, lm.params, m, lo);
    iters += lm.iterations;
    converged = lm.converged;
  }

  LorentzFit fit;
  fit.gamma = std::exp(lm.params[0]);
  fit.gamma_hz = fit.gamma / c::two_pi;
  fit.amplitude = std::exp(lm.params[1]);
  Eigen::Matrix2d C = lm.covariance * psd.bin_correlation;
  Eigen::Matrix2d D = Eigen::Vector2d(fit.gamma_hz, fit.amplitude).asDiagonal();
  fit.covariance = D * C * D;
  fit.gamma_hz_err = std::sqrt(fit.covariance(0, 0));
  fit.amplitude_err = std::sqrt(fit.covariance(1, 1));
  fit.reduced_chi2 = lm.chi2 / static_cast<double>(m - 2);
  fit.f_min = f[0];
  fit.f_max = f[m - 1];
  fit.bins = static_cast<std::size_t>(m);
  fit.iterations = iters;
  fit.window_aware = opt.window_aware;
  fit.response = opt.response;
  fit.averaging_time = opt.averaging_time;

  if (!converged) {
    fit.unreliable = true;
    fit.warnings.push_back("fit did not converge after " + std::to_string(iters) + " iterations");
  }
  if (lm.at_bound[0]) {
    fit.unreliable = true;
    fit.warnings.push_back("linewidth ran into its search bound; no Lorentzian found");
  }
  if (fit.gamma_hz > fit.f_max) {
    fit.unreliable = true;
    fit.warnings.push_back("linewidth exceeds the fit window");
  }
  if (!opt.window_aware && fit.gamma_hz < df) {
    fit.unreliable = true;
    fit.warnings.push_back("linewidth below the frequency resolution; use the window-aware model");
  }
  if (fit.reduced_chi2 > 2.0) fit.warnings.push_back("reduced chi^2 above 2");
  return fit;
}

}  // namespace

LorentzFit fit_r2_psd(const PsdEstimate& psd, const R2FitOptions& opt) {
  LorentzFit fit = fit_r2_once(psd, opt);
  const std::size_t G = psd.jackknife.size();
  if (opt.jackknife && G >= 8 && !fit.unreliable) {
    R2FitOptions ro = opt;
    ro.initial_gamma = fit.gamma;
    ro.initial_amplitude = fit.amplitude;
    PsdEstimate rep = psd;
    rep.jackknife.clear();
    std::vector<Eigen::Vector2d> th;
    try {
      for (const auto& v : psd.jackknife) {
        rep.values = v;
        LorentzFit r = fit_r2_once(rep, ro);
        th.emplace_back(r.gamma_hz, r.amplitude);
      }
    } catch (const NumericalFailure&) {
      th.clear();
      fit.warnings.push_back("jackknife refit failed; using curvature errors");
    }
    if (th.size() == G) {
      Eigen::Vector2d mu = Eigen::Vector2d::Zero();
      for (const auto& t : th) mu += t;
      mu /= static_cast<double>(G);
      Eigen::Matrix2d C = Eigen::Matrix2d::Zero();
      for (const auto& t : th) C += (t - mu) * (t - mu).transpose();
      fit.covariance = C * (static_cast<double>(G - 1) / static_cast<double>(G));
      fit.gamma_hz_err = std::sqrt(fit.covariance(0, 0));
      fit.amplitude_err = std::sqrt(fit.covariance(1, 1));
      fit.jackknife_groups = G;
    }
  }
  if (fit.gamma_hz_err > 0.5 * fit.gamma_hz) {
    fit.unreliable = true;
    fit.warnings.push_back("relative linewidth error above 50%");
  }
  return fit;
}

// --- displacement susceptibility ---------------------------------------------

double susceptibility_psd(double f, double w0, double gamma, double S_F, double mass, double floor) {
  double w = c::two_pi * f;
  double d = w0 * w0 - w * w;
  return 2.0 * S_F / (mass * mass) / (d * d + gamma * gamma * w * w) + floor;
}

double DisplacementFit::model(double f) const {
  return susceptibility_psd(f, omega0, gamma, force_psd, mass, floor);
}

DisplacementFit fit_displacement_psd(const PsdEstimate& psd, double mass,
                                     const DisplacementFitOptions& opt) {
  if (!(mass > 0)) throw InvalidParameter("mass must be > 0");
  const BinRange br = select_bins(psd, opt.window, 8);
  const Eigen::Index m = static_cast<Eigen::Index>(br.count());
  Eigen::VectorXd f(m), y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    f[i] = psd.frequencies[br.lo + static_cast<std::size_t>(i)];
    y[i] = psd.values[br.lo + static_cast<std::size_t>(i)];
  }
  const double df = psd.resolution();
  const double k_eff = effective_k(psd);

  Eigen::Index kpk;
  y.maxCoeff(&kpk);
  std::vector<double> sorted(y.data(), y.data() + m);
  std::nth_element(sorted.begin(), sorted.begin() + m / 10, sorted.end());
  double floor0 = std::max(sorted[static_cast<std::size_t>(m / 10)], 0.0);
  double peak = y[kpk] - floor0;

  double w0_init = opt.initial_omega0.value_or(c::two_pi * f[kpk]);
  double g_init;
  if (opt.initial_gamma) {
    g_init = *opt.initial_gamma;
  } else {
    Eigen::Index a = kpk, b = kpk;
    while (a > 0 && y[a] - floor0 > 0.5 * peak) --a;
    while (b < m - 1 && y[b] - floor0 > 0.5 * peak) ++b;
    g_init = c::two_pi * std::max(f[b] - f[a], df);
  }
  if (!(w0_init > 0) || !(g_init > 0)) throw InvalidParameter("initial w0 and gamma must be > 0");
  double S0 = std::max(peak, 1e-300) * mass * mass * g_init * g_init * w0_init * w0_init / 2.0;
  const double fscale = floor0 > 0 ? floor0 : std::max(y.cwiseAbs().minCoeff(), 1e-300);

  // p = ((w0 - w0_init) / g_init, log gamma, log S_F, floor / fscale)
  auto unpack = [&](const Eigen::VectorXd& p, double& w0, double& g, double& S, double& fl) {
    w0 = w0_init + g_init * p[0];
    g = std::exp(p[1]);
    S = std::exp(p[2]);
    fl = fscale * p[3];
  };
  auto model = [&](const Eigen::VectorXd& p) {
    double w0, g, S, fl;
    unpack(p, w0, g, S, fl);
    Eigen::VectorXd out(m);
    for (Eigen::Index i = 0; i < m; ++i) out[i] = susceptibility_psd(f[i], w0, g, S, mass, fl);
    return out;
  };

  LmOptions lo;
  lo.lower = Eigen::Vector4d(-w0_init / g_init * 0.999, std::log(c::two_pi * df * 1e-3), std::log(S0) - 200, 0.0);
  lo.upper = Eigen::Vector4d(c::two_pi * f[m - 1] / g_init, std::log(c::two_pi * f[m - 1] * 1e3), std::log(S0) + 200, 1e12);

  Eigen::VectorXd sigma = bin_errors(y, k_eff);
  ResidualFn res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    r = (model(p) - y).cwiseQuotient(sigma);
  };
  Eigen::Vector4d p0(0.0, std::log(g_init), std::log(S0), floor0 / fscale);
  LmResult lm = levenberg_marquardt(res, p0, m, lo);
  if (opt.weights == WeightScheme::model) {
    sigma = bin_errors(model(lm.params), k_eff);
    lm = levenberg_marquardt(res, lm.params, m, lo);
  }

  DisplacementFit fit;
  fit.mass = mass;
  unpack(lm.params, fit.omega0, fit.gamma, fit.force_psd, fit.floor);
  Eigen::Matrix4d C = lm.covariance * psd.bin_correlation;
  Eigen::Matrix4d D = Eigen::Vector4d(g_init, 1.0, 1.0, fscale).asDiagonal();
  fit.covariance = D * C * D;
  fit.omega0_err = std::sqrt(fit.covariance(0, 0));
  fit.gamma_err = fit.gamma * std::sqrt(fit.covariance(1, 1));
  fit.gamma_hz = fit.gamma / c::two_pi;
  fit.gamma_hz_err = fit.gamma_err / c::two_pi;
  fit.force_psd_err = fit.force_psd * std::sqrt(fit.covariance(2, 2));
  fit.floor_err = std::sqrt(fit.covariance(3, 3));
  fit.temperature = fit.force_psd / (2.0 * c::k_B * mass * fit.gamma);
  double var_logT = fit.covariance(1, 1) + fit.covariance(2, 2) - 2.0 * fit.covariance(1, 2);
  fit.temperature_err = fit.temperature * std::sqrt(std::max(var_logT, 0.0));
  fit.reduced_chi2 = lm.chi2 / static_cast<double>(m - 4);
  fit.f_min = f[0];
  fit.f_max = f[m - 1];
  fit.bins = static_cast<std::size_t>(m);

  double f0 = fit.omega0 / c::two_pi;
  if (kpk < 3 || kpk > m - 4 || f0 < f[0] || f0 > f[m - 1]) {
    fit.unreliable = true;
    fit.warnings.push_back("resonance at the edge of the fit band");
  }
  if (lm.at_bound[0] || lm.at_bound[1]) {
    fit.unreliable = true;
    fit.warnings.push_back("parameter ran into its search bound");
  }
  if (fit.reduced_chi2 > 2.0) fit.warnings.push_back("reduced chi^2 above 2");
  return fit;
}

// --- linewidth versus pressure -----------------------------------------------

std::pair<double, double> LineFit::band(double p) const {
  double var = intercept_err * intercept_err + p * p * slope_err * slope_err + 2.0 * p * cov_is;
  double h = t_two_sided * std::sqrt(std::max(var, 0.0));
  return {value(p) - h, value(p) + h};
}

LineFit linewidth_vs_pressure(const std::vector<PressurePoint>& pts, double confidence) {
  if (pts.size() < 3) throw InvalidParameter("line fit needs at least 3 points");
  if (!(confidence > 0 && confidence < 1)) throw InvalidParameter("confidence must lie in (0, 1)");
  double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
  for (const auto& p : pts) {
    if (!(p.sigma_hz > 0)) throw InvalidParameter("line fit errors must be > 0");
    double w = 1.0 / (p.sigma_hz * p.sigma_hz);
    S += w;
    Sx += w * p.pressure_mbar;
    Sy += w * p.gamma_hz;
    Sxx += w * p.pressure_mbar * p.pressure_mbar;
    Sxy += w * p.pressure_mbar * p.gamma_hz;
  }
  double det = S * Sxx - Sx * Sx;
  if (!(det > 0)) throw InvalidParameter("line fit needs at least two distinct pressures");

  LineFit L;
  L.n = pts.size();
  L.dof = static_cast<double>(L.n) - 2.0;
  L.confidence = confidence;
  L.slope = (S * Sxy - Sx * Sy) / det;
  L.intercept = (Sxx * Sy - Sx * Sxy) / det;
  L.centroid = Sx / S;
  double k0 = Sxy / Sxx;
  for (const auto& p : pts) {
    double w = 1.0 / (p.sigma_hz * p.sigma_hz);
    double r = p.gamma_hz - L.intercept - L.slope * p.pressure_mbar;
    double r0 = p.gamma_hz - k0 * p.pressure_mbar;
    L.chi2 += w * r * r;
    L.chi2_no_excess += w * r0 * r0;
  }
  L.reduced_chi2 = L.chi2 / L.dof;
  // covariance scaled by the observed scatter (Birge ratio)
  L.intercept_err = std::sqrt(Sxx / det * L.reduced_chi2);
  L.slope_err = std::sqrt(S / det * L.reduced_chi2);
  L.cov_is = -Sx / det * L.reduced_chi2;
  L.t_two_sided = student_t_quantile(0.5 * (1.0 + confidence), L.dof);
  L.t_one_sided = student_t_quantile(confidence, L.dof);
  L.intercept_ci = {L.intercept - L.t_two_sided * L.intercept_err, L.intercept + L.t_two_sided * L.intercept_err};
  L.slope_ci = {L.slope - L.t_two_sided * L.slope_err, L.slope + L.t_two_sided * L.slope_err};
  L.slope_no_excess = k0;
  L.slope_no_excess_err = std::sqrt(L.chi2_no_excess / (static_cast<double>(L.n) - 1.0) / Sxx);
  return L;
}

std::pair<double, double> inverse_variance_mean(const std::vector<std::pair<double, double>>& v) {
  if (v.empty()) throw InvalidParameter("nothing to average");
  double sw = 0, swx = 0;
  for (auto [x, s] : v) {
    if (!(s > 0)) throw InvalidParameter("inverse-variance weights need errors > 0");
    sw += 1.0 / (s * s);
    swx += x / (s * s);
  }
  return {swx / sw, 1.0 / std::sqrt(sw)};
}

// --- effective temperature ----------------------------------------------------

namespace {

TemperatureEstimate temperature_from(const std::vector<double>& sq, double scale, double mass, double w0) {
  if (!(mass > 0) || !(w0 > 0)) throw InvalidParameter("mass and w0 must be > 0");
  TemperatureEstimate t;
  double mu = mean(sq);
  t.variance = mu * scale;
  auto ac = integrated_autocorr_time(sq);
  t.autocorr_time = ac.tau;
  t.effective_samples = static_cast<double>(sq.size()) / ac.tau;
  double se_mu = std::sqrt(sample_variance(sq) / t.effective_samples);
  t.temperature = mass * w0 * w0 * t.variance / c::k_B;
  t.standard_error = mu > 0 ? t.temperature * se_mu / mu : 0.0;
  return t;
}

}  // namespace

TemperatureEstimate effective_temperature(const QuadratureSeries& q, double mass, double w0) {
  std::vector<double> r2(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) r2[i] = q.X[i] * q.X[i] + q.Y[i] * q.Y[i];
  return temperature_from(r2, 0.5, mass, w0);
}

TemperatureEstimate effective_temperature(const TimeSeries& ts, double mass, double w0) {
  double mu = mean(ts.values);
  std::vector<double> sq(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) sq[i] = (ts.values[i] - mu) * (ts.values[i] - mu);
  return temperature_from(sq, 1.0, mass, w0);
}

}  // namespace levnano
