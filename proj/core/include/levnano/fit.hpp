#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levnano/psd.hpp"
#include "levnano/timeseries.hpp"

namespace levnano {

struct FitWindow {
  double f_min = 0.0;  // Hz; 0 selects the default (skips DC and the first bin)
  double f_max = 0.0;  // Hz; 0 selects Nyquist
};

enum class WeightScheme { data, model };

struct R2FitOptions {
  FitWindow window;
  std::optional<double> initial_gamma;  // rad/s
  std::optional<double> initial_amplitude;
  // Fit the exact expected Welch periodogram instead of the bare Lorentzian;
  // needed when the linewidth spans only a few bins.
  bool window_aware = false;
  // data: per-bin error value/sqrt(K_eff); model: re-fit with errors from the
  // first-pass model.
  WeightScheme weights = WeightScheme::model;
  // Replace the curvature covariance by a delete-one-group jackknife when the
  // spectrum carries group replicates. R^2 is far from Gaussian, so bin errors
  // correlate across the whole band and the curvature error comes out too small.
  bool jackknife = true;
  // R^2 samples are boxcar averages over this span (s); 0: point samples.
  double averaging_time = 0.0;
  // Power response of the demodulation low-pass multiplying the model; valid
  // while the linewidth is well inside the passband. With a response and no
  // explicit f_max the window ends where it falls to 1/2.
  std::function<double(double)> response;
};

/// Zero-centered Lorentzian of the R^2 spectrum. One-sided per Hz:
/// S(f) = 16 A / (gamma ((2 pi f)^2 + gamma^2)),  A = s^2,  s = S_F / (2 m^2 w0^2).
struct LorentzFit {
  double gamma = 0.0;          // rad/s
  double gamma_hz = 0.0;       // gamma / 2 pi
  double gamma_hz_err = 0.0;
  double amplitude = 0.0;      // A
  double amplitude_err = 0.0;
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // (gamma_hz, A)
  double reduced_chi2 = 0.0;
  double f_min = 0.0, f_max = 0.0;
  std::size_t bins = 0;
  int iterations = 0;
  bool window_aware = false;
  std::size_t jackknife_groups = 0;  // 0: covariance from the fit curvature
  double averaging_time = 0.0;
  std::function<double(double)> response;  // empty: flat
  bool unreliable = false;
  std::vector<std::string> warnings;

  /// Per-quadrature variance implied by the fit, s / gamma.
  double quadrature_variance() const;
  double model(double f) const;
};

double r2_lorentzian(double f, double gamma, double amplitude);
/// Autocovariance of R^2 for the same process, 4 A exp(-gamma |tau|) / gamma^2.
double r2_autocovariance(double tau, double gamma, double amplitude);
/// The same after boxcar averaging over `span` seconds.
double r2_autocovariance_averaged(double tau, double gamma, double amplitude, double span);

LorentzFit fit_r2_psd(const PsdEstimate& psd, const R2FitOptions& opt = {});

struct DisplacementFitOptions {
  FitWindow window;
  std::optional<double> initial_omega0;
  std::optional<double> initial_gamma;
  WeightScheme weights = WeightScheme::model;
};

/// S(f) = 2 S_F / m^2 / ((w0^2 - w^2)^2 + gamma^2 w^2) + floor, one-sided per Hz.
struct DisplacementFit {
  double omega0 = 0.0, omega0_err = 0.0;
  double gamma = 0.0, gamma_err = 0.0;        // rad/s
  double gamma_hz = 0.0, gamma_hz_err = 0.0;
  double force_psd = 0.0, force_psd_err = 0.0;
  double floor = 0.0, floor_err = 0.0;
  double temperature = 0.0, temperature_err = 0.0;
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Zero();  // (w0, log gamma, log S_F, floor)
  double reduced_chi2 = 0.0;
  double mass = 0.0;
  double f_min = 0.0, f_max = 0.0;
  std::size_t bins = 0;
  bool unreliable = false;
  std::vector<std::string> warnings;

  double model(double f) const;
};

double susceptibility_psd(double f, double omega0, double gamma, double force_psd, double mass,
                          double floor);

DisplacementFit fit_displacement_psd(const PsdEstimate& psd, double mass,
                                     const DisplacementFitOptions& opt = {});

struct PressurePoint {
  double pressure_mbar = 0.0;
  double gamma_hz = 0.0;
  double sigma_hz = 0.0;
};

/// gamma = gamma_exc + k P, weighted least squares; pressure in mbar, rates in Hz.
struct LineFit {
  double intercept = 0.0, slope = 0.0;
  double intercept_err = 0.0, slope_err = 0.0;
  double cov_is = 0.0;  // intercept-slope covariance
  double chi2 = 0.0, reduced_chi2 = 0.0;
  std::size_t n = 0;
  double dof = 0.0;
  double confidence = 0.95;
  double t_two_sided = 0.0;  // t_{(1+c)/2, n-2}
  double t_one_sided = 0.0;  // t_{c, n-2}
  std::pair<double, double> intercept_ci, slope_ci;
  double centroid = 0.0;     // weighted mean pressure, where the band is narrowest
  // Zero-intercept model gamma = k0 P.
  double slope_no_excess = 0.0, slope_no_excess_err = 0.0, chi2_no_excess = 0.0;

  double value(double p) const { return intercept + slope * p; }
  /// Confidence band of the fitted line at pressure p.
  std::pair<double, double> band(double p) const;
  /// Upper edge of the two-sided interval on the intercept.
  double upper_limit() const { return intercept_ci.second; }
  /// Strict one-sided limit at the same confidence.
  double upper_limit_one_sided() const { return intercept + t_one_sided * intercept_err; }
};

LineFit linewidth_vs_pressure(const std::vector<PressurePoint>& points, double confidence = 0.95);

/// Combines two axes' linewidths by inverse-variance weighting.
std::pair<double, double> inverse_variance_mean(const std::vector<std::pair<double, double>>& values);

struct TemperatureEstimate {
  double temperature = 0.0;  // K
  double standard_error = 0.0;
  double variance = 0.0;     // m^2, per quadrature or displacement
  double autocorr_time = 1.0;  // samples
  double effective_samples = 0.0;
};

/// T = m w0^2 sigma^2 / k_B with sigma^2 = <R^2>/2.
TemperatureEstimate effective_temperature(const QuadratureSeries& q, double mass, double omega0);
/// T = m w0^2 var(x) / k_B.
TemperatureEstimate effective_temperature(const TimeSeries& ts, double mass, double omega0);

}  // namespace levnano
