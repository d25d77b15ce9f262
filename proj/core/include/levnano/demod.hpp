#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "levnano/filters.hpp"
#include "levnano/timeseries.hpp"

namespace levnano {

struct LockinConfig {
  double f_lo = 0.0;    // Hz
  int filter_order = 4;
  double cutoff = 0.0;  // Hz
  std::size_t decimation = 1;
  bool discard_settling = true;

  /// Checks the configuration against an input rate; `expected_gamma_hz`
  /// (gamma/2pi) adds the cutoff >= 10 x linewidth requirement.
  void validate(double sample_rate, std::optional<double> expected_gamma_hz = {}) const;
};

/// Streaming lock-in: X = 2 LP(u cos), Y = 2 LP(u sin), then decimation.
class Lockin {
 public:
  Lockin(const LockinConfig& cfg, double sample_rate);

  /// Feeds one input sample; returns true when (X, Y) holds a new output.
  bool push(double u, double& X, double& Y);

  double output_rate() const noexcept { return fs_ / static_cast<double>(cfg_.decimation); }
  /// Time of the first emitted sample relative to the input start.
  double output_t0() const noexcept;
  const CascadedLowPass& filter() const noexcept { return lp_x_; }

 private:
  LockinConfig cfg_;
  double fs_;
  CascadedLowPass lp_x_, lp_y_;
  std::size_t n_ = 0;
  std::size_t skip_ = 0;
};

QuadratureSeries lockin(const TimeSeries& ts, const LockinConfig& cfg);

struct Amplitude {
  std::vector<double> R;
  std::vector<double> R2;
};

Amplitude amplitude(const QuadratureSeries& q);

/// Power response the lock-in low-pass imposes on the R^2 spectrum, |H(f)|^2;
/// holds while the linewidth is far inside the passband.
std::function<double(double)> r2_response(const LockinConfig& cfg, double input_rate);

struct RayleighStats {
  double sigma_from_mean = 0.0;
  double sigma_from_var = 0.0;
  double relative_difference = 0.0;  // |s1 - s2| / mean(s1, s2)
  std::size_t n = 0;
  double effective_samples = 0.0;    // duration gamma / 2 when supplied, else n
  bool low_sample_warning = false;   // effective samples < 30
  bool degenerate = false;           // zero spread
  std::vector<double> bin_centers;
  std::vector<double> density;       // normalized histogram
  std::vector<double> model_density; // r / s^2 exp(-r^2 / (2 s^2)), s = mean estimate
};

/// Rayleigh moment estimators: sigma = <r> sqrt(2/pi), sigma = sqrt(2 var / (4 - pi)).
RayleighStats rayleigh_stats(const std::vector<double>& R, std::optional<double> effective_samples = {},
                             std::size_t bins = 50);

double rayleigh_density(double r, double sigma);

}  // namespace levnano
