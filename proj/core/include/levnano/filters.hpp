#pragma once

#include <cstddef>
#include <vector>

namespace levnano {

/// Cascade of identical single-pole IIR low-pass stages,
/// y[n] = y[n-1] + alpha (x[n] - y[n-1]),  alpha = 1 - exp(-2 pi fc / fs).
/// Unity DC gain, monotone step response, unconditionally stable.
class CascadedLowPass {
 public:
  CascadedLowPass(int order, double cutoff, double sample_rate);

  double process(double x) noexcept {
    for (double& s : state_) {
      s += alpha_ * (x - s);
      x = s;
    }
    return x;
  }

  void reset(double value = 0.0) noexcept;

  int order() const noexcept { return static_cast<int>(state_.size()); }
  double cutoff() const noexcept { return cutoff_; }
  double sample_rate() const noexcept { return fs_; }
  double alpha() const noexcept { return alpha_; }

  /// |H(f)|^2 of the whole cascade.
  double power_gain(double f) const noexcept;
  /// Equivalent noise bandwidth (one-sided, Hz) of the cascade.
  double noise_bandwidth() const;
  /// Transient discarded from statistics: 5 / cutoff seconds.
  double settling_time() const noexcept { return 5.0 / cutoff_; }
  std::size_t settling_samples() const noexcept;

 private:
  double cutoff_;
  double fs_;
  double alpha_;
  std::vector<double> state_;
};

struct AntiAlias {
  int order = 4;
  double cutoff_fraction = 0.2;  // cutoff as a fraction of the output rate
};

/// Keeps every factor-th sample, optionally low-passing at the input rate first.
std::vector<double> decimate(const std::vector<double>& in, double sample_rate, std::size_t factor,
                             const AntiAlias* aa);

}  // namespace levnano
