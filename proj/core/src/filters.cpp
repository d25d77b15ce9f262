#include "levnano/filters.hpp"

#include <cmath>

#include "levnano/constants.hpp"
#include "levnano/errors.hpp"

namespace levnano {

CascadedLowPass::CascadedLowPass(int order, double cutoff, double sample_rate)
    : cutoff_(cutoff), fs_(sample_rate) {
  if (order < 1) throw InvalidParameter("filter order must be >= 1");
  if (!(sample_rate > 0)) throw InvalidParameter("filter sample rate must be > 0");
  if (!(cutoff > 0 && cutoff < 0.5 * sample_rate))
    throw InvalidParameter("filter cutoff must lie in (0, fs/2)");
  alpha_ = -std::expm1(-constants::two_pi * cutoff / sample_rate);
  state_.assign(static_cast<std::size_t>(order), 0.0);
}

void CascadedLowPass::reset(double value) noexcept {
  for (double& s : state_) s = value;
}

double CascadedLowPass::power_gain(double f) const noexcept {
  double b = 1.0 - alpha_;
  double one = alpha_ * alpha_ / (1.0 - 2.0 * b * std::cos(constants::two_pi * f / fs_) + b * b);
  return std::pow(one, order());
}

double CascadedLowPass::noise_bandwidth() const {
  // Trapezoidal integral of |H|^2 over [0, fs/2]; the integrand is smooth.
  const int n = 1 << 16;
  double df = 0.5 * fs_ / n, acc = 0.5 * (power_gain(0.0) + power_gain(0.5 * fs_));
  for (int i = 1; i < n; ++i) acc += power_gain(i * df);
  return acc * df;
}

std::size_t CascadedLowPass::settling_samples() const noexcept {
  return static_cast<std::size_t>(std::ceil(settling_time() * fs_));
}

std::vector<double> decimate(const std::vector<double>& in, double sample_rate, std::size_t factor,
                             const AntiAlias* aa) {
  if (factor < 1) throw InvalidParameter("decimation factor must be >= 1");
  std::vector<double> out;
  out.reserve(in.size() / factor + 1);
  if (aa == nullptr || factor == 1) {
    for (std::size_t i = 0; i < in.size(); i += factor) out.push_back(in[i]);
    return out;
  }
  CascadedLowPass lp(aa->order, aa->cutoff_fraction * sample_rate / static_cast<double>(factor),
                     sample_rate);
  if (!in.empty()) lp.reset(in.front());
  for (std::size_t i = 0; i < in.size(); ++i) {
    double y = lp.process(in[i]);
    if (i % factor == 0) out.push_back(y);
  }
  return out;
}

}  // namespace levnano
