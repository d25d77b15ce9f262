#include "levnano/demod.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "detail.hpp"
#include "levnano/constants.hpp"
#include "levnano/errors.hpp"

namespace levnano {

namespace c = constants;

void LockinConfig::validate(double fs, std::optional<double> expected_gamma_hz) const {
  if (!(fs > 0)) throw InvalidParameter("lock-in input rate must be > 0");
  if (!(f_lo > 0)) throw InvalidParameter("lock-in f_LO must be > 0");
  if (!(f_lo < 0.5 * fs)) throw InvalidParameter("lock-in f_LO lies above the Nyquist frequency");
  if (filter_order < 1) throw InvalidParameter("lock-in filter order must be >= 1");
  if (!(cutoff > 0)) throw InvalidParameter("lock-in cutoff must be > 0");
  if (!(cutoff < f_lo)) throw InvalidParameter("lock-in cutoff must be below f_LO");
  if (decimation < 1) throw InvalidParameter("lock-in decimation must be >= 1");
  if (fs / static_cast<double>(decimation) < 4.0 * cutoff)
    throw InvalidParameter("post-decimation rate must be >= 4 x cutoff");
  if (expected_gamma_hz && cutoff < 10.0 * *expected_gamma_hz)
    throw InvalidParameter("lock-in cutoff must be >= 10 x the expected linewidth");
}

Lockin::Lockin(const LockinConfig& cfg, double fs)
    : cfg_(cfg), fs_(fs), lp_x_(cfg.filter_order, cfg.cutoff, fs), lp_y_(cfg.filter_order, cfg.cutoff, fs) {
  cfg.validate(fs);
  if (cfg.discard_settling) {
    // first kept sample is the first decimation slot at or after the transient
    std::size_t s = lp_x_.settling_samples();
    skip_ = (s + cfg.decimation - 1) / cfg.decimation * cfg.decimation;
  }
}

double Lockin::output_t0() const noexcept { return static_cast<double>(skip_) / fs_; }

bool Lockin::push(double u, double& X, double& Y) {
  double cyc = std::fmod(cfg_.f_lo * static_cast<double>(n_), fs_) / fs_;
  double th = c::two_pi * cyc;
  double x = lp_x_.process(2.0 * u * std::cos(th));
  double y = lp_y_.process(2.0 * u * std::sin(th));
  std::size_t n = n_++;
  if (n < skip_ || n % cfg_.decimation != 0) return false;
  X = x;
  Y = y;
  return true;
}

QuadratureSeries lockin(const TimeSeries& ts, const LockinConfig& cfg) {
  Lockin li(cfg, ts.sample_rate);
  QuadratureSeries q;
  q.sample_rate = li.output_rate();
  q.t0 = ts.t0 + li.output_t0();
  q.f_lo = cfg.f_lo;
  q.label = ts.label;
  q.metadata = ts.metadata;
  q.metadata["lockin_f_lo_Hz"] = detail::fmt(cfg.f_lo);
  q.metadata["lockin_cutoff_Hz"] = detail::fmt(cfg.cutoff);
  q.metadata["lockin_order"] = std::to_string(cfg.filter_order);
  q.metadata["lockin_decimation"] = std::to_string(cfg.decimation);
  q.X.reserve(ts.size() / cfg.decimation + 1);
  q.Y.reserve(ts.size() / cfg.decimation + 1);
  double X, Y;
  for (double u : ts.values)
    if (li.push(u, X, Y)) {
      q.X.push_back(X);
      q.Y.push_back(Y);
    }
  if (q.X.empty()) throw InvalidParameter("record shorter than the lock-in settling time");
  return q;
}

std::function<double(double)> r2_response(const LockinConfig& cfg, double input_rate) {
  CascadedLowPass lp(cfg.filter_order, cfg.cutoff, input_rate);
  return [lp](double f) { return lp.power_gain(f); };
}

Amplitude amplitude(const QuadratureSeries& q) {
  if (q.X.size() != q.Y.size()) throw InvalidParameter("X and Y differ in length");
  Amplitude a;
  a.R.resize(q.size());
  a.R2.resize(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    a.R2[i] = q.X[i] * q.X[i] + q.Y[i] * q.Y[i];
    a.R[i] = std::sqrt(a.R2[i]);
  }
  return a;
}

double rayleigh_density(double r, double sigma) {
  if (r < 0) return 0.0;
  double s2 = sigma * sigma;
  return r / s2 * std::exp(-r * r / (2.0 * s2));
}

RayleighStats rayleigh_stats(const std::vector<double>& R, std::optional<double> effective_samples,
                             std::size_t bins) {
  if (R.size() < 2) throw InvalidParameter("rayleigh_stats needs at least 2 samples");
  if (bins < 1) throw InvalidParameter("rayleigh_stats needs at least one bin");
  RayleighStats st;
  st.n = R.size();
  const double n = static_cast<double>(R.size());
  double mean = std::accumulate(R.begin(), R.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : R) ss += (r - mean) * (r - mean);
  double var = ss / (n - 1.0);

  st.sigma_from_mean = mean * std::sqrt(2.0 / c::pi);
  st.sigma_from_var = std::sqrt(2.0 * var / (4.0 - c::pi));
  double avg = 0.5 * (st.sigma_from_mean + st.sigma_from_var);
  st.relative_difference = avg > 0 ? std::abs(st.sigma_from_mean - st.sigma_from_var) / avg : 0.0;
  st.degenerate = var == 0.0;
  st.effective_samples = effective_samples.value_or(n);
  st.low_sample_warning = st.effective_samples < 30.0;

  double rmax = *std::max_element(R.begin(), R.end());
  if (rmax <= 0) rmax = 1.0;
  double w = rmax / static_cast<double>(bins);
  std::vector<double> counts(bins, 0.0);
  for (double r : R) {
    auto k = static_cast<std::size_t>(r / w);
    counts[std::min(k, bins - 1)] += 1.0;
  }
  st.bin_centers.resize(bins);
  st.density.resize(bins);
  st.model_density.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    st.bin_centers[k] = (static_cast<double>(k) + 0.5) * w;
    st.density[k] = counts[k] / (n * w);
    st.model_density[k] = st.sigma_from_mean > 0 ? rayleigh_density(st.bin_centers[k], st.sigma_from_mean) : 0.0;
  }
  return st;
}

}  // namespace levnano
