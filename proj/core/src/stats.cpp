#include "levnano/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <complex>

#include "levnano/errors.hpp"
#include "levnano/psd.hpp"

namespace levnano {

double mean(const std::vector<double>& x) {
  if (x.empty()) throw InvalidParameter("mean of an empty sequence");
  double s = 0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double sample_variance(const std::vector<double>& x) {
  if (x.size() < 2) throw InvalidParameter("variance needs at least 2 samples");
  double mu = mean(x), s = 0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size() - 1);
}

AutocorrTime integrated_autocorr_time(const std::vector<double>& x, double c) {
  const std::size_t n = x.size();
  if (n < 4) throw InvalidParameter("autocorrelation time needs at least 4 samples");
  double mu = mean(x);
  std::size_t L = 1;
  while (L < 2 * n) L <<= 1;
  std::vector<double> y(L, 0.0);
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - mu;
  auto Y = real_fft(y);
  std::vector<double> spec(L);
  for (std::size_t k = 0; k < L; ++k) spec[k] = std::norm(Y[k <= L / 2 ? k : L - k]);
  auto back = real_fft(spec);  // even spectrum: forward transform inverts up to 1/L
  double c0 = back[0].real();
  AutocorrTime out;
  if (c0 <= 0) return out;
  double tau = 1.0;
  std::size_t M = 1;
  for (; M < n / 2; ++M) {
    tau += 2.0 * back[M].real() / c0;
    if (static_cast<double>(M) >= c * tau) break;
  }
  out.tau = std::max(tau, 1.0 / static_cast<double>(n));
  out.window = M;
  return out;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidParameter("KS test needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  double ne = na * nb / (na + nb);
  double lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  // Q_KS(lam) = 2 sum (-1)^{k-1} exp(-2 k^2 lam^2)
  if (lam < 1e-3) return r;
  double q = 0, sign = 1;
  for (int k = 1; k <= 200; ++k) {
    double term = sign * std::exp(-2.0 * k * k * lam * lam);
    q += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  r.p_value = std::clamp(2.0 * q, 0.0, 1.0);
  return r;
}

double student_t_quantile(double p, double dof) {
  if (!(p > 0 && p < 1) || !(dof > 0)) throw InvalidParameter("t quantile needs 0<p<1 and dof>0");
  return boost::math::quantile(boost::math::students_t(dof), p);
}

std::vector<double> block_average(const std::vector<double>& x, std::size_t block) {
  if (block < 1) throw InvalidParameter("block size must be >= 1");
  std::vector<double> out(x.size() / block);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double s = 0;
    for (std::size_t i = 0; i < block; ++i) s += x[k * block + i];
    out[k] = s / static_cast<double>(block);
  }
  return out;
}

}  // namespace levnano
