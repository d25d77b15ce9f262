#include "levnano/psd.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "levnano/constants.hpp"
#include "levnano/errors.hpp"

namespace levnano {

namespace {

// FFTW planning is not thread-safe; execution on distinct plans is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Real-to-complex plan with owned buffers. FFTW_ESTIMATE keeps the chosen
// algorithm, and hence every output bit, independent of timing.
class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_complex(n / 2 + 1);
    if (!in_ || !out_) throw NumericalFailure("FFT buffer allocation failed");
    std::lock_guard lk(plan_mutex());
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    if (!plan_) throw NumericalFailure("FFT plan creation failed");
  }
  ~RealFft() {
    std::lock_guard lk(plan_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  double* in() { return in_; }
  void run() { fftw_execute(plan_); }
  std::complex<double> out(std::size_t k) const { return {out_[k][0], out_[k][1]}; }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double* in_ = nullptr;
  fftw_complex* out_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace

double PsdEstimate::integrated_power() const noexcept {
  double s = 0.0;
  for (double v : values) s += v;
  return s * resolution();
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

double window_enbw(const std::vector<double>& w, double fs) {
  double s1 = 0, s2 = 0;
  for (double v : w) {
    s1 += v;
    s2 += v * v;
  }
  return fs * s2 / (s1 * s1);
}

double welch_effective_segments(const std::vector<double>& w, std::size_t step, std::size_t K) {
  if (K == 0) return 0.0;
  double s2 = 0;
  for (double v : w) s2 += v * v;
  double denom = 1.0;
  for (std::size_t j = 1; j < K; ++j) {
    std::size_t lag = j * step;
    if (lag >= w.size()) break;
    double c = 0;
    for (std::size_t i = 0; i + lag < w.size(); ++i) c += w[i] * w[i + lag];
    c /= s2;
    denom += 2.0 * (1.0 - static_cast<double>(j) / static_cast<double>(K)) * c * c;
  }
  return static_cast<double>(K) / denom;
}

double periodogram_bin_inflation(const std::vector<double>& w) {
  std::vector<double> w2(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) w2[i] = w[i] * w[i];
  auto W = real_fft(w2);
  double dc = std::norm(W[0]);
  double acc = 1.0;
  for (std::size_t m = 1; m < W.size(); ++m) {
    double rho = std::norm(W[m]) / dc;
    if (rho < 1e-12) break;
    acc += 2.0 * rho;
  }
  return acc;
}

std::vector<std::complex<double>> real_fft(const std::vector<double>& x) {
  if (x.empty()) return {};
  RealFft f(x.size());
  std::copy(x.begin(), x.end(), f.in());
  f.run();
  std::vector<std::complex<double>> out(x.size() / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = f.out(k);
  return out;
}

struct WelchAccumulator::Impl {
  std::size_t N, step, nb;
  double overlap, fs;
  MeanRemoval mean;
  std::vector<double> win;
  double win_s2 = 0.0;
  RealFft fft;
  std::vector<double> buf;
  std::vector<double> sum_pow;
  std::vector<std::complex<double>> sum_amp;  // for the global-mean correction
  std::vector<std::complex<double>> win_ft;
  std::size_t K = 0;
  double total = 0.0;
  std::size_t count = 0;

  // Segment groups for the jackknife; adjacent pairs merge whenever the count
  // reaches 2 * min_groups, so between min_groups and 2 * min_groups remain.
  struct Group {
    std::size_t n = 0;
    std::vector<double> pow;
    std::vector<std::complex<double>> amp;
  };
  static constexpr std::size_t min_groups = 8;
  std::vector<Group> groups;
  std::size_t group_cap = 1;

  Impl(std::size_t n, double ov, double rate, MeanRemoval m)
      : N(n), nb(n / 2 + 1), overlap(ov), fs(rate), mean(m), win(hann_window(n)), fft(n) {
    step = N - static_cast<std::size_t>(std::llround(overlap * static_cast<double>(N)));
    if (step < 1) step = 1;
    for (double v : win) win_s2 += v * v;
    buf.reserve(N);
    sum_pow.assign(nb, 0.0);
    if (mean == MeanRemoval::global) {
      sum_amp.assign(nb, {0.0, 0.0});
      win_ft = real_fft(win);
    }
  }

  void segment() {
    double mu = 0.0;
    if (mean == MeanRemoval::per_segment) {
      for (double v : buf) mu += v;
      mu /= static_cast<double>(N);
    }
    double* in = fft.in();
    for (std::size_t i = 0; i < N; ++i) in[i] = win[i] * (buf[i] - mu);
    fft.run();
    if (groups.empty() || groups.back().n == group_cap) {
      if (groups.size() == 2 * min_groups) merge_groups();
      Group g;
      g.pow.assign(nb, 0.0);
      if (mean == MeanRemoval::global) g.amp.assign(nb, {0.0, 0.0});
      groups.push_back(std::move(g));
    }
    Group& g = groups.back();
    for (std::size_t k = 0; k < nb; ++k) {
      auto a = fft.out(k);
      sum_pow[k] += std::norm(a);
      g.pow[k] += std::norm(a);
      if (mean == MeanRemoval::global) {
        sum_amp[k] += a;
        g.amp[k] += a;
      }
    }
    ++g.n;
    ++K;
  }

  void merge_groups() {
    std::vector<Group> merged;
    for (std::size_t i = 0; i + 1 < groups.size(); i += 2) {
      Group a = std::move(groups[i]);
      const Group& b = groups[i + 1];
      a.n += b.n;
      for (std::size_t k = 0; k < nb; ++k) a.pow[k] += b.pow[k];
      for (std::size_t k = 0; k < a.amp.size(); ++k) a.amp[k] += b.amp[k];
      merged.push_back(std::move(a));
    }
    groups = std::move(merged);
    group_cap *= 2;
  }

  // One-sided density from summed segment powers/amplitudes over n segments.
  void density(const std::vector<double>& pow, const std::vector<std::complex<double>>& amp, double n, double c,
               std::vector<double>& out) const {
    out.resize(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      double pw = pow[k] / n;
      if (mean == MeanRemoval::global) {
        // mean_s |A_s - c W|^2 = mean|A|^2 - 2c Re(mean(A) W*) + c^2 |W|^2
        auto W = win_ft[k];
        pw += -2.0 * c * (std::conj(W) * amp[k]).real() / n + c * c * std::norm(W);
        if (pw < 0) pw = 0;
      }
      bool edge = k == 0 || (N % 2 == 0 && k == nb - 1);
      out[k] = (edge ? 1.0 : 2.0) * pw / (fs * win_s2);
    }
  }

  void push(double x) {
    total += x;
    ++count;
    buf.push_back(x);
    if (buf.size() == N) {
      segment();
      buf.erase(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(step));
    }
  }
};

WelchAccumulator::WelchAccumulator(std::size_t segment_length, double overlap, double fs,
                                   MeanRemoval mean) {
  if (segment_length < 2) throw InvalidParameter("Welch segment length must be >= 2");
  if (!(overlap >= 0 && overlap < 1)) throw InvalidParameter("Welch overlap must lie in [0, 1)");
  if (!(fs > 0)) throw InvalidParameter("Welch sample rate must be > 0");
  impl_ = std::make_unique<Impl>(segment_length, overlap, fs, mean);
}

WelchAccumulator::~WelchAccumulator() = default;
WelchAccumulator::WelchAccumulator(WelchAccumulator&&) noexcept = default;
WelchAccumulator& WelchAccumulator::operator=(WelchAccumulator&&) noexcept = default;

void WelchAccumulator::push(double x) { impl_->push(x); }

void WelchAccumulator::push(const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) impl_->push(x[i]);
}

std::size_t WelchAccumulator::segments() const noexcept { return impl_->K; }

PsdEstimate WelchAccumulator::result() const {
  const Impl& s = *impl_;
  if (s.K == 0) throw InvalidParameter("record shorter than one Welch segment");
  PsdEstimate p;
  p.segment_count = s.K;
  p.segment_length = s.N;
  p.overlap = s.overlap;
  p.sample_rate = s.fs;
  p.enbw = window_enbw(s.win, s.fs);
  p.effective_segments = welch_effective_segments(s.win, s.step, s.K);
  p.bin_correlation = periodogram_bin_inflation(s.win);
  p.frequencies.resize(s.nb);
  p.values.resize(s.nb);

  const double c = s.mean == MeanRemoval::global ? s.total / static_cast<double>(s.count) : 0.0;
  s.density(s.sum_pow, s.sum_amp, static_cast<double>(s.K), c, p.values);
  for (std::size_t k = 0; k < s.nb; ++k) p.frequencies[k] = static_cast<double>(k) * s.fs / static_cast<double>(s.N);

  if (s.groups.size() >= Impl::min_groups) {
    std::vector<double> pw(s.nb);
    std::vector<std::complex<double>> am(s.sum_amp.size());
    for (const auto& g : s.groups) {
      for (std::size_t k = 0; k < s.nb; ++k) pw[k] = s.sum_pow[k] - g.pow[k];
      for (std::size_t k = 0; k < am.size(); ++k) am[k] = s.sum_amp[k] - g.amp[k];
      p.jackknife.emplace_back();
      s.density(pw, am, static_cast<double>(s.K - g.n), c, p.jackknife.back());
    }
  }
  return p;
}

PsdEstimate welch_psd(const std::vector<double>& x, double fs, std::size_t segment_length,
                      double overlap, MeanRemoval mean) {
  if (segment_length > x.size()) throw InvalidParameter("record shorter than one Welch segment");
  if (mean == MeanRemoval::global) {
    // two-pass when the whole record is available: same result, less cancellation
    double mu = 0;
    for (double v : x) mu += v;
    mu /= static_cast<double>(x.size());
    WelchAccumulator acc(segment_length, overlap, fs, MeanRemoval::none);
    for (double v : x) acc.push(v - mu);
    return acc.result();
  }
  WelchAccumulator acc(segment_length, overlap, fs, mean);
  acc.push(x.data(), x.size());
  return acc.result();
}

namespace {

// C_w(m) = sum_n w[n] w[n+m], m = 0..N-1, from |FFT(zero-padded w)|^2. The
// spectrum is real and even, so a forward transform inverts it up to 1/L.
std::vector<double> window_lag_products(std::size_t N) {
  const std::size_t L = 2 * N;
  std::vector<double> wp(L, 0.0);
  auto w = hann_window(N);
  std::copy(w.begin(), w.end(), wp.begin());
  auto Wf = real_fft(wp);
  std::vector<double> spec(L);
  for (std::size_t k = 0; k < L; ++k) spec[k] = std::norm(Wf[k <= N ? k : L - k]);
  auto back = real_fft(spec);
  std::vector<double> cw(N);
  for (std::size_t m = 0; m < N; ++m) cw[m] = back[m].real() / static_cast<double>(L);
  return cw;
}

}  // namespace

std::vector<double> expected_periodogram(const std::function<double(double)>& acf, std::size_t N,
                                         double fs) {
  if (N < 2) throw InvalidParameter("segment length must be >= 2");
  thread_local std::size_t cached_n = 0;
  thread_local std::vector<double> cw;
  if (cached_n != N) {
    cw = window_lag_products(N);
    cached_n = N;
  }
  // E|sum_n w x e^{-i th n}|^2 = sum_m C_w(m) R(m/fs) e^{-i th m}
  const std::size_t L = 2 * N;
  std::vector<double> a(L, 0.0);
  a[0] = cw[0] * acf(0.0);
  for (std::size_t m = 1; m < N; ++m) {
    double v = cw[m] * acf(static_cast<double>(m) / fs);
    a[m] = v;
    a[L - m] = v;
  }
  auto A = real_fft(a);
  std::vector<double> out(N / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    bool edge = k == 0 || (N % 2 == 0 && k == out.size() - 1);
    out[k] = (edge ? 1.0 : 2.0) * A[2 * k].real() / (fs * cw[0]);
  }
  return out;
}

}  // namespace levnano
