#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace levnano {

/// One-sided Welch estimate, units^2/Hz.
struct PsdEstimate {
  std::vector<double> frequencies;  // Hz, bin k at k fs / N
  std::vector<double> values;
  std::size_t segment_count = 0;
  std::size_t segment_length = 0;
  double overlap = 0.0;
  double sample_rate = 0.0;
  std::string window = "hann";
  double enbw = 0.0;                 // Hz
  double effective_segments = 0.0;   // overlap-corrected averaging count
  double bin_correlation = 1.0;      // variance inflation of smooth fits over adjacent bins
  // Delete-one-group spectra over contiguous segment groups (empty below 8 segments).
  // Fitting each gives a jackknife error that holds for non-Gaussian inputs.
  std::vector<std::vector<double>> jackknife;

  double resolution() const noexcept { return sample_rate / static_cast<double>(segment_length); }
  /// Sum of values times bin width (variance of the input when mean-free).
  double integrated_power() const noexcept;
};

enum class MeanRemoval { none, global, per_segment };

std::vector<double> hann_window(std::size_t n);
double window_enbw(const std::vector<double>& w, double sample_rate);
/// K / (1 + 2 sum_j (1 - j/K) c_j^2), c_j the window overlap correlation at lag j * step.
double welch_effective_segments(const std::vector<double>& w, std::size_t step, std::size_t segments);
/// 1 + 2 sum_m rho_m, rho_m the correlation of periodogram bins m apart.
double periodogram_bin_inflation(const std::vector<double>& w);

/// Streaming Welch estimator; segments are processed as soon as they fill.
/// With MeanRemoval::global the running-mean correction is applied exactly at
/// result() time from per-bin segment sums.
class WelchAccumulator {
 public:
  WelchAccumulator(std::size_t segment_length, double overlap, double sample_rate,
                   MeanRemoval mean = MeanRemoval::global);
  ~WelchAccumulator();
  WelchAccumulator(WelchAccumulator&&) noexcept;
  WelchAccumulator& operator=(WelchAccumulator&&) noexcept;

  void push(double x);
  void push(const double* x, std::size_t n);
  std::size_t segments() const noexcept;
  PsdEstimate result() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

PsdEstimate welch_psd(const std::vector<double>& x, double sample_rate, std::size_t segment_length,
                      double overlap = 0.5, MeanRemoval mean = MeanRemoval::global);

/// Exact expectation of the windowed one-sided periodogram for a stationary
/// process with autocovariance acf(tau), evaluated at bins 0..N/2.
std::vector<double> expected_periodogram(const std::function<double(double)>& acf,
                                         std::size_t segment_length, double sample_rate);

/// Forward real FFT of length n, returns n/2+1 bins.
std::vector<std::complex<double>> real_fft(const std::vector<double>& x);

}  // namespace levnano
