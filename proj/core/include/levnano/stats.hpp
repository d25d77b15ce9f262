#pragma once

#include <cstddef>
#include <vector>

namespace levnano {

double mean(const std::vector<double>& x);
double sample_variance(const std::vector<double>& x);

struct AutocorrTime {
  double tau = 1.0;        // integrated autocorrelation time, samples
  std::size_t window = 0;  // summation window chosen
};

/// tau = 1 + 2 sum_{t=1}^{M} rho(t), window M the smallest with M >= c tau.
AutocorrTime integrated_autocorr_time(const std::vector<double>& x, double c = 5.0);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic distribution.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Quantile of Student's t distribution.
double student_t_quantile(double p, double dof);

/// Means over consecutive blocks of `block` samples; a partial tail is dropped.
std::vector<double> block_average(const std::vector<double>& x, std::size_t block);

}  // namespace levnano
