#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace levnano {

/// Uniformly sampled displacement record (m).
struct TimeSeries {
  double sample_rate = 0.0;  // Hz
  double t0 = 0.0;           // s
  std::vector<double> values;
  std::string label;
  std::map<std::string, std::string> metadata;

  std::size_t size() const noexcept { return values.size(); }
  double duration() const noexcept { return sample_rate > 0 ? values.size() / sample_rate : 0.0; }
  double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) / sample_rate; }
};

/// Slowly varying quadratures, u(t) ~ X cos(w_LO t) + Y sin(w_LO t).
struct QuadratureSeries {
  double sample_rate = 0.0;  // Hz, post-decimation
  double t0 = 0.0;
  double f_lo = 0.0;         // Hz; 0 when generated directly in the rotating frame
  std::vector<double> X;
  std::vector<double> Y;
  std::string label;
  std::map<std::string, std::string> metadata;

  std::size_t size() const noexcept { return X.size(); }
  double duration() const noexcept { return sample_rate > 0 ? X.size() / sample_rate : 0.0; }
};

}  // namespace levnano
