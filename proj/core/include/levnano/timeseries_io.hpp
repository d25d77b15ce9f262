#pragma once

// LEVT binary container (all fields little-endian):
//   "LEVT" | u32 version | f64 sample_rate | u64 n | u32 label_len | label
//   version 1: n f64 samples
//   version 2: u32 channels | f64 t0 | f64 f_lo | channels x n f64, channel-major

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "levnano/timeseries.hpp"

namespace levnano {

struct LevtRecord {
  std::uint32_t version = 1;
  double sample_rate = 0.0;
  std::string label;
  double t0 = 0.0;
  double f_lo = 0.0;
  std::vector<std::vector<double>> channels;
};

std::string encode_levt(const LevtRecord& rec);
LevtRecord decode_levt(const std::string& bytes);

void write_levt(const std::filesystem::path& path, const TimeSeries& ts);
void write_levt(const std::filesystem::path& path, const QuadratureSeries& q);
LevtRecord read_levt(const std::filesystem::path& path);
TimeSeries read_timeseries(const std::filesystem::path& path);
QuadratureSeries read_quadratures(const std::filesystem::path& path);

// CSV with a "t,value" header (or t,X,Y,R,R2), full-precision decimals.
void write_csv(const std::filesystem::path& path, const TimeSeries& ts);
void write_csv(const std::filesystem::path& path, const QuadratureSeries& q);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace levnano
