#pragma once

// End-to-end runs: simulate -> demodulate -> estimate -> fit -> bound. Each
// run writes its data files plus a manifest.json into the output directory.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "levnano/config.hpp"
#include "levnano/fit.hpp"
#include "levnano/manifest.hpp"
#include "levnano/rng.hpp"

namespace levnano {

struct RunResult {
  std::filesystem::path out_dir;
  RunManifest manifest;
  std::vector<std::string> warnings;
};

RunResult run_simulate(const RunConfig& cfg);
RunResult run_analyze(const RunConfig& cfg, const std::vector<std::filesystem::path>& inputs);
RunResult run_sweep(const RunConfig& cfg);
RunResult run_bounds(const RunConfig& cfg);
/// Desk-scale reproduction chain: trap numbers, thermal calibration, R^2
/// closure, pressure sweep and collapse bounds.
RunResult reproduce_paper(const RunConfig& cfg);

/// Relative linewidth error typical of the measured sweep, log-log
/// interpolated through (81 uHz, 23/81), (7.5 mHz, 0.5/7.5), (28.5 mHz, 0.7/28.5).
double reference_relative_error(double gamma_hz);

/// Sweep points on gamma = gamma_exc + k P with Gaussian scatter of the
/// reference-scale error bars.
std::vector<PressurePoint> synthetic_sweep(const std::vector<double>& pressures_mbar, double k_hz_per_mbar,
                                           double gamma_exc_hz, RandomStream& rng);

/// Pressures of the reference-scale sweep, mbar.
std::vector<double> reference_sweep_pressures();
inline constexpr double reference_sweep_slope = 285.0;  // Hz/mbar

/// Largest length <= n of the form 2^a 3^b 5^c.
std::size_t nice_fft_size(std::size_t n);

// CSV writers shared by the runs.
void write_psd_csv(const std::filesystem::path& path, const PsdEstimate& psd,
                   const std::function<double(double)>& model, const std::vector<std::string>& header,
                   double f_min = 0.0, double f_max = 0.0);
void write_linefit_csv(const std::filesystem::path& path, const std::vector<PressurePoint>& points,
                       const LineFit& fit);

}  // namespace levnano
