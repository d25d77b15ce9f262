#pragma once

// Dissipative collapse models (dCSL, dDP): collapse strength eta (1/(m^2 s)),
// centre-of-mass dissipation rate gamma (rad/s), and exclusion maps against a
// measured damping bound.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levnano/trap.hpp"

namespace levnano {

struct DcslParams {
  double lambda = 0.0;  // 1/s
  double r_C = 0.0;     // m
  double T = 0.0;       // K
  void validate() const;
};

struct DdpParams {
  double R0 = 0.0;  // m
  double T = 0.0;   // K
  void validate() const;
};

struct MeasuredBound {
  double gamma_cm_upper = 0.0;  // Hz (gamma / 2 pi)
  double confidence = 0.95;
  void validate() const;
};

enum class CollapseVariant { sphere, strong, single_particle };

std::string to_string(CollapseVariant v);
CollapseVariant parse_collapse_variant(const std::string& s);

/// chi = hbar^2 / (8 m_a k_B T L^2)
double chi(double m_a, double T, double length);

/// Form factor of the homogeneous sphere in the dCSL strength,
/// B(y) = 1 - 2/y + e^{-y} (1 + 2/y); series below y = 0.5.
double dcsl_sphere_bracket(double y);
/// g(x) = sqrt(pi) x^3 erf(x) + x^2 (e^{-x^2} - 3) + 2 (1 - e^{-x^2}); series below x = 0.5.
double ddp_sphere_bracket(double x);

struct StrongDissipation {
  double eta = 0.0;
  bool in_regime = true;  // a < L / 10
};

double eta_dcsl_sphere(const ParticleSpec& p, const DcslParams& d);
StrongDissipation eta_dcsl_strong(const ParticleSpec& p, const DcslParams& d);
double eta_dcsl_single(const ParticleSpec& p, const DcslParams& d);
/// Standard (non-dissipative) CSL strength of the sphere.
double eta_csl_sphere(const ParticleSpec& p, double lambda, double r_C);

double gamma_dcsl(const ParticleSpec& p, const DcslParams& d,
                  CollapseVariant v = CollapseVariant::sphere);

/// S(w) = hbar^2 eta [1 + kappa^2 m^2 (gamma_t^2 + w^2)], kappa = gamma / (2 hbar eta).
double s_dcsl_psd(double omega, const ParticleSpec& p, const DcslParams& d, double gamma_gas);

double eta_ddp_sphere(const ParticleSpec& p, const DdpParams& d);
StrongDissipation eta_ddp_strong(const ParticleSpec& p, const DdpParams& d);
double eta_ddp_single(const ParticleSpec& p, const DdpParams& d);
double eta_dp_sphere(const ParticleSpec& p, double R0);

double gamma_ddp(const ParticleSpec& p, const DdpParams& d,
                 CollapseVariant v = CollapseVariant::single_particle);

std::vector<double> log_space(double lo, double hi, std::size_t n);

struct GridAxis {
  std::string name;
  std::vector<double> values;  // log-spaced, increasing
};

enum class Cell : std::uint8_t { allowed = 0, excluded = 1, indeterminate = 2 };

struct BoundaryPoint {
  double axis1 = 0.0;
  double axis2 = 0.0;
};

struct ExclusionGrid {
  GridAxis axis1;  // columns
  GridAxis axis2;  // rows within a column
  std::vector<double> gamma_hz;  // [i1 * n2 + i2]
  std::vector<Cell> cells;
  std::vector<BoundaryPoint> boundary;
  std::size_t indeterminate = 0;
  std::vector<std::string> failures;  // first few evaluation errors

  Cell cell(std::size_t i1, std::size_t i2) const { return cells[i1 * axis2.values.size() + i2]; }
  double gamma(std::size_t i1, std::size_t i2) const { return gamma_hz[i1 * axis2.values.size() + i2]; }
  std::size_t excluded_count() const;
  /// Boundary point of smallest axis2 value.
  BoundaryPoint boundary_minimum() const;
};

// gamma in rad/s for (axis1, axis2) values
using CollapseRate = std::function<double(double, double)>;

/// Cells excluded iff gamma / 2 pi > bound. Boundary points come from the
/// threshold crossings along axis2 in each column, log-linearly interpolated.
ExclusionGrid exclusion_map(const CollapseRate& rate, GridAxis axis1, GridAxis axis2,
                            const MeasuredBound& bound);

/// dCSL over (r_C, lambda) at fixed T.
ExclusionGrid dcsl_exclusion(const ParticleSpec& p, double T, const MeasuredBound& bound,
                             GridAxis r_C, GridAxis lambda,
                             CollapseVariant v = CollapseVariant::sphere);
/// dDP over (R0, T).
ExclusionGrid ddp_exclusion(const ParticleSpec& p, const MeasuredBound& bound, GridAxis R0,
                            GridAxis T, CollapseVariant v = CollapseVariant::single_particle);

struct Interval {
  double lo = 0.0, hi = 0.0;
  bool lo_at_edge = false, hi_at_edge = false;
};

/// Excluded intervals of a one-dimensional scan.
std::vector<Interval> exclusion_intervals(const std::function<double(double)>& rate,
                                          const std::vector<double>& axis, const MeasuredBound& bound);

/// True when every cell excluded in `inner` is excluded in `outer` (same axes).
bool exclusion_contains(const ExclusionGrid& outer, const ExclusionGrid& inner);

}  // namespace levnano
