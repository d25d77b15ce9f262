#include "levnano/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "levnano/constants.hpp"
#include "levnano/errors.hpp"
#include "levnano/parallel.hpp"

namespace levnano {

namespace c = constants;

namespace {

const double sqrt_pi = std::sqrt(c::pi);

bool positive(double v) { return v > 0 && std::isfinite(v); }

}  // namespace

void DcslParams::validate() const {
  if (!positive(lambda) || !positive(r_C) || !positive(T))
    throw InvalidParameter("dCSL parameters lambda, r_C, T must be > 0");
}

void DdpParams::validate() const {
  if (!positive(R0) || !positive(T)) throw InvalidParameter("dDP parameters R0, T must be > 0");
}

void MeasuredBound::validate() const {
  if (!(gamma_cm_upper >= 0) || std::isnan(gamma_cm_upper))
    throw InvalidParameter("damping bound must be >= 0");
  if (!(confidence > 0 && confidence < 1)) throw InvalidParameter("bound confidence must lie in (0, 1)");
}

std::string to_string(CollapseVariant v) {
  switch (v) {
    case CollapseVariant::sphere: return "sphere";
    case CollapseVariant::strong: return "strong";
    case CollapseVariant::single_particle: return "single";
  }
  return "?";
}

CollapseVariant parse_collapse_variant(const std::string& s) {
  if (s == "sphere") return CollapseVariant::sphere;
  if (s == "strong") return CollapseVariant::strong;
  if (s == "single" || s == "single_particle") return CollapseVariant::single_particle;
  throw InvalidParameter("unknown collapse variant '" + s + "'");
}

double chi(double m_a, double T, double L) {
  if (!positive(m_a) || !positive(T) || !positive(L)) throw InvalidParameter("chi needs m_a, T, L > 0");
  return c::hbar * c::hbar / (8.0 * m_a * c::k_B * T * L * L);
}

double dcsl_sphere_bracket(double y) {
  if (y < 0.5) {
    // sum_{k>=2} (-1)^k (k-1) y^k / (k+1)!
    double term = y * y / 6.0;  // k = 2 without the (k-1) factor
    double sum = 0.0;
    for (int k = 2; k < 40; ++k) {
      double t = (k - 1) * term;
      sum += (k % 2 == 0) ? t : -t;
      if (std::abs(t) < 1e-18 * std::abs(sum)) break;
      term *= y / (k + 2);
    }
    return sum;
  }
  return 1.0 - 2.0 / y + std::exp(-y) * (1.0 + 2.0 / y);
}

double ddp_sphere_bracket(double x) {
  const double x2 = x * x;
  if (x < 0.5) {
    // sum_{j>=3} c_j x^{2j},
    // c_j = (-1)^j [2/((j-2)!(2j-3)) - 1/(j-1)! - 2/j!]
    double sum = 0.0;
    double fj2 = 1.0;  // (j-2)!
    double p = x2 * x2 * x2;
    for (int j = 3; j < 40; ++j) {
      fj2 *= (j - 2);
      double fj1 = fj2 * (j - 1), fj = fj1 * j;
      double cj = 2.0 / (fj2 * (2 * j - 3)) - 1.0 / fj1 - 2.0 / fj;
      double t = cj * p;
      sum += (j % 2 == 0) ? t : -t;
      if (std::abs(t) < 1e-18 * std::abs(sum)) break;
      p *= x2;
    }
    return sum;
  }
  double e = std::exp(-x2);
  return sqrt_pi * x2 * x * std::erf(x) + x2 * (e - 3.0) + 2.0 * (1.0 - e);
}

// --- dCSL --------------------------------------------------------------------

double eta_csl_sphere(const ParticleSpec& p, double lambda, double r_C) {
  double y = p.radius * p.radius / (r_C * r_C);
  double r4 = std::pow(p.radius, 4);
  return 3.0 * lambda * r_C * r_C * p.mass * p.mass / (r4 * c::m0 * c::m0) * dcsl_sphere_bracket(y);
}

double eta_dcsl_sphere(const ParticleSpec& p, const DcslParams& d) {
  d.validate();
  double x = chi(p.avg_nucleus_mass, d.T, d.r_C);
  double L = d.r_C * (1.0 + x);
  // equals the standard strength at length L divided by (1 + chi)^3
  return eta_csl_sphere(p, d.lambda, L) * (d.r_C * d.r_C) / (L * L) / (1.0 + x);
}

StrongDissipation eta_dcsl_strong(const ParticleSpec& p, const DcslParams& d) {
  d.validate();
  double x = chi(p.avg_nucleus_mass, d.T, d.r_C);
  double L = d.r_C * (1.0 + x);
  double a3 = std::pow(p.lattice_constant, 3);
  StrongDissipation s;
  s.eta = p.mass * p.avg_nucleus_mass * d.lambda * d.r_C / (2.0 * a3 * c::m0 * c::m0 * (1.0 + x) * (1.0 + x)) *
          std::min(1.0, std::pow(p.radius / L, 3));
  s.in_regime = p.lattice_constant < L / 10.0;
  return s;
}

double eta_dcsl_single(const ParticleSpec& p, const DcslParams& d) {
  d.validate();
  double x = chi(p.mass, d.T, d.r_C);
  return d.lambda * p.mass * p.mass / (2.0 * c::m0 * c::m0 * d.r_C * d.r_C * std::pow(1.0 + x, 5));
}

double gamma_dcsl(const ParticleSpec& p, const DcslParams& d, CollapseVariant v) {
  double eta = 0, m_a = p.avg_nucleus_mass;
  switch (v) {
    case CollapseVariant::sphere: eta = eta_dcsl_sphere(p, d); break;
    case CollapseVariant::strong: eta = eta_dcsl_strong(p, d).eta; break;
    case CollapseVariant::single_particle:
      eta = eta_dcsl_single(p, d);
      m_a = p.mass;
      break;
  }
  double x = chi(m_a, d.T, d.r_C);
  return eta * 4.0 * d.r_C * d.r_C * x * (1.0 + x) * m_a / p.mass;
}

double s_dcsl_psd(double omega, const ParticleSpec& p, const DcslParams& d, double gamma_gas) {
  if (!(gamma_gas >= 0)) throw InvalidParameter("gas damping must be >= 0");
  double eta = eta_dcsl_sphere(p, d);
  double g = gamma_dcsl(p, d, CollapseVariant::sphere);
  double kappa = g / (2.0 * c::hbar * eta);
  double gt = gamma_gas + g;
  return c::hbar * c::hbar * eta * (1.0 + kappa * kappa * p.mass * p.mass * (gt * gt + omega * omega));
}

// --- dDP ---------------------------------------------------------------------

double eta_dp_sphere(const ParticleSpec& p, double R0) {
  if (!positive(R0)) throw InvalidParameter("R0 must be > 0");
  double x = p.radius / R0;
  // G m^2 / (sqrt(pi) hbar) * g(x) / (x^6 L^3), with L = R0 here
  return c::G * p.mass * p.mass / (sqrt_pi * c::hbar) * ddp_sphere_bracket(x) / (std::pow(x, 6) * std::pow(R0, 3));
}

double eta_ddp_sphere(const ParticleSpec& p, const DdpParams& d) {
  d.validate();
  double x0 = chi(p.avg_nucleus_mass, d.T, d.R0);
  return eta_dp_sphere(p, d.R0 * (1.0 + x0));
}

StrongDissipation eta_ddp_strong(const ParticleSpec& p, const DdpParams& d) {
  d.validate();
  double x0 = chi(p.avg_nucleus_mass, d.T, d.R0);
  double L = d.R0 * (1.0 + x0);
  StrongDissipation s;
  s.eta = c::G * p.mass * p.avg_nucleus_mass / (6.0 * sqrt_pi * std::pow(p.lattice_constant, 3) * c::hbar) *
          std::min(1.0, std::pow(p.radius / L, 3));
  s.in_regime = p.lattice_constant < L / 10.0;
  return s;
}

double eta_ddp_single(const ParticleSpec& p, const DdpParams& d) {
  d.validate();
  double x0 = chi(p.mass, d.T, d.R0);
  return c::G * p.mass * p.mass / (6.0 * sqrt_pi * c::hbar * std::pow(d.R0 * (1.0 + x0), 3));
}

double gamma_ddp(const ParticleSpec& p, const DdpParams& d, CollapseVariant v) {
  double eta = 0, m_a = p.avg_nucleus_mass;
  switch (v) {
    case CollapseVariant::sphere: eta = eta_ddp_sphere(p, d); break;
    case CollapseVariant::strong: eta = eta_ddp_strong(p, d).eta; break;
    case CollapseVariant::single_particle:
      eta = eta_ddp_single(p, d);
      m_a = p.mass;
      break;
  }
  double x0 = chi(m_a, d.T, d.R0);
  return eta * 4.0 * d.R0 * d.R0 * x0 * (1.0 + x0) * m_a / p.mass;
}

// --- exclusion maps ------------------------------------------------------------

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  if (!positive(lo) || !positive(hi) || !(hi > lo) || n < 2)
    throw InvalidParameter("log_space needs 0 < lo < hi and n >= 2");
  std::vector<double> v(n);
  double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  v.front() = lo;
  v.back() = hi;
  return v;
}

std::size_t ExclusionGrid::excluded_count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), Cell::excluded));
}

BoundaryPoint ExclusionGrid::boundary_minimum() const {
  if (boundary.empty()) throw NumericalFailure("exclusion grid has no boundary");
  return *std::min_element(boundary.begin(), boundary.end(),
                           [](const BoundaryPoint& a, const BoundaryPoint& b) { return a.axis2 < b.axis2; });
}

namespace {

void check_axis(const GridAxis& a) {
  if (a.values.size() < 2) throw InvalidParameter("grid axis '" + a.name + "' needs >= 2 points");
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    if (!positive(a.values[i])) throw InvalidParameter("grid axis '" + a.name + "' must be positive");
    if (i > 0 && !(a.values[i] > a.values[i - 1]))
      throw InvalidParameter("grid axis '" + a.name + "' must be increasing");
  }
}

// Crossing of log(g) through log(bound) between two samples, in log(axis).
double crossing(double a0, double a1, double g0, double g1, double bound) {
  double l0 = std::log(g0 / bound), l1 = std::log(g1 / bound);
  double t = l0 / (l0 - l1);
  return std::exp(std::log(a0) + t * (std::log(a1) - std::log(a0)));
}

}  // namespace

ExclusionGrid exclusion_map(const CollapseRate& rate, GridAxis axis1, GridAxis axis2,
                            const MeasuredBound& bound) {
  bound.validate();
  check_axis(axis1);
  check_axis(axis2);
  const std::size_t n1 = axis1.values.size(), n2 = axis2.values.size();
  ExclusionGrid g;
  g.axis1 = std::move(axis1);
  g.axis2 = std::move(axis2);
  g.gamma_hz.assign(n1 * n2, 0.0);
  g.cells.assign(n1 * n2, Cell::allowed);
  std::vector<std::vector<BoundaryPoint>> per_col(n1);
  std::mutex fail_mu;

  parallel_for(n1, [&](std::size_t i) {
    const double a1 = g.axis1.values[i];
    for (std::size_t j = 0; j < n2; ++j) {
      std::size_t k = i * n2 + j;
      double gh = std::numeric_limits<double>::quiet_NaN();
      try {
        gh = rate(a1, g.axis2.values[j]) / c::two_pi;
      } catch (const std::exception& e) {
        std::lock_guard lk(fail_mu);
        if (g.failures.size() < 10) g.failures.push_back(e.what());
      }
      g.gamma_hz[k] = gh;
      if (!std::isfinite(gh) || gh < 0) g.cells[k] = Cell::indeterminate;
      else g.cells[k] = gh > bound.gamma_cm_upper ? Cell::excluded : Cell::allowed;
    }
    if (!(bound.gamma_cm_upper > 0)) return;
    for (std::size_t j = 1; j < n2; ++j) {
      std::size_t k0 = i * n2 + j - 1, k1 = k0 + 1;
      if (g.cells[k0] == Cell::indeterminate || g.cells[k1] == Cell::indeterminate) continue;
      if (g.cells[k0] == g.cells[k1]) continue;
      double g0 = g.gamma_hz[k0], g1 = g.gamma_hz[k1];
      double at = (g0 > 0 && g1 > 0)
                      ? crossing(g.axis2.values[j - 1], g.axis2.values[j], g0, g1, bound.gamma_cm_upper)
                      : g.axis2.values[j];
      per_col[i].push_back({a1, at});
    }
  });
  for (auto& col : per_col) g.boundary.insert(g.boundary.end(), col.begin(), col.end());
  g.indeterminate = static_cast<std::size_t>(std::count(g.cells.begin(), g.cells.end(), Cell::indeterminate));
  return g;
}

ExclusionGrid dcsl_exclusion(const ParticleSpec& p, double T, const MeasuredBound& bound, GridAxis r_C,
                             GridAxis lambda, CollapseVariant v) {
  if (r_C.name.empty()) r_C.name = "r_C";
  if (lambda.name.empty()) lambda.name = "lambda";
  return exclusion_map([&](double rc, double lam) { return gamma_dcsl(p, {lam, rc, T}, v); },
                       std::move(r_C), std::move(lambda), bound);
}

ExclusionGrid ddp_exclusion(const ParticleSpec& p, const MeasuredBound& bound, GridAxis R0, GridAxis T,
                            CollapseVariant v) {
  if (R0.name.empty()) R0.name = "R0";
  if (T.name.empty()) T.name = "T";
  return exclusion_map([&](double r0, double t) { return gamma_ddp(p, {r0, t}, v); }, std::move(R0),
                       std::move(T), bound);
}

std::vector<Interval> exclusion_intervals(const std::function<double(double)>& rate,
                                          const std::vector<double>& axis, const MeasuredBound& bound) {
  bound.validate();
  check_axis({"scan", axis});
  std::vector<double> g(axis.size());
  for (std::size_t i = 0; i < axis.size(); ++i) g[i] = rate(axis[i]) / c::two_pi;
  std::vector<Interval> out;
  const double b = bound.gamma_cm_upper;
  auto ex = [&](std::size_t i) { return std::isfinite(g[i]) && g[i] > b; };
  std::size_t i = 0;
  while (i < axis.size()) {
    if (!ex(i)) {
      ++i;
      continue;
    }
    Interval iv;
    if (i == 0) {
      iv.lo = axis.front();
      iv.lo_at_edge = true;
    } else {
      iv.lo = b > 0 && g[i - 1] > 0 ? crossing(axis[i - 1], axis[i], g[i - 1], g[i], b) : axis[i];
    }
    std::size_t j = i;
    while (j + 1 < axis.size() && ex(j + 1)) ++j;
    if (j + 1 == axis.size()) {
      iv.hi = axis.back();
      iv.hi_at_edge = true;
    } else {
      iv.hi = b > 0 && g[j + 1] > 0 ? crossing(axis[j], axis[j + 1], g[j], g[j + 1], b) : axis[j];
    }
    out.push_back(iv);
    i = j + 1;
  }
  return out;
}

bool exclusion_contains(const ExclusionGrid& outer, const ExclusionGrid& inner) {
  if (outer.axis1.values != inner.axis1.values || outer.axis2.values != inner.axis2.values)
    throw InvalidParameter("exclusion grids differ in their axes");
  for (std::size_t k = 0; k < inner.cells.size(); ++k)
    if (inner.cells[k] == Cell::excluded && outer.cells[k] != Cell::excluded) return false;
  return true;
}

}  // namespace levnano
