#include "levnano/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "detail.hpp"
#include "levnano/collapse.hpp"
#include "levnano/constants.hpp"
#include "levnano/demod.hpp"
#include "levnano/errors.hpp"
#include "levnano/parallel.hpp"
#include "levnano/psd.hpp"
#include "levnano/simulate.hpp"
#include "levnano/stats.hpp"
#include "levnano/timeseries_io.hpp"

namespace levnano {

namespace c = constants;
namespace fs = std::filesystem;
using detail::fmt;

namespace {

class Stopwatch {
 public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

// Collects output files so every one of them lands in the manifest.
class Run {
 public:
  Run(const RunConfig& cfg, const char* command) : cfg_(cfg) {
    res_.out_dir = cfg.out;
    res_.manifest.command = command;
    res_.manifest.tool_version = tool_version();
    res_.manifest.seed = cfg.seed;
    res_.manifest.config_hash = sha256_hex(cfg.canonical());
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out.string() + "': " + ec.message());
    text("config.ini", cfg.canonical());
  }

  fs::path path(const std::string& name) const { return res_.out_dir / name; }
  void added(const std::string& name) { res_.manifest.add_output(res_.out_dir, name); }
  void text(const std::string& name, const std::string& body) {
    write_file(path(name), body);
    added(name);
  }
  void warn(const std::string& w) {
    res_.warnings.push_back(w);
    res_.manifest.warnings.push_back(w);
  }
  void time(const std::string& stage, const Stopwatch& sw) { res_.manifest.timings.push_back({stage, sw.seconds()}); }
  void input(const fs::path& p) { res_.manifest.add_input(p); }

  RunResult finish() {
    res_.manifest.write(res_.out_dir / "manifest.json");
    return std::move(res_);
  }

 private:
  const RunConfig& cfg_;
  RunResult res_;
};

std::string hdr(const std::string& k, const std::string& v) { return "# " + k + " = " + v; }
std::string hdr(const std::string& k, double v) { return hdr(k, fmt(v)); }

std::size_t pick_segment(double segment_s, double rate, std::size_t n, std::size_t fallback_div) {
  std::size_t N = segment_s > 0 ? static_cast<std::size_t>(std::llround(segment_s * rate)) : n / fallback_div;
  N = nice_fft_size(std::min(N, n));
  if (N < 16) throw InvalidParameter("record too short for spectral analysis (" + std::to_string(n) + " samples)");
  return N;
}

std::vector<std::string> lorentz_header(const LorentzFit& f) {
  std::vector<std::string> h = {
      hdr("model", "S(f) = 16 A / (gamma ((2 pi f)^2 + gamma^2))"),
      hdr("gamma_hz", f.gamma_hz),
      hdr("gamma_hz_err", f.gamma_hz_err),
      hdr("amplitude_A", f.amplitude),
      hdr("amplitude_A_err", f.amplitude_err),
      hdr("quadrature_variance_m2", f.quadrature_variance()),
      hdr("reduced_chi2", f.reduced_chi2),
      hdr("fit_window_hz", fmt(f.f_min) + " " + fmt(f.f_max)),
      hdr("window_aware", f.window_aware ? "true" : "false"),
      hdr("error_method", f.jackknife_groups ? "jackknife over " + std::to_string(f.jackknife_groups) + " segment groups"
                                             : std::string("fit curvature")),
      hdr("unreliable", f.unreliable ? "true" : "false")};
  for (const auto& w : f.warnings) h.push_back(hdr("warning", w));
  return h;
}

std::vector<std::string> displacement_header(const DisplacementFit& f) {
  std::vector<std::string> h = {
      hdr("model", "S(f) = 2 S_F / m^2 / ((w0^2 - w^2)^2 + gamma^2 w^2) + floor"),
      hdr("f0_hz", f.omega0 / c::two_pi),
      hdr("f0_hz_err", f.omega0_err / c::two_pi),
      hdr("gamma_hz", f.gamma_hz),
      hdr("gamma_hz_err", f.gamma_hz_err),
      hdr("force_psd", f.force_psd),
      hdr("force_psd_err", f.force_psd_err),
      hdr("floor", f.floor),
      hdr("temperature_k", f.temperature),
      hdr("temperature_k_err", f.temperature_err),
      hdr("reduced_chi2", f.reduced_chi2),
      hdr("fit_window_hz", fmt(f.f_min) + " " + fmt(f.f_max)),
      hdr("unreliable", f.unreliable ? "true" : "false")};
  for (const auto& w : f.warnings) h.push_back(hdr("warning", w));
  return h;
}

std::string rayleigh_csv(const RayleighStats& st) {
  std::string s = hdr("sigma_from_mean", st.sigma_from_mean) + "\n" + hdr("sigma_from_var", st.sigma_from_var) + "\n" +
                  hdr("relative_difference", st.relative_difference) + "\n" +
                  hdr("effective_samples", st.effective_samples) + "\n";
  if (st.low_sample_warning) s += hdr("warning", "fewer than 30 independent samples") + "\n";
  s += "r,density,model\n";
  for (std::size_t k = 0; k < st.bin_centers.size(); ++k)
    s += fmt(st.bin_centers[k]) + "," + fmt(st.density[k]) + "," + fmt(st.model_density[k]) + "\n";
  return s;
}

Axis axis_from_label(const std::string& label) {
  if (label.size() == 1) {
    try {
      return parse_axis(label[0]);
    } catch (const InvalidParameter&) {
    }
  }
  return Axis::x;
}

struct QuadAnalysis {
  LorentzFit fit;
  TemperatureEstimate temp;
  RayleighStats rayleigh;
};

// demod: the lock-in settings when the quadratures were produced here.
QuadAnalysis analyze_quadratures(Run& run, const RunConfig& cfg, const QuadratureSeries& q, double omega0,
                                 const std::string& stem, const LockinConfig* demod = nullptr,
                                 double demod_rate = 0.0) {
  Amplitude amp = amplitude(q);
  std::vector<double> r2 = cfg.fit.block > 1 ? block_average(amp.R2, cfg.fit.block) : amp.R2;
  double rate = q.sample_rate / static_cast<double>(cfg.fit.block);
  std::size_t N = pick_segment(cfg.fit.segment_s, rate, r2.size(), 8);
  PsdEstimate psd = welch_psd(r2, rate, N, cfg.fit.overlap, MeanRemoval::global);

  R2FitOptions fo;
  fo.window = {cfg.fit.f_min_hz, cfg.fit.f_max_hz};
  fo.window_aware = cfg.fit.window_aware;
  fo.weights = cfg.fit.weights;
  if (demod) fo.response = r2_response(*demod, demod_rate);
  if (cfg.fit.block > 1) fo.averaging_time = static_cast<double>(cfg.fit.block) / q.sample_rate;
  QuadAnalysis a;
  a.fit = fit_r2_psd(psd, fo);
  for (const auto& w : a.fit.warnings) run.warn(stem + ": R^2 fit: " + w);

  a.temp = effective_temperature(q, cfg.particle_spec().mass, omega0);
  a.rayleigh = rayleigh_stats(amp.R, q.duration() * a.fit.gamma / 2.0);
  if (a.rayleigh.low_sample_warning) run.warn(stem + ": fewer than 30 independent Rayleigh samples");

  auto h = lorentz_header(a.fit);
  h.insert(h.begin(), hdr("segments", std::to_string(psd.segment_count)));
  h.insert(h.begin(), hdr("input", stem));
  write_psd_csv(run.path("psd_r2_" + stem + ".csv"), psd, [&](double f) { return a.fit.model(f); }, h,
                a.fit.f_min, a.fit.f_max);
  run.added("psd_r2_" + stem + ".csv");
  run.text("rayleigh_" + stem + ".csv", rayleigh_csv(a.rayleigh));
  return a;
}

std::string bounds_block(const RunConfig& cfg, const ParticleSpec& p, const std::string& model, const std::string& variant,
                         const std::string& grid) {
  std::string s;
  s += "model = " + model + "\n";
  s += "variant = " + variant + "\n";
  s += "particle.radius_m = " + fmt(p.radius) + "\n";
  s += "particle.mass_kg = " + fmt(p.mass) + "\n";
  s += "particle.nucleus_mass_kg = " + fmt(p.avg_nucleus_mass) + "\n";
  s += "particle.lattice_constant_m = " + fmt(p.lattice_constant) + "\n";
  s += "bound.gamma_cm_hz = " + fmt(cfg.bounds.gamma_cm_hz) + "\n";
  s += "bound.confidence = " + fmt(cfg.bounds.confidence) + "\n";
  s += "grid = " + grid + "\n";
  return s;
}

std::string grid_csv(const ExclusionGrid& g, const std::string& n1, const std::string& n2) {
  std::string s = n1 + "," + n2 + ",gamma_hz,excluded\n";
  s.reserve(g.cells.size() * 80);
  const std::size_t n2s = g.axis2.values.size();
  for (std::size_t i = 0; i < g.axis1.values.size(); ++i)
    for (std::size_t j = 0; j < n2s; ++j)
      s += fmt(g.axis1.values[i]) + "," + fmt(g.axis2.values[j]) + "," + fmt(g.gamma(i, j)) + "," +
           std::to_string(static_cast<int>(g.cell(i, j))) + "\n";
  return s;
}

std::string boundary_csv(const ExclusionGrid& g, const std::string& n1, const std::string& n2) {
  std::string s = n1 + "," + n2 + "\n";
  for (const auto& b : g.boundary) s += fmt(b.axis1) + "," + fmt(b.axis2) + "\n";
  return s;
}

struct BoundsOutcome {
  std::optional<BoundaryPoint> dcsl_min;
  std::vector<Interval> ddp_scan;
};

BoundsOutcome write_bounds(Run& run, const RunConfig& cfg, const std::string& prefix) {
  const ParticleSpec p = cfg.particle_spec();
  const MeasuredBound bound{cfg.bounds.gamma_cm_hz, cfg.bounds.confidence};
  const std::size_t n = cfg.bounds.grid;
  BoundsOutcome out;
  std::string summary;
  for (const auto& model : cfg.bounds.models) {
    Stopwatch sw;
    if (model == "dcsl") {
      auto g = dcsl_exclusion(p, cfg.bounds.dcsl_T, bound, {"r_C", log_space(cfg.bounds.rc_min, cfg.bounds.rc_max, n)},
                              {"lambda", log_space(cfg.bounds.lambda_min, cfg.bounds.lambda_max, n)},
                              cfg.bounds.dcsl_variant);
      run.text(prefix + "dcsl_grid.csv", grid_csv(g, "r_C_m", "lambda_per_s"));
      run.text(prefix + "dcsl_boundary.csv", boundary_csv(g, "r_C_m", "lambda_per_s"));
      summary += "[dcsl]\n";
      summary += bounds_block(cfg, p, "dcsl", to_string(cfg.bounds.dcsl_variant),
                              std::to_string(n) + "x" + std::to_string(n) + " log r_C [" + fmt(cfg.bounds.rc_min) + ", " +
                                  fmt(cfg.bounds.rc_max) + "] x lambda [" + fmt(cfg.bounds.lambda_min) + ", " +
                                  fmt(cfg.bounds.lambda_max) + "], T = " + fmt(cfg.bounds.dcsl_T));
      summary += "excluded_cells = " + std::to_string(g.excluded_count()) + "\n";
      summary += "indeterminate_cells = " + std::to_string(g.indeterminate) + "\n";
      if (!g.boundary.empty()) {
        auto b = g.boundary_minimum();
        out.dcsl_min = b;
        summary += "boundary_min.r_C_m = " + fmt(b.axis1) + "\n";
        summary += "boundary_min.lambda_per_s = " + fmt(b.axis2) + "\n";
      }
      if (g.indeterminate) run.warn("dcsl: " + std::to_string(g.indeterminate) + " indeterminate cells");
      run.time("bounds_dcsl", sw);
    } else if (model == "ddp") {
      auto R0 = log_space(cfg.bounds.R0_min, cfg.bounds.R0_max, n);
      auto g = ddp_exclusion(p, bound, {"R0", R0}, {"T", log_space(cfg.bounds.ddp_T_min, cfg.bounds.ddp_T_max, n)},
                             cfg.bounds.ddp_variant);
      run.text(prefix + "ddp_grid.csv", grid_csv(g, "R0_m", "T_K"));
      run.text(prefix + "ddp_boundary.csv", boundary_csv(g, "R0_m", "T_K"));
      const double Ts = cfg.bounds.ddp_T_scan;
      const auto v = cfg.bounds.ddp_variant;
      out.ddp_scan = exclusion_intervals([&](double r0) { return gamma_ddp(p, {r0, Ts}, v); }, R0, bound);
      std::string scan = "T_K,R0_lo_m,R0_hi_m,lo_at_grid_edge,hi_at_grid_edge\n";
      for (const auto& iv : out.ddp_scan)
        scan += fmt(Ts) + "," + fmt(iv.lo) + "," + fmt(iv.hi) + "," + (iv.lo_at_edge ? "1" : "0") + "," +
                (iv.hi_at_edge ? "1" : "0") + "\n";
      run.text(prefix + "ddp_scan.csv", scan);
      summary += "[ddp]\n";
      summary += bounds_block(cfg, p, "ddp", to_string(v),
                              std::to_string(n) + "x" + std::to_string(n) + " log R0 [" + fmt(cfg.bounds.R0_min) + ", " +
                                  fmt(cfg.bounds.R0_max) + "] x T [" + fmt(cfg.bounds.ddp_T_min) + ", " +
                                  fmt(cfg.bounds.ddp_T_max) + "]");
      summary += "excluded_cells = " + std::to_string(g.excluded_count()) + "\n";
      summary += "indeterminate_cells = " + std::to_string(g.indeterminate) + "\n";
      for (const auto& iv : out.ddp_scan)
        summary += "scan_T" + fmt(Ts) + ".excluded_R0_m = " + fmt(iv.lo) + " .. " + fmt(iv.hi) + "\n";
      if (g.indeterminate) run.warn("ddp: " + std::to_string(g.indeterminate) + " indeterminate cells");
      run.time("bounds_ddp", sw);
    }
  }
  run.text(prefix + "summary.txt", summary);
  return out;
}

struct SweepOutcome {
  std::vector<PressurePoint> points;
  LineFit fit;
};

void write_line(Run& run, const std::string& name, const std::vector<PressurePoint>& pts, const LineFit& L) {
  write_linefit_csv(run.path(name), pts, L);
  run.added(name);
}

std::string bound_csv(const LineFit& L) {
  std::string s = "gamma_exc_hz,gamma_exc_err_hz,ci_lo_hz,ci_hi_hz,upper_limit_hz,upper_limit_one_sided_hz,confidence,slope_hz_per_mbar,slope_err_hz_per_mbar,reduced_chi2\n";
  s += fmt(L.intercept) + "," + fmt(L.intercept_err) + "," + fmt(L.intercept_ci.first) + "," + fmt(L.intercept_ci.second) +
       "," + fmt(L.upper_limit()) + "," + fmt(L.upper_limit_one_sided()) + "," + fmt(L.confidence) + "," + fmt(L.slope) +
       "," + fmt(L.slope_err) + "," + fmt(L.reduced_chi2) + "\n";
  return s;
}

}  // namespace

// --- shared helpers --------------------------------------------------------------

std::size_t nice_fft_size(std::size_t n) {
  std::size_t best = 1;
  for (std::size_t a = 1; a <= n; a *= 2)
    for (std::size_t b = a; b <= n; b *= 3)
      for (std::size_t c5 = b; c5 <= n; c5 *= 5) best = std::max(best, c5);
  return best;
}

void write_psd_csv(const fs::path& path, const PsdEstimate& psd, const std::function<double(double)>& model,
                   const std::vector<std::string>& header, double f_min, double f_max) {
  std::string s;
  for (const auto& h : header) s += h + "\n";
  s += hdr("segment_length", std::to_string(psd.segment_length)) + "\n";
  s += hdr("enbw_hz", psd.enbw) + "\n";
  s += "frequency_hz,value,model,residual\n";
  for (std::size_t k = 0; k < psd.values.size(); ++k) {
    double f = psd.frequencies[k];
    bool in = model && f >= f_min && (f_max <= 0 || f <= f_max) && k > 0;
    double mv = in ? model(f) : std::nan("");
    s += fmt(f) + "," + fmt(psd.values[k]) + "," + (in ? fmt(mv) : "") + "," + (in ? fmt(psd.values[k] - mv) : "") + "\n";
  }
  write_file(path, s);
}

void write_linefit_csv(const fs::path& path, const std::vector<PressurePoint>& pts, const LineFit& L) {
  std::string s;
  s += hdr("model", "gamma = gamma_exc + k P") + "\n";
  s += hdr("gamma_exc_hz", L.intercept) + "\n" + hdr("gamma_exc_err_hz", L.intercept_err) + "\n";
  s += hdr("k_hz_per_mbar", L.slope) + "\n" + hdr("k_err_hz_per_mbar", L.slope_err) + "\n";
  s += hdr("reduced_chi2", L.reduced_chi2) + "\n" + hdr("confidence", L.confidence) + "\n";
  s += hdr("k_no_excess_hz_per_mbar", L.slope_no_excess) + "\n";
  s += "pressure_mbar,gamma_hz,sigma_hz,model_hz,residual_hz,band_lo_hz,band_hi_hz,model_no_excess_hz\n";
  for (const auto& p : pts) {
    auto [lo, hi] = L.band(p.pressure_mbar);
    s += fmt(p.pressure_mbar) + "," + fmt(p.gamma_hz) + "," + fmt(p.sigma_hz) + "," + fmt(L.value(p.pressure_mbar)) + "," +
         fmt(p.gamma_hz - L.value(p.pressure_mbar)) + "," + fmt(lo) + "," + fmt(hi) + "," +
         fmt(L.slope_no_excess * p.pressure_mbar) + "\n";
  }
  write_file(path, s);
}

// Relative linewidth error vs linewidth, log-log interpolated between the measured
// points and held constant outside them.
double reference_relative_error(double g) {
  static const double xs[] = {std::log(81e-6), std::log(7.5e-3), std::log(28.5e-3)};
  static const double ys[] = {std::log(23.0 / 81.0), std::log(0.5 / 7.5), std::log(0.7 / 28.5)};
  if (!(g > 0)) throw InvalidParameter("linewidth must be > 0");
  double x = std::log(g);
  if (x <= xs[0]) return std::exp(ys[0]);
  if (x >= xs[2]) return std::exp(ys[2]);
  int i = x < xs[1] ? 0 : 1;
  double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return std::exp(ys[i] + t * (ys[i + 1] - ys[i]));
}

std::vector<double> reference_sweep_pressures() { return {3e-7, 6e-7, 1e-6, 2e-6, 5e-6, 1e-5, 2e-5, 5e-5, 9e-5, 1e-4}; }

std::vector<PressurePoint> synthetic_sweep(const std::vector<double>& P, double k, double g_exc, RandomStream& rng) {
  std::vector<PressurePoint> pts;
  for (double p : P) {
    double g = g_exc + k * p;
    double s = reference_relative_error(g) * g;
    pts.push_back({p, g + s * rng.normal(), s});
  }
  return pts;
}

// --- subcommands ------------------------------------------------------------------

RunResult run_simulate(const RunConfig& cfg) {
  Run run(cfg, "simulate");
  Stopwatch sw;
  SimPlan plan = cfg.sim_plan();
  std::string summary = "axis,engine,omega0_rad_s,gamma_rad_s,force_psd,samples,sample_variance_m2\n";
  auto row = [&](const std::string& label, const AxisPlan& ax, std::size_t n, double var) {
    summary += label + "," + to_string(plan.engine) + "," + fmt(ax.omega0) + "," + fmt(ax.gamma) + "," +
               fmt(ax.force_psd) + "," + std::to_string(n) + "," + fmt(var) + "\n";
  };

  if (plan.engine == Engine::quadrature) {
    auto qs = simulate_quadrature(plan);
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const auto& q = qs[i];
      write_levt(run.path("quad_" + q.label + ".levt"), q);
      run.added("quad_" + q.label + ".levt");
      write_csv(run.path("quad_" + q.label + ".csv"), q);
      run.added("quad_" + q.label + ".csv");
      row(q.label, plan.axes[i], q.size(), 0.5 * (sample_variance(q.X) + sample_variance(q.Y)));
    }
  } else {
    std::vector<TimeSeries> series = plan.engine == Engine::secular
                                         ? simulate_secular(plan)
                                         : simulate_mathieu(plan, cfg.trap_config(), cfg.particle_spec());
    for (std::size_t i = 0; i < series.size(); ++i) {
      TimeSeries ts = std::move(series[i]);
      if (cfg.sim.camera_rate > 0) {
        MeasurementModel mm;
        mm.camera_rate = cfg.sim.camera_rate;
        if (cfg.sim.pixel_size > 0) mm.pixel_size = cfg.sim.pixel_size;
        ts = apply_measurement(ts, mm, cfg.seed);
      }
      write_levt(run.path("sim_" + ts.label + ".levt"), ts);
      run.added("sim_" + ts.label + ".levt");
      write_csv(run.path("sim_" + ts.label + ".csv"), ts);
      run.added("sim_" + ts.label + ".csv");
      AxisPlan ax = plan.axes[i];
      if (plan.engine == Engine::mathieu) ax.omega0 = std::stod(ts.metadata.at("omega0_rad_s"));
      row(ts.label, ax, ts.size(), sample_variance(ts.values));
    }
  }
  run.text("sim_summary.csv", summary);
  run.time("simulate", sw);
  return run.finish();
}

RunResult run_analyze(const RunConfig& cfg, const std::vector<fs::path>& inputs) {
  if (inputs.empty()) throw InvalidParameter("analyze needs at least one input file");
  Run run(cfg, "analyze");
  const double mass = cfg.particle_spec().mass;
  std::string summary =
      "input,axis,gamma_r2_hz,gamma_r2_err_hz,r2_reduced_chi2,r2_unreliable,gamma_disp_hz,gamma_disp_err_hz,f0_hz,"
      "T_disp_k,T_disp_err_k,T_eff_k,T_eff_err_k,sigma_from_mean_m,sigma_from_var_m,rayleigh_rel_diff\n";

  for (const auto& in : inputs) {
    Stopwatch sw;
    run.input(in);
    LevtRecord rec = read_levt(in);
    const std::string stem = in.stem().string();
    QuadratureSeries q;
    double omega0 = 0.0;
    std::optional<DisplacementFit> disp;
    std::optional<LockinConfig> used_lockin;
    double input_rate = 0.0;

    if (rec.channels.size() == 1) {
      TimeSeries ts = read_timeseries(in);
      std::size_t N = pick_segment(cfg.fit.segment_s, ts.sample_rate, ts.size(), 8);
      PsdEstimate psd = welch_psd(ts.values, ts.sample_rate, N, cfg.fit.overlap);
      double f_lo = cfg.lockin.f_lo_hz;
      if (!(f_lo > 0)) {
        auto it = std::max_element(psd.values.begin() + 2, psd.values.end());
        f_lo = psd.frequencies[static_cast<std::size_t>(it - psd.values.begin())];
      }
      try {
        DisplacementFitOptions dopt;
        dopt.weights = cfg.fit.weights;
        disp = fit_displacement_psd(psd, mass, dopt);
        for (const auto& w : disp->warnings) run.warn(stem + ": displacement fit: " + w);
        auto h = displacement_header(*disp);
        h.insert(h.begin(), hdr("input", stem));
        write_psd_csv(run.path("psd_disp_" + stem + ".csv"), psd, [&](double f) { return disp->model(f); }, h,
                      disp->f_min, disp->f_max);
      } catch (const NumericalFailure& e) {
        run.warn(stem + ": displacement fit failed: " + e.what());
        write_psd_csv(run.path("psd_disp_" + stem + ".csv"), psd, nullptr, {hdr("input", stem)});
      }
      run.added("psd_disp_" + stem + ".csv");

      LockinConfig lc;
      lc.f_lo = f_lo;
      lc.filter_order = cfg.lockin.order;
      lc.cutoff = cfg.lockin.cutoff_hz;
      lc.decimation = cfg.lockin.decimation;
      q = lockin(ts, lc);
      used_lockin = lc;
      input_rate = ts.sample_rate;
      omega0 = c::two_pi * f_lo;
      write_levt(run.path("quad_" + stem + ".levt"), q);
      run.added("quad_" + stem + ".levt");
      write_csv(run.path("quad_" + stem + ".csv"), q);
      run.added("quad_" + stem + ".csv");
    } else {
      q = read_quadratures(in);
      omega0 = q.f_lo > 0 ? c::two_pi * q.f_lo : cfg.omega0(axis_from_label(q.label));
    }

    QuadAnalysis a = analyze_quadratures(run, cfg, q, omega0, stem, used_lockin ? &*used_lockin : nullptr, input_rate);
    summary += stem + "," + q.label + "," + fmt(a.fit.gamma_hz) + "," + fmt(a.fit.gamma_hz_err) + "," +
               fmt(a.fit.reduced_chi2) + "," + (a.fit.unreliable ? "1" : "0") + ",";
    if (disp)
      summary += fmt(disp->gamma_hz) + "," + fmt(disp->gamma_hz_err) + "," + fmt(disp->omega0 / c::two_pi) + "," +
                 fmt(disp->temperature) + "," + fmt(disp->temperature_err) + ",";
    else
      summary += ",,,,,";
    summary += fmt(a.temp.temperature) + "," + fmt(a.temp.standard_error) + "," + fmt(a.rayleigh.sigma_from_mean) + "," +
               fmt(a.rayleigh.sigma_from_var) + "," + fmt(a.rayleigh.relative_difference) + "\n";
    run.time("analyze:" + stem, sw);
  }
  run.text("analyze_summary.csv", summary);
  return run.finish();
}

namespace {

SweepOutcome sweep_core(Run& run, const RunConfig& cfg, const std::string& prefix) {
  const auto& S = cfg.sweep;
  if (S.pressures_mbar.size() < 3) throw ConfigError("sweep needs at least 3 pressures");
  const ParticleSpec p = cfg.particle_spec();
  const std::size_t na = S.axes.size(), np = S.pressures_mbar.size();
  const std::size_t n = static_cast<std::size_t>(std::llround(S.duration * S.output_rate));
  const std::size_t N = nice_fft_size(2 * n / (S.segments + 1));
  if (N < 16) throw ConfigError("sweep records too short for the requested segment count");
  const double S_exc = cfg.excess_force_psd();

  std::vector<double> omega(na);
  for (std::size_t j = 0; j < na; ++j) omega[j] = cfg.omega0(S.axes[j]);

  std::vector<LorentzFit> fits(np * na);
  parallel_for(np * na, [&](std::size_t k) {
    std::size_t i = k / na, j = k % na;
    GasEnvironment gas = cfg.gas_environment();
    gas.pressure = c::mbar_to_pa(S.pressures_mbar[i]);
    AxisPlan ax;
    ax.axis = S.axes[j];
    ax.omega0 = omega[j];
    ax.gamma = gas_damping(p, gas) + c::two_pi * S.excess_gamma_hz;
    ax.force_psd = thermal_force_psd(gas.temperature, p.mass, ax.gamma) + S_exc;
    RandomStream rng = RandomStream(cfg.seed).substream("sweep").substream(i).substream(std::string(1, axis_name(ax.axis)));
    QuadratureGenerator gen(ax, p.mass, S.output_rate, rng);
    WelchAccumulator acc(N, 0.5, S.output_rate, MeanRemoval::global);
    double X, Y;
    for (std::size_t t = 0; t < n; ++t) {
      gen.next(X, Y);
      acc.push(X * X + Y * Y);
    }
    R2FitOptions fo;
    fo.window_aware = true;
    fo.weights = cfg.fit.weights;
    fits[k] = fit_r2_psd(acc.result(), fo);
  });

  SweepOutcome out;
  std::string table = "pressure_mbar";
  for (Axis a : S.axes) table += std::string(",gamma_") + axis_name(a) + "_hz,err_" + axis_name(a) + "_hz";
  table += ",gamma_hz,sigma_hz\n";
  for (std::size_t i = 0; i < np; ++i) {
    std::vector<std::pair<double, double>> v;
    table += fmt(S.pressures_mbar[i]);
    for (std::size_t j = 0; j < na; ++j) {
      const auto& f = fits[i * na + j];
      if (f.unreliable)
        run.warn("sweep P=" + fmt(S.pressures_mbar[i]) + " axis " + axis_name(S.axes[j]) + ": fit flagged unreliable");
      v.emplace_back(f.gamma_hz, f.gamma_hz_err);
      table += "," + fmt(f.gamma_hz) + "," + fmt(f.gamma_hz_err);
    }
    auto [g, s] = inverse_variance_mean(v);
    table += "," + fmt(g) + "," + fmt(s) + "\n";
    out.points.push_back({S.pressures_mbar[i], g, s});
  }
  out.fit = linewidth_vs_pressure(out.points, S.confidence);
  run.text(prefix + "linewidths.csv", table);
  write_line(run, prefix + "linefit.csv", out.points, out.fit);
  run.text(prefix + "bound.csv", bound_csv(out.fit));
  return out;
}

}  // namespace

RunResult run_sweep(const RunConfig& cfg) {
  Run run(cfg, "sweep");
  Stopwatch sw;
  sweep_core(run, cfg, "sweep_");
  run.time("sweep", sw);
  return run.finish();
}

RunResult run_bounds(const RunConfig& cfg) {
  Run run(cfg, "bounds");
  write_bounds(run, cfg, "bounds_");
  return run.finish();
}

RunResult reproduce_paper(const RunConfig& cfg) {
  Run run(cfg, "reproduce-paper");
  const ParticleSpec p = cfg.particle_spec();
  const TrapConfig trap = cfg.trap_config();
  const RandomStream root(cfg.seed);
  std::string summary = "quantity,value,unit\n";
  auto put = [&](const std::string& k, double v, const std::string& u) { summary += k + "," + fmt(v) + "," + u + "\n"; };

  // 1. trap and noise numbers
  {
    Stopwatch sw;
    auto mp = mathieu_params(trap, p);
    auto w = secular_frequencies(mp, trap.drive_angular_freq);
    put("mathieu_a_x", mp.a[0], "1");
    put("mathieu_a_z", mp.a[2], "1");
    put("mathieu_q_x", mp.q[0], "1");
    for (int i = 0; i < 3; ++i) put(std::string("secular_f_") + "xyz"[i], w[i] / c::two_pi, "Hz");
    auto g4 = gas_damping(p, GasEnvironment::nitrogen_mbar(1e-4));
    put("gas_gamma_1e-4mbar", g4 / c::two_pi, "Hz");
    NoiseBudget nb = noise_budget({{"excess", 1e-38}}, p, c::two_pi * 327.0, GasEnvironment::nitrogen_mbar(1e-7));
    put("thermal_force_psd_1e-7mbar", nb.thermal_force_psd_at(c::mbar_to_pa(1e-7)), "N^2/Hz");
    put("three_db_pressure", c::pa_to_mbar(nb.three_db_pressure), "mbar");
    put("excess_heating_rate", nb.entries.front().heating_rate, "1/s");
    put("T_eff_1e-6mbar", nb.effective_temperature(c::mbar_to_pa(1e-6)), "K");
    run.time("trap", sw);
  }

  // 2. equipartition on the displacement engine
  {
    Stopwatch sw;
    SimPlan plan;
    plan.engine = Engine::secular;
    plan.duration = 200.0;
    plan.output_rate = 2000.0;
    plan.mass = p.mass;
    plan.seed = root.substream("thermal").seed() ^ splitmix64(1);
    AxisPlan ax;
    ax.axis = Axis::x;
    ax.omega0 = cfg.omega0(Axis::x);
    ax.gamma = c::two_pi * 1.0;
    ax.force_psd = thermal_force_psd(293.0, p.mass, ax.gamma);
    plan.axes = {ax};
    auto ts = simulate_secular(plan).front();
    auto T = effective_temperature(ts, p.mass, ax.omega0);
    std::size_t N = nice_fft_size(static_cast<std::size_t>(20.0 * plan.output_rate));
    PsdEstimate psd = welch_psd(ts.values, plan.output_rate, N, 0.5);
    DisplacementFitOptions dopt;
    dopt.window = {ax.omega0 / c::two_pi - 20.0, ax.omega0 / c::two_pi + 20.0};
    auto df = fit_displacement_psd(psd, p.mass, dopt);
    write_psd_csv(run.path("paper_thermal_psd.csv"), psd, [&](double f) { return df.model(f); },
                  displacement_header(df), df.f_min, df.f_max);
    run.added("paper_thermal_psd.csv");
    put("thermal_T_eff", T.temperature, "K");
    put("thermal_T_eff_err", T.standard_error, "K");
    put("thermal_fit_gamma", df.gamma_hz, "Hz");
    put("thermal_fit_gamma_err", df.gamma_hz_err, "Hz");
    put("thermal_fit_T", df.temperature, "K");
    run.time("thermal", sw);
  }

  // 3. R^2 closure on the quadrature engine
  {
    Stopwatch sw;
    SimPlan plan;
    plan.engine = Engine::quadrature;
    plan.duration = 1e5;
    plan.output_rate = 1.0;
    plan.mass = p.mass;
    plan.seed = root.substream("closure").seed() ^ splitmix64(2);
    AxisPlan ax;
    ax.axis = Axis::x;
    ax.omega0 = cfg.omega0(Axis::x);
    ax.gamma = c::two_pi * 10e-3;
    ax.force_psd = thermal_force_psd(293.0, p.mass, ax.gamma);
    plan.axes = {ax};
    auto q = simulate_quadrature(plan).front();
    auto amp = amplitude(q);
    PsdEstimate psd = welch_psd(amp.R2, plan.output_rate, nice_fft_size(4096), 0.5);
    R2FitOptions fo;
    fo.window_aware = true;
    auto fit = fit_r2_psd(psd, fo);
    double s2 = mean(amp.R2) / 2.0;
    auto h = lorentz_header(fit);
    write_psd_csv(run.path("paper_r2_psd.csv"), psd, [&](double f) { return fit.model(f); }, h, fit.f_min, fit.f_max);
    run.added("paper_r2_psd.csv");
    auto ray = rayleigh_stats(amp.R, q.duration() * ax.gamma / 2.0);
    run.text("paper_rayleigh.csv", rayleigh_csv(ray));
    put("closure_gamma_true", 10e-3, "Hz");
    put("closure_gamma_fit", fit.gamma_hz, "Hz");
    put("closure_gamma_fit_err", fit.gamma_hz_err, "Hz");
    put("closure_total_power_ratio_data", psd.integrated_power() / (4.0 * s2 * s2), "1");
    put("closure_total_power_ratio_fit", r2_autocovariance(0.0, fit.gamma, fit.amplitude) / (4.0 * s2 * s2), "1");
    put("closure_rayleigh_rel_diff", ray.relative_difference, "1");
    run.time("closure", sw);
  }

  // 4. pressure sweep with reference-scale error bars
  {
    Stopwatch sw;
    RandomStream rng = root.substream("reference-sweep");
    auto pts = synthetic_sweep(reference_sweep_pressures(), reference_sweep_slope, 0.0, rng);
    auto L = linewidth_vs_pressure(pts, 0.95);
    write_line(run, "paper_sweep_linefit.csv", pts, L);
    run.text("paper_sweep_bound.csv", bound_csv(L));
    put("sweep_gamma_exc", L.intercept, "Hz");
    put("sweep_gamma_exc_err", L.intercept_err, "Hz");
    put("sweep_upper_limit", L.upper_limit(), "Hz");
    put("sweep_upper_limit_one_sided", L.upper_limit_one_sided(), "Hz");
    run.time("sweep", sw);
  }

  // 5. collapse-model bounds at the configured damping limit
  {
    RunConfig bc = cfg;
    bc.bounds.models = {"dcsl", "ddp"};
    auto b = write_bounds(run, bc, "paper_bounds_");
    if (b.dcsl_min) {
      put("dcsl_min_r_C", b.dcsl_min->axis1, "m");
      put("dcsl_min_lambda", b.dcsl_min->axis2, "1/s");
    }
    for (const auto& iv : b.ddp_scan) {
      put("ddp_scan_R0_lo", iv.lo, "m");
      put("ddp_scan_R0_hi", iv.hi, "m");
    }
  }

  run.text("paper_summary.csv", summary);
  return run.finish();
}

}  // namespace levnano
