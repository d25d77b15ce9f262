#include <benchmark/benchmark.h>

#include <vector>

#include "levnano/constants.hpp"
#include "levnano/demod.hpp"
#include "levnano/psd.hpp"
#include "levnano/rng.hpp"
#include "levnano/simulate.hpp"
#include "levnano/trap.hpp"

using namespace levnano;
namespace c = levnano::constants;

namespace {

constexpr double kMass = 9.6e-17;

AxisPlan axis(double f0, double gamma_hz) {
  AxisPlan ax;
  ax.omega0 = c::two_pi * f0;
  ax.gamma = c::two_pi * gamma_hz;
  ax.force_psd = thermal_force_psd(293.0, kMass, ax.gamma);
  return ax;
}

std::vector<double> noise(std::size_t n) {
  RandomStream rng(7);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

}  // namespace

static void BM_Lockin(benchmark::State& state) {
  const auto x = noise(1 << 20);
  LockinConfig lc;
  lc.f_lo = 150.0;
  lc.cutoff = 5.0;
  lc.decimation = 20;
  for (auto _ : state) {
    Lockin li(lc, 1000.0);
    double X = 0, Y = 0;
    for (double u : x) li.push(u, X, Y);
    benchmark::DoNotOptimize(X);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_Lockin)->Unit(benchmark::kMillisecond);

static void BM_WelchStreaming(benchmark::State& state) {
  const auto x = noise(1 << 21);
  const auto N = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    WelchAccumulator w(N, 0.5, 1000.0);
    w.push(x.data(), x.size());
    benchmark::DoNotOptimize(w.result());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.size()));
}
BENCHMARK(BM_WelchStreaming)->Arg(4000)->Arg(65536)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_QuadratureEngine(benchmark::State& state) {
  QuadratureGenerator gen(axis(150.0, 0.01), kMass, 1.0, RandomStream(3));
  double X = 0, Y = 0;
  for (auto _ : state) {
    gen.next(X, Y);
    benchmark::DoNotOptimize(X);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QuadratureEngine);

static void BM_CarrierSynthesizer(benchmark::State& state) {
  AxisPlan ax = axis(300.0, 5e-3);
  ax.drift.shape = DriftShape::sinusoidal;
  ax.drift.mod_amplitude = c::two_pi * 12.5;
  ax.drift.mod_period = 3600.0;
  CarrierSynthesizer syn(ax, kMass, 1000.0, RandomStream(4));
  for (auto _ : state) benchmark::DoNotOptimize(syn.next());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CarrierSynthesizer);

BENCHMARK_MAIN();
