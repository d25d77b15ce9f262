#include "doctest.h"

#include <string>

#include "levnano/config.hpp"
#include "levnano/constants.hpp"
#include "levnano/errors.hpp"

using namespace levnano;
namespace c = levnano::constants;

namespace {
const char* kConfig = R"(# thermal run
[run]
seed = 42
out = out/thermal

[sim]
engine = quadrature
duration = 1000   # s
output_rate = 2
axes = x, y
f0_x_hz = 150
gamma_hz = 0.01

[fit]
weights = data
)";

int error_line(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}
}  // namespace

TEST_CASE("config parses and applies overrides") {
  auto cfg = parse_config(kConfig);
  CHECK(cfg.seed == 42);
  CHECK(cfg.out == "out/thermal");
  CHECK(cfg.sim.engine == Engine::quadrature);
  CHECK(cfg.sim.axes.size() == 2);
  CHECK(cfg.omega0(Axis::x) == doctest::Approx(c::two_pi * 150.0));
  CHECK(cfg.omega0(Axis::y) / c::two_pi == doctest::Approx(154.56396235680206).epsilon(1e-12));
  CHECK(cfg.gamma() == doctest::Approx(c::two_pi * 0.01));
  CHECK(cfg.fit.weights == WeightScheme::data);
  auto plan = cfg.sim_plan();
  CHECK(plan.axes.size() == 2);
  CHECK(plan.seed == 42);
}

TEST_CASE("gas damping is the default linewidth") {
  auto cfg = parse_config("[gas]\npressure_mbar = 1e-4\n");
  CHECK(cfg.gamma() / c::two_pi == doctest::Approx(0.027921570286050207).epsilon(1e-12));
}

TEST_CASE("schema violations carry their line") {
  CHECK(error_line("[sim]\nduration = 10\nspeed = 3\n") == 3);
  CHECK(error_line("\n[simulation]\n") == 2);
  CHECK(error_line("[sim]\nduration = 10\nduration = 20\n") == 3);
  CHECK(error_line("[sim]\nduration = ten\n") == 2);
  CHECK(error_line("[sim]\nengine = magic\n") == 2);
  CHECK(error_line("key = 1\n") == 1);
  CHECK_THROWS_AS(parse_config("[sim]\nduration = -5\n"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.ini"), IoError);
}

TEST_CASE("canonical form round-trips") {
  auto cfg = parse_config(kConfig);
  auto text = cfg.canonical();
  CHECK(parse_config(text).canonical() == text);
  CHECK(parse_config("[run]\nseed = 1\n").canonical() != parse_config("[run]\nseed = 2\n").canonical());
  // comments and spacing do not change the canonical text
  CHECK(parse_config("[run]\nseed=42 # x\n").canonical() == parse_config("[run]\n  seed = 42\n").canonical());
}

TEST_CASE("untrapped axis surfaces by name") {
  auto cfg = parse_config("[trap]\ndc_voltage = -100\n[sim]\naxes = z\n");
  try {
    cfg.omega0(Axis::z);
    FAIL("expected UntrappedAxis");
  } catch (const UntrappedAxis& e) {
    CHECK(e.axis() == 'z');
  }
}
