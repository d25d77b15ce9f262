// levnano: simulate, analyze and bound narrow-linewidth levitated oscillators.
//
//   levnano simulate        --config run.ini [--seed N] [--out DIR]
//   levnano analyze         --config run.ini --input rec.levt [--input ...]
//   levnano sweep           --config run.ini
//   levnano bounds          --config run.ini
//   levnano reproduce-paper [--config run.ini]
//
// Exit codes: 0 ok (warnings allowed), 2 config error, 3 numerical failure, 4 I/O error.

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "levnano/config.hpp"
#include "levnano/errors.hpp"
#include "levnano/pipeline.hpp"

namespace fs = std::filesystem;
using namespace levnano;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("-c,--config", c.config, "INI run configuration");
  if (config_required) opt->required();
  sub->add_option("--seed", c.seed, "override run.seed");
  sub->add_option("-o,--out", c.out, "override run.out (output directory)");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? parse_config("") : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.out = c.out;
  return cfg;
}

void report(const RunResult& r) {
  for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("%s: %zu files written to %s\n", r.manifest.command.c_str(), r.manifest.outputs.size(),
              r.out_dir.string().c_str());
}

int fail(int code, const char* kind, const std::exception& e) {
  std::fprintf(stderr, "levnano: %s: %s\n", kind, e.what());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levnano - levitated nanoparticle linewidth and collapse-model bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  Common c;
  std::vector<std::string> inputs;
  auto* sim = app.add_subcommand("simulate", "generate displacement or quadrature records");
  add_common(sim, c, true);
  auto* ana = app.add_subcommand("analyze", "lock-in, spectra and linewidth fits of recorded data");
  add_common(ana, c, true);
  ana->add_option("-i,--input", inputs, "LEVT input file (repeatable)")->required()->check(CLI::ExistingFile);
  auto* swp = app.add_subcommand("sweep", "linewidth vs pressure and excess-damping bound");
  add_common(swp, c, true);
  auto* bnd = app.add_subcommand("bounds", "dCSL / dDP exclusion regions");
  add_common(bnd, c, true);
  auto* rep = app.add_subcommand("reproduce-paper", "deterministic end-to-end reproduction chain");
  add_common(rep, c, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = resolve(c);
    RunResult r;
    if (*sim) r = run_simulate(cfg);
    else if (*ana) r = run_analyze(cfg, std::vector<fs::path>(inputs.begin(), inputs.end()));
    else if (*swp) r = run_sweep(cfg);
    else if (*bnd) r = run_bounds(cfg);
    else r = reproduce_paper(cfg);
    report(r);
    return 0;
  } catch (const ConfigError& e) {
    return fail(2, "config error", e);
  } catch (const InvalidParameter& e) {
    return fail(2, "invalid parameter", e);
  } catch (const UntrappedAxis& e) {
    return fail(3, (std::string("axis ") + e.axis() + " untrapped").c_str(), e);
  } catch (const NumericalFailure& e) {
    return fail(3, "numerical failure", e);
  } catch (const IoError& e) {
    return fail(4, "I/O error", e);
  } catch (const std::exception& e) {
    return fail(4, "error", e);
  }
}
