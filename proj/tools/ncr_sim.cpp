#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ncrsim/antenna.hpp"
#include "ncrsim/config.hpp"
#include "ncrsim/engine.hpp"
#include "ncrsim/kernels.hpp"
#include "ncrsim/output.hpp"

using namespace ncrsim;

namespace {

struct RunArgs {
  std::string scenario;
  std::string ncr;
  std::string seed;
  std::string slots;
  std::string warmup;
  std::string config;
  std::string out = "out";
  std::string trace;
  bool debug = false;
  std::string kernel;
};

RunConfig load(const RunArgs& a) {
  RunConfig cfg;
  if (!a.config.empty()) apply_config_file(cfg, a.config);
  if (!a.scenario.empty()) set_config_value(cfg, "scenario.id", a.scenario);
  if (!a.ncr.empty()) set_config_value(cfg, "scenario.ncr", a.ncr);
  if (!a.seed.empty()) set_config_value(cfg, "run.seed", a.seed);
  if (!a.slots.empty()) set_config_value(cfg, "run.slots", a.slots);
  if (!a.warmup.empty()) set_config_value(cfg, "run.warmup_slots", a.warmup);
  if (!a.kernel.empty()) set_config_value(cfg, "run.kernel", a.kernel);
  if (a.debug) cfg.debug_checks = true;
  std::stringstream ss(a.trace);
  for (std::string t; std::getline(ss, t, ',');) {
    if (t.empty()) continue;
    if (t != "links" && t != "alloc") throw ConfigError("unknown trace '" + t + "' (expected links or alloc)");
    cfg.trace_flags.insert(t);
  }
  cfg.output_dir = a.out;
  finalize(cfg);
  return cfg;
}

int do_run(const RunArgs& a) {
  RunConfig cfg = load(a);
  preflight_output_dir(cfg.output_dir);
  if (const int n = threads_from_env(); n > 0) set_worker_threads(n);

  std::ofstream links;
  std::ofstream alloc;
  TraceSinks sinks;
  if (cfg.trace_flags.count("links")) {
    links.open(std::filesystem::path(cfg.output_dir) / "trace_links.csv", std::ios::binary);
    sinks.links = &links;
  }
  if (cfg.trace_flags.count("alloc")) {
    alloc.open(std::filesystem::path(cfg.output_dir) / "trace_alloc.csv", std::ios::binary);
    sinks.alloc = &alloc;
  }

  Simulator sim(cfg, sinks);
  try {
    sim.run();
  } catch (const std::exception& e) {
    throw SimError("slot " + std::to_string(sim.slot()) + ": " + e.what());
  }
  emit(sim.metrics(), cfg.output_dir);
  std::cout << summary_json(sim.metrics());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"NCR-assisted mmWave network simulator"};
  app.require_subcommand(1);

  RunArgs ra;
  auto* run = app.add_subcommand("run", "Run one simulation and write results");
  run->add_option("--scenario", ra.scenario, "a or b");
  run->add_option("--ncr", ra.ncr, "on or off");
  run->add_option("--seed", ra.seed);
  run->add_option("--slots", ra.slots);
  run->add_option("--warmup", ra.warmup, "warm-up slots (default 4000)");
  run->add_option("--config", ra.config, "key = value file");
  run->add_option("--out", ra.out, "output directory");
  run->add_option("--trace", ra.trace, "comma list of links, alloc");
  run->add_option("--kernel", ra.kernel, "serial or omp");
  run->add_flag("--debug-checks", ra.debug);

  std::string vconfig;
  auto* validate = app.add_subcommand("validate", "Check a config file");
  validate->add_option("--config", vconfig)->required();

  std::string lscenario = "a";
  auto* layout = app.add_subcommand("export-layout", "Print the grid rectangles and node positions as CSV");
  layout->add_option("--scenario", lscenario);

  int beam = -1;
  auto* codebook = app.add_subcommand("dump-codebook", "Print the 8x8 DFT codebook weights");
  codebook->add_option("--beam", beam);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*run) return do_run(ra);
    if (*validate) {
      RunArgs va;
      va.config = vconfig;
      const RunConfig cfg = load(va);
      std::cout << "ok " << config_hash(cfg) << '\n';
      return 0;
    }
    if (*layout) {
      const ScenarioConfig sc = build_scenario(parse_scenario_id(lscenario), true);
      sc.layout.write_csv(std::cout);
      for (std::size_t g = 0; g < sc.gnbs.size(); ++g)
        std::cout << "gnb," << format_double(sc.gnbs[g].position.x) << ',' << format_double(sc.gnbs[g].position.y)
                  << ',' << format_double(sc.gnbs[g].position.x) << ',' << format_double(sc.gnbs[g].position.y) << '\n';
      for (std::size_t n = 0; n < sc.ncrs.size(); ++n)
        std::cout << "ncr," << format_double(sc.ncrs[n].position.x) << ',' << format_double(sc.ncrs[n].position.y)
                  << ',' << format_double(sc.ncrs[n].position.x) << ',' << format_double(sc.ncrs[n].position.y) << '\n';
      return 0;
    }
    if (*codebook) {
      const ArrayConfig panel = make_panel(0.0, 0.0);
      const BeamCodebook cb = build_dft_codebook(panel);
      std::cout << "beam,element,re,im\n";
      for (int b = 0; b < cb.size(); ++b) {
        if (beam >= 0 && b != beam) continue;
        for (int e = 0; e < panel.size(); ++e)
          std::cout << b << ',' << e << ',' << format_double(cb.weights()(e, b).real()) << ','
                    << format_double(cb.weights()(e, b).imag()) << '\n';
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
