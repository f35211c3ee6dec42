#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "polyrom/config.hpp"
#include "polyrom/errors.hpp"
#include "polyrom/parallel.hpp"
#include "polyrom/pipeline.hpp"

namespace {

struct CliOpts {
  std::string config_path;
  std::string out_dir;
  std::string override_constants;
  bool serial = false;
  long long seed = -1;
};

void add_common(CLI::App* sub, CliOpts& o) {
  sub->add_option("--config", o.config_path, "experiment config file");
  sub->add_option("--out", o.out_dir, "output directory (overrides config)");
  sub->add_flag("--serial", o.serial, "single-threaded, reproducible run");
  sub->add_option("--override-constants", o.override_constants,
                  "skip the constants stage, use \"c_coer,c_cont\"");
  sub->add_option("--seed", o.seed, "RNG seed (overrides config)");
}

polyrom::ExperimentConfig assemble_config(const CliOpts& o) {
  polyrom::ExperimentConfig cfg;
  if (!o.config_path.empty()) cfg = polyrom::load_config(o.config_path);
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.seed >= 0) cfg.seed = static_cast<unsigned>(o.seed);
  if (!o.override_constants.empty()) {
    const auto comma = o.override_constants.find(',');
    if (comma == std::string::npos)
      throw polyrom::ConfigError(
          "--override-constants expects \"c_coer,c_cont\"");
    try {
      cfg.c_coer_override = std::stod(o.override_constants.substr(0, comma));
      cfg.c_cont_override = std::stod(o.override_constants.substr(comma + 1));
    } catch (const std::exception&) {
      throw polyrom::ConfigError(
          "--override-constants expects two numbers \"c_coer,c_cont\"");
    }
    if (cfg.c_coer_override <= 0 || cfg.c_cont_override <= 0)
      throw polyrom::ConfigError("overridden constants must be positive");
    cfg.has_constants_override = true;
  }
  return cfg;
}

int run_stage(const CliOpts& o, polyrom::Stage upto) {
  if (o.serial) polyrom::set_thread_count(1);
  const polyrom::ExperimentConfig cfg = assemble_config(o);
  const polyrom::ExperimentReport rep = polyrom::run_pipeline(cfg, upto);
  std::fputs(polyrom::render_report(rep).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyrom: reduced-order decay study for steady viscous flow"};
  app.require_subcommand(1);

  CliOpts opts;
  struct SubDef {
    const char* name;
    const char* help;
    polyrom::Stage upto;
  };
  const SubDef defs[] = {
      {"mesh", "generate or import the mesh", polyrom::Stage::Mesh},
      {"eigs", "mesh + scalar eigenbasis", polyrom::Stage::Eigs},
      {"constants", "mesh + stability constants", polyrom::Stage::Constants},
      {"snapshots", "everything through the flow solves",
       polyrom::Stage::Snapshots},
      {"pod", "everything through the projection-error curve",
       polyrom::Stage::Curve},
      {"fit", "everything through the decay fits", polyrom::Stage::Fit},
      {"run", "the full pipeline including the plot", polyrom::Stage::Plot},
      {"plot", "the full pipeline including the plot", polyrom::Stage::Plot},
  };
  for (const auto& d : defs) add_common(app.add_subcommand(d.name, d.help), opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& d : defs)
      if (app.got_subcommand(d.name)) return run_stage(opts, d.upto);
    std::fputs("no subcommand\n", stderr);
    return 2;
  } catch (const polyrom::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const polyrom::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const polyrom::IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
