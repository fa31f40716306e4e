#include "lowmach/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lowmach/diagnostics.hpp"
#include "lowmach/initdata.hpp"
#include "lowmach/io.hpp"
#include "lowmach/scheme.hpp"
#include "lowmach/sweep.hpp"

namespace lowmach {

namespace fs = std::filesystem;

namespace {

void write_run(const fs::path& dir, const Trajectory& traj, const RunConfig& cfg) {
  fs::create_directories(dir);
  std::ofstream t(dir / "trajectory.csv");
  write_trajectory_csv(t, traj);
  std::ofstream s(dir / "snapshots.csv");
  write_snapshot_csv(s, traj, cfg);
  if (!t || !s) throw Error(fmt::format("cannot write CSV files in '{}'", dir.string()));
}

int run_simulate(const RunConfig& cfg, const fs::path& out, bool quiet) {
  const Trajectory traj = simulate(cfg, make_well_prepared(cfg));
  write_run(out, traj, cfg);
  if (!quiet)
    fmt::print("{} eps={} steps={} records={} -> {}\n", to_string(cfg.model), cfg.epsilon,
               traj.steps, traj.records.size(), out.string());
  return 0;
}

int run_sweep(const RunConfig& cfg, const fs::path& out, int workers, bool quiet) {
  if (cfg.sweep_epsilons.empty())
    throw ConfigError("sweep needs 'sweep.epsilons' in the configuration");
  const SweepReport rep = mach_sweep(cfg, cfg.sweep_epsilons, workers);
  fs::create_directories(out);
  for (const auto& r : rep.runs) {
    RunConfig rc = cfg;
    rc.epsilon = r.epsilon;
    if (r.error.empty()) write_run(out / fmt::format("eps_{}", r.epsilon), r.trajectory, rc);
  }
  std::ofstream j(out / "sweep.json");
  j << sweep_to_json(rep);
  if (!quiet) {
    for (const auto& r : rep.runs)
      fmt::print("eps={:<8} steps={:<7} wall={:.2f}s {}\n", r.epsilon, r.steps, r.wall_seconds,
                 r.error.empty() ? "ok" : r.error);
    for (const auto& v : rep.verdicts)
      fmt::print("{} {} ({})\n", v.passed ? "PASS" : "FAIL", v.name, v.detail);
    fmt::print("sweep verdict: {}\n", rep.passed ? "pass" : "FAIL");
  }
  return rep.passed ? 0 : 2;
}

int run_audit(const RunConfig& cfg, bool quiet) {
  const Trajectory traj = simulate(cfg, make_well_prepared(cfg));
  const EnergyAuditReport rep = energy_audit(traj, cfg);
  if (!quiet) fmt::print("{}\n", rep.message);
  return rep.passed ? 0 : 2;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Low-Mach two-phase finite-volume lab"};
  app.require_subcommand(1);
  std::string config_path, out_dir = ".", model_name;
  int workers = 1;
  bool quiet = false;

  auto* sim = app.add_subcommand("simulate", "run one configuration, write CSVs");
  auto* sweep = app.add_subcommand("sweep", "run the Mach ladder, write sweep.json and CSVs");
  auto* audit = app.add_subcommand("energy-audit", "run and check the discrete energy inequality");
  auto* show = app.add_subcommand("print-model", "print the equations and active fields");
  for (auto* sc : {sim, sweep, audit}) {
    sc->add_option("--config", config_path, "configuration file")->required();
    sc->add_flag("--quiet", quiet, "no progress output");
  }
  sim->add_option("--out", out_dir, "output directory");
  sweep->add_option("--out", out_dir, "output directory");
  sweep->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);
  auto* show_group = show->add_option_group("selection");
  show_group->add_option("--config", config_path, "configuration file");
  show_group->add_option("--model", model_name, "M1..M7");
  show_group->require_option(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*show) {
      const ModelId m = model_name.empty() ? parse_config(config_path).model
                                           : model_from_string(model_name);
      fmt::print("{}", describe_model(m));
      return 0;
    }
    const RunConfig cfg = parse_config(config_path);
    if (*sim) return run_simulate(cfg, out_dir, quiet);
    if (*sweep) return run_sweep(cfg, out_dir, workers, quiet);
    if (*audit) return run_audit(cfg, quiet);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace lowmach
