#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lowmach/cli.hpp"
#include "lowmach/initdata.hpp"
#include "lowmach/io.hpp"
#include "lowmach/scheme.hpp"

using namespace lowmach;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lowmach_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "lowmach");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal file") {
    const RunConfig c = parse_config_text("model = M1\nepsilon = 1\n");
    CHECK(c.model == ModelId::M1);
    CHECK(c.epsilon == 1.0);
    CHECK(c.grid.n_cells == 256);
    CHECK(validate(c).empty());
  }
  SUBCASE("relaxation without tau") {
    CHECK_THROWS_WITH_AS(parse_config_text("model = M3\n"), doctest::Contains("tau_relax"),
                         ConfigError);
  }
  SUBCASE("ladder") {
    const RunConfig c = parse_config_text("model = M2\nsweep.epsilons = 0.2, 0.1,0.05\n");
    CHECK(c.sweep_epsilons == std::vector<double>{0.2, 0.1, 0.05});
  }
  SUBCASE("errors name key and line") {
    CHECK_THROWS_WITH(parse_config_text("model = M2\nfoo = 1\n"), doctest::Contains("line 2"));
    CHECK_THROWS_WITH(parse_config_text("model = M2\nepsilon = x\n"), doctest::Contains("epsilon"));
    CHECK_THROWS_WITH(parse_config_text("model = M2\ncfl = 0.3\ncfl = 0.2\n"),
                      doctest::Contains("cfl"));
    CHECK_THROWS_AS(parse_config_text("model = M5\nmu_visc = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/x.cfg")), ConfigError);
  }
  SUBCASE("comments and two-velocity defaults") {
    const RunConfig c = parse_config_text("# header\nmodel = M6   # trailing\n\n");
    CHECK(c.params.mu_visc == 0.0);
  }
}

TEST_CASE("config round trip") {
  for (ModelId m : kAllModels) {
    RunConfig c = default_config(m);
    c.epsilon = 0.0123456789012345;
    c.grid.n_cells = 77;
    c.seed = 9;
    c.init.alpha_profile.kind = ProfileKind::Bump;
    c.init.velocity_profile.kind = ProfileKind::RandomSmooth;
    c.init.velocity_profile.seed = 1234567;
    c.init.acoustic = AcousticMode::RightGoing;
    c.flux = FluxKind::Rusanov;
    c.sweep_epsilons = {0.3, 0.2, 0.1};
    if (has_entropy(m))
      c.init.entropy_plus = PerturbationProfile{ProfileKind::Sine, ProfileTarget::Entropy, 0.1, 0.2};
    if (has_relaxation(m)) {
      c.params.tau_relax = 0.37;
      c.params.relax_scheme = RelaxScheme::BackwardEuler;
    }
    if (is_two_velocity(m)) {
      c.params.eta_drag = 0.5;
      c.params.pint = {PintRule::Constant, 1.7};
    }
    const std::string text = print_config(c);
    const RunConfig back = parse_config_text(text);
    CHECK(back == c);
    CHECK(print_config(back) == text);
  }
}

TEST_CASE("csv output") {
  RunConfig c = default_config(ModelId::M3);
  c.grid.n_cells = 32;
  c.t_end = 0.02;
  c.output_stride = 4;
  const Trajectory t = simulate(c, make_well_prepared(c));
  std::ostringstream a, b;
  write_trajectory_csv(a, t);
  write_snapshot_csv(b, t, c);
  const std::string traj = a.str(), snap = b.str();
  std::string header = traj.substr(0, traj.find('\n'));
  std::string expect;
  for (const auto& col : trajectory_columns()) expect += (expect.empty() ? "" : ",") + col;
  CHECK(header == expect);
  CHECK(std::count(traj.begin(), traj.end(), '\n') == static_cast<long>(t.records.size() + 1));
  CHECK(std::count(snap.begin(), snap.end(), '\n') ==
        static_cast<long>(t.records.size() * 32 + 1));
  CHECK(snapshot_columns(ModelId::M3)[5] == "u");
  CHECK(snapshot_columns(ModelId::M7)[5] == "u_plus");

  std::ostringstream a2, b2;
  const Trajectory t2 = simulate(c, make_well_prepared(c));
  write_trajectory_csv(a2, t2);
  write_snapshot_csv(b2, t2, c);
  CHECK(a2.str() == traj);
  CHECK(b2.str() == snap);
}

TEST_CASE("sweep json round trip") {
  RunConfig c = default_config(ModelId::M2);
  c.grid.n_cells = 32;
  c.t_end = 0.02;
  const SweepReport rep = mach_sweep(c, {0.2, 0.1, 0.05}, 2);
  const std::string js = sweep_to_json(rep);
  const SweepReport back = sweep_from_json(js);
  CHECK(back.base_config == rep.base_config);
  CHECK(back.epsilons == rep.epsilons);
  REQUIRE(back.runs.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(back.runs[k].final_indicators.u_variance == rep.runs[k].final_indicators.u_variance);
    CHECK(back.runs[k].steps == rep.runs[k].steps);
  }
  CHECK(back.passed == rep.passed);
  CHECK(sweep_to_json(back) == js);
  CHECK_THROWS_AS(sweep_from_json("{}"), ConfigError);
}

TEST_CASE("model descriptions") {
  for (ModelId m : kAllModels) {
    const std::string d = describe_model(m);
    CHECK(d.find("eps") != std::string::npos);
    for (Field f : active_fields(m)) CHECK(d.find(std::string(to_string(f))) != std::string::npos);
  }
}

TEST_CASE("command line") {
  const fs::path dir = scratch_dir("cli");
  {
    std::ofstream cfg(dir / "m1.cfg");
    cfg << "model = M1\nepsilon = 1\nn_cells = 32\nt_end = 0.02\n";
    std::ofstream sw(dir / "m2.cfg");
    sw << "model = M2\nn_cells = 32\nt_end = 0.02\nacoustic_mode = right_going\n"
          "sweep.epsilons = 0.2, 0.1, 0.05\n";
  }
  CHECK(run_cli({"simulate", "--config", (dir / "m1.cfg").string(), "--out",
                 (dir / "runs").string(), "--quiet"}) == 0);
  CHECK(fs::exists(dir / "runs" / "trajectory.csv"));
  CHECK(fs::exists(dir / "runs" / "snapshots.csv"));
  const std::string first = slurp(dir / "runs" / "snapshots.csv");
  CHECK(run_cli({"simulate", "--config", (dir / "m1.cfg").string(), "--out",
                 (dir / "runs").string(), "--quiet"}) == 0);
  CHECK(slurp(dir / "runs" / "snapshots.csv") == first);

  const int sweep_code = run_cli({"sweep", "--config", (dir / "m2.cfg").string(), "--out",
                                  (dir / "sweep").string(), "--workers", "3", "--quiet"});
  CHECK((sweep_code == 0 || sweep_code == 2));
  CHECK(fs::exists(dir / "sweep" / "sweep.json"));
  const SweepReport rep = sweep_from_json(slurp(dir / "sweep" / "sweep.json"));
  CHECK(sweep_code == (rep.passed ? 0 : 2));

  CHECK(run_cli({"energy-audit", "--config", (dir / "m1.cfg").string(), "--quiet"}) == 0);
  CHECK(run_cli({"print-model", "--model", "M7"}) == 0);
  CHECK(run_cli({"frobnicate"}) == 1);
  CHECK(run_cli({"simulate"}) == 1);
  CHECK(run_cli({"simulate", "--config", (dir / "missing.cfg").string()}) == 1);
  CHECK(run_cli({"print-model", "--model", "M9"}) == 1);
  fs::remove_all(dir);
}
