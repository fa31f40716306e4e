// Acceptance driver: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "../tests/oracles.hpp"
#include "lowmach/diagnostics.hpp"
#include "lowmach/eos.hpp"
#include "lowmach/initdata.hpp"
#include "lowmach/io.hpp"
#include "lowmach/scheme.hpp"
#include "lowmach/sweep.hpp"

using namespace lowmach;

namespace {

// tolerances and budgets
constexpr int kClosureInstances = 100000;
constexpr double kClosureTol = 1e-10;
constexpr double kClosureBudget = 10.0;
constexpr int kRelaxCells = 1000;
constexpr int kRk4Substeps = 10000;
constexpr double kRelaxTol = 1e-8;
constexpr double kRelaxBudget = 5.0;
constexpr double kAuditTol = 1e-8;
constexpr double kAuditBudget = 30.0;
constexpr double kSweepBudget = 600.0;
constexpr double kVelocityOrder = 1.0;
constexpr double kGapOrder = 1.5;
constexpr double kAlgebraicGap = 1e-10;
constexpr double kPressureOrder = 1.0;
constexpr double kEntropyTol = 1e-12;
constexpr double kMassTol = 1e-13;

const std::vector<double> kLadder{0.2, 0.1, 0.05, 0.025};
const std::vector<double> kShortLadder{0.2, 0.1, 0.05};

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool passed;
  std::string detail;
};

int failures = 0;

void report(int id, const Outcome& o) {
  if (!o.passed) ++failures;
  fmt::print("criterion {}: {} {}\n", id, o.passed ? "PASS" : "FAIL", o.detail);
  std::fflush(stdout);
}

RunConfig acceptance_config(ModelId model) {
  RunConfig c = default_config(model);
  c.grid.n_cells = 256;
  c.cfl = 0.4;
  c.t_end = 0.2;
  c.output_stride = 20;
  c.init.alpha_profile = {ProfileKind::Sine, ProfileTarget::VolumeFraction, 0.5, 0.2};
  c.init.u_mean = 0.3;
  c.init.acoustic = AcousticMode::RightGoing;
  if (has_relaxation(model)) c.params.tau_relax = 1.0;
  if (has_entropy(model)) {
    c.init.entropy_plus = PerturbationProfile{ProfileKind::Sine, ProfileTarget::Entropy, 0.0, 0.2};
    c.init.entropy_minus = PerturbationProfile{ProfileKind::Sine, ProfileTarget::Entropy, 0.0, 0.0};
  }
  return c;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

std::string list(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double x : v) s.push_back(fmt::format("{:.3e}", x));
  return fmt::format("[{}]", fmt::join(s, ", "));
}

std::vector<double> series(const SweepReport& r, const std::string& name) {
  std::vector<double> v;
  for (const auto& run : r.runs) v.push_back(indicator_value(run.final_indicators, name));
  return v;
}

double order_of(const SweepReport& r, const std::string& name) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& run : r.runs)
    pts.emplace_back(run.epsilon, indicator_value(run.final_indicators, name));
  const OrderFit f = fit_order(pts);
  return f.vanished ? std::nan("") : f.slope;
}

std::string run_errors(const SweepReport& r) {
  std::string e;
  for (const auto& run : r.runs)
    if (!run.error.empty()) e += fmt::format(" eps={}: {};", run.epsilon, run.error);
  return e;
}

// ---------------------------------------------------------------------------------------------

Outcome closure_solver() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> gam(1.1, 3.0), mass(0.1, 10.0), ent(-1.0, 1.0);
  double worst = 0.0, solver_time = 0.0;
  for (int k = 0; k < kClosureInstances; ++k) {
    const double gp = gam(rng), gm = gam(rng), Rp = mass(rng), Rm = mass(rng), sp = ent(rng),
                 sm = ent(rng);
    const auto t0 = clock_type::now();
    const ClosureSolution s = equilibrium_closure(Rp, Rm, sp, sm, gp, gm);
    solver_time += seconds_since(t0);
    const double ref = static_cast<double>(oracle::closure_alpha(Rp, Rm, sp, sm, gp, gm));
    worst = std::max(worst, std::abs(s.alpha_plus - ref));
  }
  int symmetric_bad = 0;
  for (int k = 0; k < 1000; ++k) {
    const double g = gam(rng), R = mass(rng), s = ent(rng);
    if (equilibrium_closure(R, R, s, s, g, g).alpha_plus != 0.5) ++symmetric_bad;
  }
  const bool ok = worst <= kClosureTol && symmetric_bad == 0 && solver_time < kClosureBudget;
  return {ok, fmt::format("closure: {} instances, max |dalpha| = {:.2e} (tol {:.0e}), "
                          "{} symmetric cases off 0.5, solver time {:.2f} s",
                          kClosureInstances, worst, kClosureTol, symmetric_bad, solver_time)};
}

// One acceptance time step of the relaxation model: a 256-cell unit domain at cfl 0.4 and
// eps = 0.05, with the cell's own acoustic speed.
Outcome relaxation_integrator() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> gam(1.1, 3.0), mass(0.1, 10.0), ent(-1.0, 1.0),
      al(0.05, 0.95);
  const double eps = 0.05, dx = 1.0 / 256, cfl = 0.4;
  double worst = 0.0, worst_be = 0.0, solver_time = 0.0;
  int moved = 0;
  for (int k = 0; k < kRelaxCells; ++k) {
    PhysParams p;
    p.gamma_plus = gam(rng);
    p.gamma_minus = gam(rng);
    p.tau_relax = 1.0;
    const double Rp = mass(rng), Rm = mass(rng), sp = ent(rng), sm = ent(rng), a0 = al(rng);
    const double c = std::max(sound_speed(Rp / a0, sp, p.gamma_plus),
                              sound_speed(Rm / (1.0 - a0), sm, p.gamma_minus));
    const double dt = cfl * dx * eps / c;
    const auto t0 = clock_type::now();
    const RelaxedCell r = relax_cell(Rp, Rm, sp, sm, a0, dt, p, eps);
    solver_time += seconds_since(t0);
    const double ref = static_cast<double>(oracle::relax_rk4(
        Rp, Rm, sp, sm, p.gamma_plus, p.gamma_minus, a0, dt, eps, 1.0L, kRk4Substeps));
    worst = std::max(worst, std::abs(r.alpha - ref));
    PhysParams be = p;
    be.relax_scheme = RelaxScheme::BackwardEuler;
    worst_be = std::max(worst_be, std::abs(relax_cell(Rp, Rm, sp, sm, a0, dt, be, eps).alpha - ref));

    const double astar = equilibrium_closure(Rp, Rm, sp, sm, p.gamma_plus, p.gamma_minus).alpha_plus;
    if (relax_cell(Rp, Rm, sp, sm, astar, dt, p, eps).alpha != astar) ++moved;
  }
  const bool ok = worst <= kRelaxTol && moved == 0 && solver_time < kRelaxBudget;
  return {ok, fmt::format("relaxation: {} cells vs RK4 ({} substeps), max |dalpha| = {:.2e} "
                          "(tol {:.0e}); single backward-Euler step would give {:.2e}; "
                          "{} equilibrium cells moved; solver time {:.2f} s",
                          kRelaxCells, kRk4Substeps, worst, kRelaxTol, worst_be, moved,
                          solver_time)};
}

Outcome energy_audits() {
  bool ok = true;
  std::vector<std::string> parts;
  for (ModelId m : {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4}) {
    for (double eps : {1.0, 0.2}) {
      RunConfig c = acceptance_config(m);
      c.epsilon = eps;
      c.output_stride = 1;
      c.init.acoustic = AcousticMode::Standing;  // the right-going correction is O(1) at eps = 1
      const auto t0 = clock_type::now();
      const Trajectory t = simulate(c, make_well_prepared(c));
      const double wall = seconds_since(t0);
      const EnergyAuditReport a = energy_audit(t, c, kAuditTol);
      const bool run_ok = a.passed && (eps != 0.2 || wall < kAuditBudget);
      ok = ok && run_ok;
      parts.push_back(fmt::format("{} eps={} {} growth {:.1e} {:.1f}s", to_string(m), eps,
                                  run_ok ? "ok" : "FAIL", a.worst_violation, wall));
    }
  }
  // relaxation model started off pressure equilibrium
  RunConfig c = acceptance_config(ModelId::M3);
  c.epsilon = 0.2;
  c.init.acoustic = AcousticMode::Standing;
  PhaseState s = make_well_prepared(c);
  for (int i = 0; i < s.n_cells(); ++i) s.alpha_plus[i] = 0.5 + 0.8 * (s.alpha_plus[i] - 0.5);
  const Trajectory t = simulate(c, s);
  const double diss = t.records.back().energy.dissipated_relaxation;
  const EnergyAuditReport a = energy_audit(t, c, kAuditTol);
  ok = ok && diss > 0.0 && a.passed;
  parts.push_back(fmt::format("M3 off-equilibrium dissipated_relaxation {:.3e}, audit {}", diss,
                              a.passed ? "ok" : "FAIL"));
  return {ok, fmt::format("energy audit: {}", fmt::join(parts, "; "))};
}

struct LadderResults {
  SweepReport m2, m3;
  double wall = 0.0;
};

Outcome single_velocity_limit(LadderResults& lr) {
  const auto t0 = clock_type::now();
  lr.m2 = mach_sweep(acceptance_config(ModelId::M2), kLadder, 2);
  lr.m3 = mach_sweep(acceptance_config(ModelId::M3), kLadder, 2);
  lr.wall = seconds_since(t0);
  bool ok = lr.wall < kSweepBudget;
  std::vector<std::string> parts;
  for (const SweepReport* r : {&lr.m2, &lr.m3}) {
    const std::string name(to_string(r->base_config.model));
    const std::string errs = run_errors(*r);
    if (!errs.empty()) {
      ok = false;
      parts.push_back(fmt::format("{} run errors:{}", name, errs));
      continue;
    }
    const auto aerr = series(*r, "alpha_oracle_err"), uvar = series(*r, "u_variance");
    const bool a_dec = strictly_decreasing(aerr), u_dec = strictly_decreasing(uvar);
    const double u_ord = order_of(*r, "u_variance");
    const bool u_ord_ok = u_ord >= kVelocityOrder;
    ok = ok && a_dec && u_dec && u_ord_ok;
    parts.push_back(fmt::format("{} (a) alpha_oracle_err {} {}, u_variance {} {}; (b) u_variance "
                                "order {:.2f} {}",
                                name, list(aerr), a_dec ? "decreasing" : "NOT decreasing",
                                list(uvar), u_dec ? "decreasing" : "NOT decreasing", u_ord,
                                u_ord_ok ? "ok" : "FAIL"));
    if (r->base_config.model == ModelId::M3) {
      const double g = order_of(*r, "pressure_gap");
      const bool g_ok = g >= kGapOrder;
      ok = ok && g_ok;
      parts.push_back(fmt::format("M3 (c) pressure_gap {} order {:.2f} {}",
                                  list(series(*r, "pressure_gap")), g, g_ok ? "ok" : "FAIL"));
    } else {
      double worst = 0.0;
      for (const auto& run : r->runs) worst = std::max(worst, run.max_pressure_gap);
      const bool g_ok = worst <= kAlgebraicGap;
      ok = ok && g_ok;
      parts.push_back(
          fmt::format("M2 (c) max pressure_gap over all steps {:.2e} {}", worst, g_ok ? "ok" : "FAIL"));
    }
  }
  parts.push_back(fmt::format("wall {:.0f} s", lr.wall));
  return {ok, fmt::format("single-velocity limit: {}", fmt::join(parts, "; "))};
}

Outcome closure_equivalence(const LadderResults& lr) {
  if (!run_errors(lr.m2).empty() || !run_errors(lr.m3).empty())
    return {false, "closure equivalence: ladder runs failed"};
  std::vector<double> diff, gap;
  for (double eps : {0.05, 0.025}) {
    const auto find = [&](const SweepReport& r) -> const SweepRun& {
      for (const auto& run : r.runs)
        if (run.epsilon == eps) return run;
      throw Error("missing run");
    };
    const SweepRun& a = find(lr.m2);
    const SweepRun& b = find(lr.m3);
    const RunConfig c2 = acceptance_config(ModelId::M2);
    const ClosureFields t2 = closure_project(a.trajectory.records.back().state, c2.params);
    const std::vector<double>& a3 = b.trajectory.records.back().state.alpha_plus;
    double d = 0.0;
    for (std::size_t i = 0; i < a3.size(); ++i) d = std::max(d, std::abs(t2.alpha[i] - a3[i]));
    diff.push_back(d);
    gap.push_back(b.final_indicators.pressure_gap);
  }
  const bool ok = diff[1] < diff[0];
  return {ok, fmt::format("closure equivalence: max |alpha_M2 - alpha_M3| at eps 0.05, 0.025 = "
                          "{} ({}); M3 pressure gap {}",
                          list(diff), ok ? "decreasing" : "NOT decreasing", list(gap))};
}

Outcome non_isentropic() {
  RunConfig c = acceptance_config(ModelId::M4);
  c.output_stride = 1;
  const SweepReport r = mach_sweep(c, kLadder, 2);
  const std::string errs = run_errors(r);
  if (!errs.empty()) return {false, "non-isentropic: run errors:" + errs};
  const auto dev = series(r, "pressure_dev");
  const bool dec = strictly_decreasing(dev);
  const double ord = order_of(r, "pressure_dev");
  double expansion = 0.0;
  for (const auto& run : r.runs) {
    const PhaseState& s0 = run.trajectory.records.front().state;
    for (auto f : {&PhaseState::S_plus, &PhaseState::S_minus}) {
      const auto [lo, hi] = std::minmax_element((s0.*f).begin(), (s0.*f).end());
      for (const auto& rec : run.trajectory.records)
        for (double v : rec.state.*f)
          expansion = std::max({expansion, *lo - v, v - *hi});
    }
  }
  const bool ok = dec && ord >= kPressureOrder && expansion <= kEntropyTol;
  return {ok, fmt::format("non-isentropic: pressure_dev {} {}, order {:.2f} (min {}); entropy "
                          "range expansion {:.1e} (tol {:.0e})",
                          list(dev), dec ? "decreasing" : "NOT decreasing", ord, kPressureOrder,
                          expansion, kEntropyTol)};
}

Outcome two_velocity_limits() {
  bool ok = true;
  std::vector<std::string> parts;
  for (ModelId m : {ModelId::M5, ModelId::M6}) {
    const SweepReport r = mach_sweep(acceptance_config(m), kLadder, 2);
    const std::string errs = run_errors(r);
    if (!errs.empty()) {
      ok = false;
      parts.push_back(fmt::format("{} run errors:{}", to_string(m), errs));
      continue;
    }
    const auto uvar = series(r, "u_variance");
    const bool dec = strictly_decreasing(uvar);
    double mass = 0.0;
    for (const auto& run : r.runs) {
      const PhaseState& a = run.trajectory.records.front().state;
      const PhaseState& b = run.trajectory.records.back().state;
      for (auto f : {&PhaseState::R_plus, &PhaseState::R_minus}) {
        long double m0 = 0, m1 = 0;
        for (double v : a.*f) m0 += v;
        for (double v : b.*f) m1 += v;
        mass = std::max(mass, static_cast<double>(std::abs(m1 - m0) / m0));
      }
    }
    const bool m_ok = mass <= kMassTol;
    ok = ok && dec && m_ok;
    parts.push_back(fmt::format("{} volume-flux variance {} {}, max relative mass change {:.1e} {}",
                                to_string(m), list(uvar), dec ? "decreasing" : "NOT decreasing",
                                mass, m_ok ? "ok" : "FAIL"));
  }
  return {ok, fmt::format("two-velocity limits: {}", fmt::join(parts, "; "))};
}

// Phase-slip data: the acoustic part of the velocity field is switched off so that the
// constraint measures the relaxation balance rather than sound waves.
Outcome m7_constraint() {
  RunConfig c = acceptance_config(ModelId::M7);
  c.init.velocity_profile.amplitude = 0.0;
  c.init.slip_profile = {ProfileKind::Sine, ProfileTarget::Velocity, 0.0, 0.2};
  const SweepReport r = mach_sweep(c, kShortLadder, 2);
  const std::string errs = run_errors(r);
  if (!errs.empty()) return {false, "M7 constraint: run errors:" + errs};
  const auto res = series(r, "m7_normalized_residual");
  const bool dec = strictly_decreasing(res);
  return {dec, fmt::format("M7 constraint: normalized residual {} {}", list(res),
                           dec ? "decreasing" : "NOT decreasing")};
}

std::string csv_bytes(const Trajectory& t, const RunConfig& c) {
  std::ostringstream a;
  write_trajectory_csv(a, t);
  write_snapshot_csv(a, t, c);
  return a.str();
}

Outcome determinism(const LadderResults& lr) {
  RunConfig c = acceptance_config(ModelId::M3);
  c.epsilon = 0.05;
  const std::string first = csv_bytes(simulate(c, make_well_prepared(c)), c);
  const std::string second = csv_bytes(simulate(c, make_well_prepared(c)), c);
  bool from_sweep = false;
  for (const auto& run : lr.m3.runs)
    if (run.epsilon == 0.05 && run.error.empty())
      from_sweep = csv_bytes(run.trajectory, c) == first;
  const bool ok = first == second && from_sweep;
  return {ok, fmt::format("determinism: M3 eps=0.05 CSVs ({} bytes) {} across two runs, {} the "
                          "threaded sweep run",
                          first.size(), first == second ? "identical" : "DIFFER",
                          from_sweep ? "identical to" : "DIFFERENT from")};
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, fmt::format("exception: {}", e.what())};
  }
}

}  // namespace

int main() {
  LadderResults lr;
  report(1, guarded(closure_solver));
  report(2, guarded(relaxation_integrator));
  report(3, guarded(energy_audits));
  report(4, guarded([&] { return single_velocity_limit(lr); }));
  report(5, guarded([&] { return closure_equivalence(lr); }));
  report(6, guarded(non_isentropic));
  report(7, guarded(two_velocity_limits));
  report(8, guarded(m7_constraint));
  report(9, guarded([&] { return determinism(lr); }));
  fmt::print("{} of 9 criteria passed\n", 9 - failures);
  return failures == 0 ? 0 : 1;
}
