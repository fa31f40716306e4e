#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lowmach/diagnostics.hpp"
#include "lowmach/initdata.hpp"
#include "lowmach/scheme.hpp"

using namespace lowmach;
using doctest::Approx;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PhaseState uniform_m2(int n) {
  PhaseState s = PhaseState::zeros(ModelId::M2, n);
  std::fill(s.R_plus.begin(), s.R_plus.end(), 0.5);
  std::fill(s.R_minus.begin(), s.R_minus.end(), 0.5);
  return s;
}

}  // namespace

TEST_CASE("energy of a uniform state") {
  RunConfig c = default_config(ModelId::M2);
  c.grid.n_cells = 10;
  c.params.gamma_plus = c.params.gamma_minus = 2.0;
  c.epsilon = 1.0;
  EnergyBreakdown e = energy_total(uniform_m2(10), c);
  CHECK(e.kinetic == 0.0);
  CHECK(e.internal == Approx(1.0).epsilon(1e-14));
  c.epsilon = 0.5;
  e = energy_total(uniform_m2(10), c);
  CHECK(e.internal == Approx(4.0).epsilon(1e-14));
}

TEST_CASE("energy quadrature is second order") {
  // midpoint sums against a 10x refined, shifted sum of the same smooth fields
  auto rho = [](double x) { return 1.0 + 0.3 * std::sin(kTwoPi * x) + 0.1 * std::cos(3 * kTwoPi * x); };
  auto mom = [](double x) { return 0.5 * std::cos(kTwoPi * x); };
  auto energy = [&](int n) {
    RunConfig c = default_config(ModelId::M1);
    c.grid.n_cells = n;
    c.epsilon = 0.5;
    PhaseState s = PhaseState::zeros(ModelId::M1, n);
    for (int i = 0; i < n; ++i) {
      s.R_plus[i] = rho(c.grid.center(i));
      s.m[i] = mom(c.grid.center(i));
    }
    return energy_total(s, c);
  };
  auto refined = [&](int n) {
    const int m = 10 * n;
    long double k = 0, in = 0;
    for (int j = 0; j < m; ++j) {
      const double x = (j + 0.3) / m;
      k += 0.5L * mom(x) * mom(x) / rho(x);
      in += std::pow(static_cast<long double>(rho(x)), 1.4L) / 0.4L;
    }
    return std::pair<double, double>(double(k / m), double(in / m / 0.25L));
  };
  for (int n : {16, 32, 64}) {
    const EnergyBreakdown e = energy(n);
    const auto [k, in] = refined(n);
    const double dx = 1.0 / n;
    CHECK(std::abs(e.kinetic - k) <= 10.0 * dx * dx);
    CHECK(std::abs(e.internal - in) <= 10.0 * dx * dx);
  }
}

TEST_CASE("energy audit") {
  RunConfig c = default_config(ModelId::M2);
  c.grid.n_cells = 16;
  SUBCASE("fixed point") {
    c.t_end = 0.01;
    const Trajectory t = simulate(c, uniform_m2(16));
    const EnergyAuditReport r = energy_audit(t, c);
    CHECK(r.passed);
    CHECK(r.worst_violation == Approx(0.0).scale(1.0).epsilon(1e-15));
  }
  SUBCASE("one-phase smooth run") {
    RunConfig m1 = default_config(ModelId::M1);
    m1.epsilon = 1.0;
    m1.output_stride = 5;
    const Trajectory t = simulate(m1, make_well_prepared(m1));
    const EnergyAuditReport r = energy_audit(t, m1);
    CHECK(r.passed);
    CHECK(t.records.back().energy.dissipated_viscous > 0.0);
  }
  SUBCASE("injected energy fails") {
    c.t_end = 0.01;
    c.output_stride = 1;
    Trajectory t = simulate(c, make_well_prepared(c));
    REQUIRE(t.records.size() >= 3);
    t.records[2].energy.kinetic += 1e-6 * t.records[0].energy.total();
    const EnergyAuditReport r = energy_audit(t, c);
    CHECK_FALSE(r.passed);
    CHECK(r.worst_record == 2);
    CHECK(r.message.find("FAIL") != std::string::npos);
  }
}

TEST_CASE("indicators") {
  SUBCASE("the limit state annihilates them") {
    for (ModelId m : {ModelId::M2, ModelId::M3, ModelId::M4}) {
      RunConfig c = default_config(m);
      c.grid.n_cells = 64;
      const PhaseState s = embed_limit_state(c, 0.0);
      const LimitIndicators i = indicators(s, c);
      CHECK(i.pressure_gap <= 1e-12);
      CHECK(i.pressure_dev <= 1e-12);
      CHECK(i.density_dev_plus <= 1e-12);
      CHECK(i.density_dev_minus <= 1e-12);
      CHECK(i.u_variance <= 1e-14);
      CHECK(i.div_norm <= 1e-12);
      CHECK(i.alpha_oracle_err <= 1e-12);
    }
  }
  SUBCASE("divergence norm of a sine") {
    double prev = 0.0;
    for (int n : {64, 128, 256}) {
      RunConfig c = default_config(ModelId::M1);
      c.grid.n_cells = n;
      c.epsilon = 0.1;
      PhaseState s = PhaseState::zeros(ModelId::M1, n);
      for (int i = 0; i < n; ++i) {
        s.R_plus[i] = 1.0;
        s.m[i] = 0.3 + 0.1 * std::sin(kTwoPi * c.grid.center(i));
      }
      const double exact = 0.1 * kTwoPi / std::sqrt(2.0);
      CHECK(exact == Approx(0.4443).epsilon(1e-4));
      const double err = std::abs(indicators(s, c).div_norm - exact);
      CHECK(err <= 2.0 * exact * std::pow(kTwoPi / n, 2));
      if (prev > 0) CHECK(prev / err == Approx(4.0).epsilon(0.02));
      prev = err;
    }
  }
  SUBCASE("algebraic closure has no pressure gap") {
    RunConfig c = default_config(ModelId::M2);
    c.grid.n_cells = 64;
    const PhaseState s = make_well_prepared(c);
    const ClosureFields th = closure_project(s, c.params);
    const LimitIndicators i = indicators(s, th, c);
    double pmax = 0.0;
    for (double p : th.p_plus) pmax = std::max(pmax, p);
    CHECK(i.pressure_gap <= kClosureRelTol * pmax);
  }
  SUBCASE("two-velocity models use the volume flux") {
    RunConfig c = default_config(ModelId::M5);
    c.grid.n_cells = 64;
    c.init.velocity_profile.amplitude = 0.0;
    c.init.slip_profile.amplitude = 0.4;
    const LimitIndicators i = indicators(make_well_prepared(c), c);
    CHECK(i.u_variance <= 1e-12);
  }
  SUBCASE("M7 constraint parts") {
    RunConfig c = default_config(ModelId::M7);
    c.grid.n_cells = 64;
    c.init.slip_profile.amplitude = 0.2;
    const LimitIndicators i = indicators(make_well_prepared(c), c);
    CHECK(i.m7_constraint_scale > 0.0);
    // data at pressure equilibrium: the residual is the compression alone
    CHECK(i.m7_constraint_residual == Approx(i.m7_constraint_scale).epsilon(1e-9));
  }
}
