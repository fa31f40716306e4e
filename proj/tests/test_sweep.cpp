#include <doctest.h>

#include <cmath>

#include "lowmach/sweep.hpp"

using namespace lowmach;
using doctest::Approx;

TEST_CASE("order fit") {
  SUBCASE("exact square law") {
    const OrderFit f = fit_order({{1, 1}, {0.5, 0.25}, {0.25, 0.0625}});
    CHECK(f.slope == Approx(2.0).epsilon(1e-14));
    CHECK(f.residual == Approx(0.0).scale(1.0).epsilon(1e-14));
    CHECK_FALSE(f.vanished);
  }
  SUBCASE("constant values") {
    CHECK(fit_order({{1, 3.7}, {0.5, 3.7}}).slope == Approx(0.0).scale(1.0).epsilon(1e-15));
  }
  SUBCASE("least squares in closed form") {
    const std::vector<std::pair<double, double>> pts{{0.2, 3e-3}, {0.1, 7.6e-4}, {0.05, 1.9e-4}};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [e, v] : pts) {
      sx += std::log(e);
      sy += std::log(v);
      sxx += std::log(e) * std::log(e);
      sxy += std::log(e) * std::log(v);
    }
    const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
    const OrderFit f = fit_order(pts);
    CHECK(f.slope == Approx(slope).epsilon(1e-13));
    CHECK(f.slope == Approx(1.99).epsilon(5e-3));
  }
  SUBCASE("vanished values") {
    CHECK(fit_order({{0.2, 1e-3}, {0.1, 0.0}, {0.05, 0.0}}).vanished);
  }
  SUBCASE("too few points") { CHECK_THROWS(fit_order({{0.2, 1.0}})); }
}

TEST_CASE("indicator names") {
  LimitIndicators i;
  i.u_variance = 2.0;
  i.m7_constraint_residual = 3.0;
  i.m7_constraint_scale = 4.0;
  CHECK(indicator_value(i, "u_variance") == 2.0);
  CHECK(indicator_value(i, "m7_normalized_residual") == 0.75);
  CHECK_THROWS(indicator_value(i, "nope"));
  CHECK(indicator_names().size() == 10);
}

TEST_CASE("verdict rules") {
  auto run = [](double eps, double uvar) {
    SweepRun r;
    r.epsilon = eps;
    r.final_indicators.u_variance = uvar;
    return r;
  };
  const auto ok = sweep_verdicts(ModelId::M5, {run(0.2, 4e-2), run(0.1, 1e-2), run(0.05, 2.5e-3)});
  REQUIRE(!ok.empty());
  for (const auto& v : ok) CHECK(v.passed);
  const auto bad = sweep_verdicts(ModelId::M5, {run(0.2, 4e-2), run(0.1, 5e-2), run(0.05, 2.5e-3)});
  CHECK_FALSE(bad.front().passed);
  SweepRun failed = run(0.05, 1e-3);
  failed.error = "step 3: positivity failure";
  const auto err = sweep_verdicts(ModelId::M5, {run(0.2, 4e-2), run(0.1, 1e-2), failed});
  bool any_failed = false;
  for (const auto& v : err) any_failed = any_failed || !v.passed;
  CHECK(any_failed);
}

TEST_CASE("mach sweep") {
  RunConfig c = default_config(ModelId::M2);
  c.grid.n_cells = 64;
  c.t_end = 0.05;
  c.init.acoustic = AcousticMode::RightGoing;
  SUBCASE("ladder checks") {
    CHECK_THROWS(mach_sweep(c, {0.1}));
    CHECK_THROWS(mach_sweep(c, {0.1, 0.2, 0.05}));
  }
  SUBCASE("algebraic closure pipeline") {
    const SweepReport one = mach_sweep(c, {0.2, 0.1, 0.05}, 1);
    REQUIRE(one.runs.size() == 3);
    for (const auto& r : one.runs) {
      CHECK(r.error.empty());
      CHECK(r.max_pressure_gap <= 1e-10);
      CHECK(r.steps > 0);
    }
    bool have_u = false, have_a = false;
    for (const auto& [name, f] : one.orders) {
      if (name == "u_variance") have_u = std::isfinite(f.slope);
      if (name == "alpha_oracle_err") have_a = std::isfinite(f.slope);
    }
    CHECK(have_u);
    CHECK(have_a);
    const SweepReport three = mach_sweep(c, {0.2, 0.1, 0.05}, 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(three.runs[k].final_indicators.u_variance == one.runs[k].final_indicators.u_variance);
      CHECK(three.runs[k].steps == one.runs[k].steps);
    }
    CHECK(three.passed == one.passed);
  }
  SUBCASE("relaxation pipeline reports the pressure gap order") {
    RunConfig m3 = c;
    m3.model = ModelId::M3;
    const SweepReport r = mach_sweep(m3, {0.2, 0.1, 0.05}, 3);
    bool found = false;
    for (const auto& [name, f] : r.orders)
      if (name == "pressure_gap") {
        found = true;
        MESSAGE("pressure_gap order ", f.slope);
        CHECK(f.slope > 1.5);
      }
    CHECK(found);
  }
}
