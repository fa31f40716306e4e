#include "lowmach/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "lowmach/initdata.hpp"
#include "lowmach/scheme.hpp"

namespace lowmach {

OrderFit fit_order(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw DomainError("fit_order needs at least 2 points");
  OrderFit fit;
  for (const auto& [e, v] : points) {
    if (!(e > 0.0)) throw DomainError("fit_order: epsilon must be > 0");
    if (!(v > 0.0)) {
      fit.vanished = true;
      return fit;
    }
  }
  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [e, v] : points) {
    mx += std::log(e);
    my += std::log(v);
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [e, v] : points) {
    const double dx = std::log(e) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(v) - my);
  }
  if (sxx == 0.0) throw DomainError("fit_order: epsilons must not all be equal");
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (const auto& [e, v] : points) {
    const double r = std::log(v) - (my + fit.slope * (std::log(e) - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

const std::vector<std::string>& indicator_names() {
  static const std::vector<std::string> names{
      "pressure_gap", "density_dev_plus", "density_dev_minus", "pressure_dev",
      "u_variance", "div_norm", "alpha_oracle_err", "m7_constraint_residual",
      "m7_constraint_scale", "m7_normalized_residual"};
  return names;
}

double indicator_value(const LimitIndicators& ind, std::string_view name) {
  if (name == "pressure_gap") return ind.pressure_gap;
  if (name == "density_dev_plus") return ind.density_dev_plus;
  if (name == "density_dev_minus") return ind.density_dev_minus;
  if (name == "pressure_dev") return ind.pressure_dev;
  if (name == "u_variance") return ind.u_variance;
  if (name == "div_norm") return ind.div_norm;
  if (name == "alpha_oracle_err") return ind.alpha_oracle_err;
  if (name == "m7_constraint_residual") return ind.m7_constraint_residual;
  if (name == "m7_constraint_scale") return ind.m7_constraint_scale;
  if (name == "m7_normalized_residual")
    return ind.m7_constraint_scale > 0.0 ? ind.m7_constraint_residual / ind.m7_constraint_scale
                                         : 0.0;
  throw std::invalid_argument(fmt::format("unknown indicator '{}'", name));
}

namespace {

std::vector<double> column(const std::vector<SweepRun>& runs, std::string_view name) {
  std::vector<double> v;
  for (const auto& r : runs) v.push_back(indicator_value(r.final_indicators, name));
  return v;
}

Verdict strictly_decreasing(const std::vector<SweepRun>& runs, std::string_view name) {
  const std::vector<double> v = column(runs, name);
  Verdict out{fmt::format("{} strictly decreasing", name), true, ""};
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) out.passed = false;
  out.detail = fmt::format("{:.4e}", fmt::join(v, ", "));
  return out;
}

Verdict order_at_least(const std::vector<SweepRun>& runs, std::string_view name, double min) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : runs) pts.emplace_back(r.epsilon, indicator_value(r.final_indicators, name));
  const OrderFit f = fit_order(pts);
  Verdict out{fmt::format("{} order >= {}", name, min), f.vanished || f.slope >= min, ""};
  out.detail = f.vanished ? std::string("indicator vanished")
                          : fmt::format("slope {:.4f}, residual {:.3e}", f.slope, f.residual);
  return out;
}

}  // namespace

std::vector<Verdict> sweep_verdicts(ModelId model, const std::vector<SweepRun>& runs) {
  std::vector<Verdict> v;
  for (const auto& r : runs)
    if (!r.error.empty()) {
      v.push_back({fmt::format("run at epsilon {} completed", r.epsilon), false, r.error});
      return v;
    }
  switch (model) {
    case ModelId::M1:
      v.push_back(strictly_decreasing(runs, "u_variance"));
      break;
    case ModelId::M2:
    case ModelId::M3:
      v.push_back(strictly_decreasing(runs, "alpha_oracle_err"));
      v.push_back(strictly_decreasing(runs, "u_variance"));
      v.push_back(order_at_least(runs, "u_variance", 1.0));
      if (model == ModelId::M3) {
        v.push_back(order_at_least(runs, "pressure_gap", 1.5));
      } else {
        double worst = 0.0;
        for (const auto& r : runs) worst = std::max(worst, r.max_pressure_gap);
        v.push_back({"pressure_gap <= 1e-10 at all steps", worst <= 1e-10,
                     fmt::format("max {:.3e}", worst)});
      }
      break;
    case ModelId::M4:
      v.push_back(strictly_decreasing(runs, "pressure_dev"));
      v.push_back(order_at_least(runs, "pressure_dev", 1.0));
      break;
    case ModelId::M5:
    case ModelId::M6:
      v.push_back(strictly_decreasing(runs, "u_variance"));
      break;
    case ModelId::M7:
      v.push_back(strictly_decreasing(runs, "m7_normalized_residual"));
      break;
  }
  return v;
}

SweepReport mach_sweep(const RunConfig& base_config, const std::vector<double>& epsilons,
                       int workers) {
  if (epsilons.size() < 3) throw DomainError("an epsilon ladder needs at least 3 values");
  for (std::size_t k = 1; k < epsilons.size(); ++k)
    if (!(epsilons[k] < epsilons[k - 1]))
      throw DomainError("the epsilon ladder must be strictly decreasing");

  SweepReport rep;
  rep.base_config = base_config;
  rep.epsilons = epsilons;
  rep.runs.resize(epsilons.size());

  auto run_one = [&](std::size_t k) {
    SweepRun& run = rep.runs[k];
    run.epsilon = epsilons[k];
    RunConfig cfg = base_config;
    cfg.epsilon = epsilons[k];
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run.trajectory = simulate(cfg, make_well_prepared(cfg));
      run.final_indicators = run.trajectory.records.back().indicators;
      run.max_pressure_gap = run.trajectory.max_pressure_gap;
      run.steps = run.trajectory.steps;
    } catch (const std::exception& e) {
      run.error = e.what();
    }
    run.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  const std::size_t n_workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, epsilons.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < epsilons.size();) run_one(k);
  };
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  bool all_ok = true;
  for (const auto& r : rep.runs) all_ok = all_ok && r.error.empty();
  if (all_ok) {
    for (const auto& name : indicator_names()) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& r : rep.runs)
        pts.emplace_back(r.epsilon, indicator_value(r.final_indicators, name));
      rep.orders.emplace_back(name, fit_order(pts));
    }
  }
  rep.verdicts = sweep_verdicts(base_config.model, rep.runs);
  rep.passed = all_ok;
  for (const auto& v : rep.verdicts) rep.passed = rep.passed && v.passed;
  return rep;
}

}  // namespace lowmach
