#include "lowmach/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "lowmach/initdata.hpp"

namespace lowmach {

namespace {

double l2(const std::vector<double>& v, double dx) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s * dx);
}

std::vector<double> central_derivative(const std::vector<double>& v, double dx) {
  const std::size_t n = v.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = (v[(i + 1) % n] - v[(i + n - 1) % n]) / (2.0 * dx);
  return d;
}

}  // namespace

EnergyBreakdown energy_total(const PhaseState& s, const RunConfig& config) {
  return energy_total(s, closure_project(s, config.params), config);
}

EnergyBreakdown energy_total(const PhaseState& s, const ClosureFields& th, const RunConfig& config) {
  EnergyBreakdown e;
  const double dx = config.grid.dx();
  const double inv_eps2 = 1.0 / (config.epsilon * config.epsilon);
  const double gp = config.params.gamma_plus, gm = config.params.gamma_minus;
  const ModelId model = s.model;
  const std::size_t n = s.R_plus.size();
  double kin = 0.0, internal = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_two_velocity(model)) {
      kin += 0.5 * (s.m_plus[i] * s.m_plus[i] / s.R_plus[i] +
                    s.m_minus[i] * s.m_minus[i] / s.R_minus[i]);
    } else {
      const double rho = s.R_plus[i] + (model == ModelId::M1 ? 0.0 : s.R_minus[i]);
      kin += 0.5 * s.m[i] * s.m[i] / rho;
    }
    // alpha rho^gamma e^S = alpha p
    if (model == ModelId::M1) {
      internal += th.p_plus[i] / (gp - 1.0);
    } else {
      internal += th.alpha[i] * th.p_plus[i] / (gp - 1.0) +
                  (1.0 - th.alpha[i]) * th.p_minus[i] / (gm - 1.0);
    }
  }
  e.kinetic = kin * dx;
  e.internal = internal * dx * inv_eps2;
  return e;
}

EnergyAuditReport energy_audit(const Trajectory& traj, const RunConfig& config, double tol) {
  (void)config;
  EnergyAuditReport rep;
  if (traj.records.empty()) {
    rep.message = "empty trajectory";
    return rep;
  }
  const double e0 = traj.records.front().energy.total();
  const double scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
  double prev = e0;
  rep.worst_violation = 0.0;
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const double e = traj.records[k].energy.total();
    const double growth_from_start = (e - e0) / scale;
    const double growth_from_prev = (e - prev) / scale;
    const double v = std::max(growth_from_start, growth_from_prev);
    if (v > rep.worst_violation) {
      rep.worst_violation = v;
      rep.worst_record = static_cast<int>(k);
    }
    prev = e;
  }
  rep.passed = rep.worst_violation <= tol;
  rep.message = fmt::format("{}: worst relative energy growth {:.3e} at record {} (tol {:.1e})",
                            rep.passed ? "pass" : "FAIL", rep.worst_violation, rep.worst_record,
                            tol);
  return rep;
}

std::vector<double> limit_velocity(const PhaseState& s, const ClosureFields& th) {
  const std::size_t n = s.R_plus.size();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (is_two_velocity(s.model)) {
      const double a = th.alpha[i];
      v[i] = a * s.m_plus[i] / s.R_plus[i] + (1.0 - a) * s.m_minus[i] / s.R_minus[i];
    } else {
      const double rho = s.R_plus[i] + (s.model == ModelId::M1 ? 0.0 : s.R_minus[i]);
      v[i] = s.m[i] / rho;
    }
  }
  return v;
}

LimitIndicators indicators(const PhaseState& s, const RunConfig& config) {
  return indicators(s, closure_project(s, config.params), config);
}

LimitIndicators indicators(const PhaseState& s, const ClosureFields& th, const RunConfig& config) {
  LimitIndicators ind;
  const ModelId model = s.model;
  const double dx = config.grid.dx();
  const double eps2 = config.epsilon * config.epsilon;
  const double c0 = config.init.c0;
  const double gp = config.params.gamma_plus, gm = config.params.gamma_minus;
  const std::size_t n = s.R_plus.size();
  const bool entropic = has_entropy(model);

  for (std::size_t i = 0; i < n; ++i) {
    const double sp = entropic ? s.S_plus[i] : 0.0;
    const double sm = entropic ? s.S_minus[i] : 0.0;
    ind.pressure_dev = std::max(ind.pressure_dev, std::abs(th.p_plus[i] - c0));
    ind.density_dev_plus =
        std::max(ind.density_dev_plus, std::abs(th.rho_plus[i] - limit_density(c0, sp, gp)));
    if (model != ModelId::M1) {
      ind.pressure_gap = std::max(ind.pressure_gap, std::abs(th.p_plus[i] - th.p_minus[i]));
      ind.pressure_dev = std::max(ind.pressure_dev, std::abs(th.p_minus[i] - c0));
      ind.density_dev_minus =
          std::max(ind.density_dev_minus, std::abs(th.rho_minus[i] - limit_density(c0, sm, gm)));
    }
  }

  std::vector<double> v = limit_velocity(s, th);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = v[i] - mean;
  ind.u_variance = l2(dev, dx);
  ind.div_norm = l2(central_derivative(v, dx), dx);

  if (is_two_phase(model) && !is_two_velocity(model)) {
    const LimitState lim =
        exact_limit_state(seeded_init(config).alpha_profile, config.init.u_mean, s.time, config.grid);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err += std::abs(th.alpha[i] - lim.alpha[i]);
    ind.alpha_oracle_err = err * dx;
  }

  if (model == ModelId::M7) {
    std::vector<double> up(n);
    for (std::size_t i = 0; i < n; ++i) up[i] = s.m_plus[i] / s.R_plus[i];
    const std::vector<double> dup = central_derivative(up, dx);
    std::vector<double> res(n), compression(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double a = th.alpha[i];
      compression[i] = a * dup[i];
      res[i] = compression[i] +
               a * (1.0 - a) * (th.p_plus[i] - th.p_minus[i]) / (eps2 * config.params.tau_relax);
    }
    ind.m7_constraint_residual = l2(res, dx);
    ind.m7_constraint_scale = l2(compression, dx);
  }
  return ind;
}

}  // namespace lowmach
