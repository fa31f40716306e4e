#include "lowmach/eos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace lowmach {

double pressure_barotropic(double rho, double gamma) {
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw DomainError(fmt::format("pressure of negative or non-finite density {}", rho));
  return std::pow(rho, gamma);
}

double pressure_entropic(double rho, double s, double gamma) {
  const double p = pressure_barotropic(rho, gamma);
  return s == 0.0 ? p : p * std::exp(s);
}

double sound_speed(double rho, double s, double gamma) {
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw DomainError(fmt::format("sound speed of non-positive density {}", rho));
  return std::sqrt(gamma * pressure_entropic(rho, s, gamma) / rho);
}

namespace {

constexpr double kBracketDelta = 1e-14;
constexpr int kMaxClosureIters = 200;

// log p+(R+/a) - log p-(R-/(1-a)); strictly decreasing on (0,1).
struct LogPressureGap {
  double offset, gp, gm;
  double operator()(double a) const { return offset - gp * std::log(a) + gm * std::log1p(-a); }
  double slope(double a) const { return -gp / a - gm / (1.0 - a); }
};

ClosureSolution finish(double a, double R_plus, double R_minus, double s_plus, double s_minus,
                       double gp, double gm, int iters) {
  ClosureSolution sol;
  sol.alpha_plus = a;
  sol.rho_plus = R_plus / a;
  sol.rho_minus = R_minus / (1.0 - a);
  const double pp = pressure_entropic(sol.rho_plus, s_plus, gp);
  const double pm = pressure_entropic(sol.rho_minus, s_minus, gm);
  sol.pressure = pp;
  sol.residual = std::abs(pp - pm);
  sol.newton_iters = iters;
  return sol;
}

}  // namespace

ClosureSolution equilibrium_closure(double R_plus, double R_minus, double s_plus, double s_minus,
                                    double gamma_plus, double gamma_minus, double rel_tol) {
  if (!(R_plus > 0.0) || !(R_minus > 0.0))
    throw VanishingPhaseError(
        fmt::format("vanishing phase: R_plus = {}, R_minus = {}", R_plus, R_minus));
  if (!std::isfinite(R_plus) || !std::isfinite(R_minus) || !std::isfinite(s_plus) ||
      !std::isfinite(s_minus))
    throw DomainError("non-finite closure input");
  if (!(rel_tol > 0.0)) throw DomainError("closure tolerance must be positive");

  // Equal laws: the densities coincide and alpha is the mass fraction.
  if (gamma_plus == gamma_minus && s_plus == s_minus)
    return finish(R_plus / (R_plus + R_minus), R_plus, R_minus, s_plus, s_minus, gamma_plus,
                  gamma_minus, 0);

  const LogPressureGap h{gamma_plus * std::log(R_plus) + s_plus - gamma_minus * std::log(R_minus) -
                             s_minus,
                         gamma_plus, gamma_minus};
  double lo = kBracketDelta, hi = 1.0 - kBracketDelta;
  if (!(h(lo) > 0.0) || !(h(hi) < 0.0))
    throw SolverFailure("closure root outside (delta, 1-delta)", lo, hi);

  double a = std::clamp(R_plus / (R_plus + R_minus), lo, hi);
  int it = 0;
  // |h| is the relative pressure gap to first order; near alpha = 0 or 1 a few ulps of
  // alpha already move it by ~1e-13, so stop on the residual rather than on the step.
  for (; it < kMaxClosureIters; ++it) {
    const double g = h(a);
    if (std::abs(g) <= 0.25 * rel_tol) break;
    (g > 0.0 ? lo : hi) = a;
    double next = a - g / h.slope(a);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == a || std::nextafter(lo, hi) >= hi) {
      a = std::abs(h(lo)) < std::abs(h(hi)) ? lo : hi;
      break;
    }
    a = next;
  }
  ClosureSolution sol = finish(a, R_plus, R_minus, s_plus, s_minus, gamma_plus, gamma_minus, it + 1);
  const double scale = std::max(sol.pressure, sol.pressure + sol.residual);
  if (sol.residual > rel_tol * scale)
    throw SolverFailure(fmt::format("closure did not converge (residual {})", sol.residual), lo,
                        hi);
  return sol;
}

ClosureFields closure_project(const PhaseState& s, const PhysParams& params, double rel_tol) {
  const std::size_t n = s.R_plus.size();
  ClosureFields out;
  out.alpha.resize(n);
  out.rho_plus.resize(n);
  out.rho_minus.resize(n);
  out.p_plus.resize(n);
  out.p_minus.resize(n);
  const ModelId model = s.model;
  const bool entropic = has_entropy(model);

  for (std::size_t i = 0; i < n; ++i) {
    const double sp = entropic ? s.S_plus[i] : 0.0;
    const double sm = entropic ? s.S_minus[i] : 0.0;
    try {
      if (model == ModelId::M1) {
        out.alpha[i] = 1.0;
        out.rho_plus[i] = s.R_plus[i];
        out.rho_minus[i] = 0.0;
        out.p_plus[i] = out.p_minus[i] = pressure_barotropic(s.R_plus[i], params.gamma_plus);
      } else if (has_relaxation(model)) {
        const double a = s.alpha_plus[i];
        out.alpha[i] = a;
        out.rho_plus[i] = s.R_plus[i] / a;
        out.rho_minus[i] = s.R_minus[i] / (1.0 - a);
        out.p_plus[i] = pressure_entropic(out.rho_plus[i], sp, params.gamma_plus);
        out.p_minus[i] = pressure_entropic(out.rho_minus[i], sm, params.gamma_minus);
      } else {
        const auto sol = equilibrium_closure(s.R_plus[i], s.R_minus[i], sp, sm, params.gamma_plus,
                                             params.gamma_minus, rel_tol);
        out.alpha[i] = sol.alpha_plus;
        out.rho_plus[i] = sol.rho_plus;
        out.rho_minus[i] = sol.rho_minus;
        out.p_plus[i] = sol.pressure;
        out.p_minus[i] = pressure_entropic(sol.rho_minus, sm, params.gamma_minus);
      }
    } catch (const VanishingPhaseError& e) {
      throw VanishingPhaseError(fmt::format("cell {}: {}", i, e.what()));
    } catch (const SolverFailure& e) {
      throw SolverFailure(fmt::format("cell {}: {}", i, e.what()), e.bracket_lo(),
                          e.bracket_hi());
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("cell {}: {}", i, e.what()));
    }
  }
  return out;
}

}  // namespace lowmach
