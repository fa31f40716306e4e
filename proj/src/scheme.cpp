#include "lowmach/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "lowmach/diagnostics.hpp"

namespace lowmach {

namespace {

inline std::size_t wrap_index(long i, std::size_t n) {
  const long m = static_cast<long>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

double phase_speed(double p, double rho, double gamma) {
  return rho > 0.0 ? std::sqrt(gamma * p / rho) : 0.0;
}

bool single_velocity(ModelId m) { return !is_two_velocity(m); }

double mixture_density(const CellState& u, ModelId model) {
  return model == ModelId::M1 ? u.R_plus : u.R_plus + u.R_minus;
}

// Upwind advection q_t + v q_x = 0, non-conservative, first order.
void upwind_advect(std::vector<double>& q, const std::vector<double>& old,
                   const std::vector<double>& v, double dt_over_dx) {
  const std::size_t n = old.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double vp = std::max(v[i], 0.0), vm = std::min(v[i], 0.0);
    q[i] = old[i] - dt_over_dx * (vp * (old[i] - old[wrap_index(static_cast<long>(i) - 1, n)]) +
                                  vm * (old[(i + 1) % n] - old[i]));
  }
}

// Periodic tridiagonal system with constant off-diagonal `off` and diagonal `diag`
// (Sherman-Morrison on the cyclic corners).
std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& diag, double off,
                                             const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  auto thomas = [&](std::vector<double> b, std::vector<double> r) {
    std::vector<double> cp(n);
    cp[0] = off / b[0];
    r[0] /= b[0];
    for (std::size_t i = 1; i < n; ++i) {
      const double m = b[i] - off * cp[i - 1];
      cp[i] = off / m;
      r[i] = (r[i] - off * r[i - 1]) / m;
    }
    for (std::size_t i = n - 1; i-- > 0;) r[i] -= cp[i] * r[i + 1];
    return r;
  };
  const double gamma = -diag[0];
  std::vector<double> bb = diag;
  bb[0] -= gamma;
  bb[n - 1] -= off * off / gamma;
  std::vector<double> x = thomas(bb, rhs);
  std::vector<double> uvec(n, 0.0);
  uvec[0] = gamma;
  uvec[n - 1] = off;
  std::vector<double> z = thomas(bb, uvec);
  const double fact = (x[0] + off * x[n - 1] / gamma) / (1.0 + z[0] + off * z[n - 1] / gamma);
  for (std::size_t i = 0; i < n; ++i) x[i] -= fact * z[i];
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

CellState cell_at(const PhaseState& s, int i) {
  CellState c;
  const ModelId m = s.model;
  c.R_plus = s.R_plus[i];
  if (is_two_phase(m)) c.R_minus = s.R_minus[i];
  if (has_relaxation(m)) c.alpha = s.alpha_plus[i];
  if (is_two_velocity(m)) {
    c.m_plus = s.m_plus[i];
    c.m_minus = s.m_minus[i];
  } else {
    c.m_plus = s.m[i];
  }
  if (has_entropy(m)) {
    c.S_plus = s.S_plus[i];
    c.S_minus = s.S_minus[i];
  }
  return c;
}

namespace {

CellThermo thermo_from(const CellState& u, ModelId model, const PhysParams& params, double alpha,
                       double rho_p, double rho_m, double p_p, double p_m) {
  CellThermo t;
  t.alpha = alpha;
  t.p_plus = p_p;
  t.p_minus = p_m;
  t.c_plus = phase_speed(p_p, rho_p, params.gamma_plus);
  if (model == ModelId::M1) {
    t.c_minus = 0.0;
    t.p_mix = p_p;
  } else {
    t.c_minus = phase_speed(p_m, rho_m, params.gamma_minus);
    t.p_mix = alpha * p_p + (1.0 - alpha) * p_m;
  }
  t.c_max = std::max(t.c_plus, t.c_minus);
  if (is_two_velocity(model)) {
    t.u_plus = u.m_plus / u.R_plus;
    t.u_minus = u.m_minus / u.R_minus;
  } else {
    t.u_plus = t.u_minus = u.m_plus / mixture_density(u, model);
  }
  return t;
}

}  // namespace

CellThermo cell_thermo(const CellState& u, ModelId model, const PhysParams& params) {
  PhaseState one = PhaseState::zeros(model, 1);
  one.R_plus[0] = u.R_plus;
  if (is_two_phase(model)) one.R_minus[0] = u.R_minus;
  if (has_relaxation(model)) one.alpha_plus[0] = u.alpha;
  if (is_two_velocity(model)) {
    one.m_plus[0] = u.m_plus;
    one.m_minus[0] = u.m_minus;
  } else {
    one.m[0] = u.m_plus;
  }
  if (has_entropy(model)) {
    one.S_plus[0] = u.S_plus;
    one.S_minus[0] = u.S_minus;
  }
  const ClosureFields th = closure_project(one, params);
  return thermo_from(u, model, params, th.alpha[0], th.rho_plus[0], th.rho_minus[0], th.p_plus[0],
                     th.p_minus[0]);
}

CellThermo cell_thermo(const PhaseState& s, const ClosureFields& th, int i,
                       const PhysParams& params) {
  return thermo_from(cell_at(s, i), s.model, params, th.alpha[i], th.rho_plus[i], th.rho_minus[i],
                     th.p_plus[i], th.p_minus[i]);
}

FluxVector conservative_vector(const CellState& u, ModelId model) {
  const double sp = u.R_plus * u.S_plus, sm = u.R_minus * u.S_minus;
  if (single_velocity(model)) return {u.R_plus, u.R_minus, u.m_plus, 0.0, sp, sm};
  return {u.R_plus, u.R_minus, u.m_plus, u.m_minus, sp, sm};
}

FluxVector physical_flux(const CellState& u, const CellThermo& th, ModelId model, double eps) {
  const double sp = u.R_plus * u.S_plus, sm = u.R_minus * u.S_minus;
  if (single_velocity(model)) {
    const double v = th.u_plus;
    return {u.R_plus * v, u.R_minus * v, u.m_plus * v + th.p_mix / (eps * eps), 0.0, sp * v,
            sm * v};
  }
  return {u.R_plus * th.u_plus, u.R_minus * th.u_minus, u.m_plus * th.u_plus,
          u.m_minus * th.u_minus, sp * th.u_plus, sm * th.u_minus};
}

namespace {

double local_speed(const CellThermo& t, ModelId model, double eps) {
  if (single_velocity(model)) return std::abs(t.u_plus) + t.c_max / eps;
  return std::max(std::abs(t.u_plus) + t.c_plus / eps, std::abs(t.u_minus) + t.c_minus / eps);
}

void require_finite(const CellState& u) {
  for (double v : {u.R_plus, u.R_minus, u.alpha, u.m_plus, u.m_minus, u.S_plus, u.S_minus})
    if (!std::isfinite(v)) throw DomainError("non-finite flux input");
}

}  // namespace

FluxVector rusanov_flux(const CellState& left, const CellState& right, ModelId model,
                        const PhysParams& params, double eps) {
  require_finite(left);
  require_finite(right);
  return rusanov_flux(left, cell_thermo(left, model, params), right,
                      cell_thermo(right, model, params), model, eps);
}

FluxVector rusanov_flux(const CellState& left, const CellThermo& tl, const CellState& right,
                        const CellThermo& tr, ModelId model, double eps) {
  const FluxVector fl = physical_flux(left, tl, model, eps);
  const FluxVector fr = physical_flux(right, tr, model, eps);
  const FluxVector ul = conservative_vector(left, model);
  const FluxVector ur = conservative_vector(right, model);
  const double s = std::max(local_speed(tl, model, eps), local_speed(tr, model, eps));
  FluxVector f{};
  for (std::size_t k = 0; k < f.size(); ++k)
    f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * s * (ur[k] - ul[k]);
  return f;
}

FluxVector hllc_flux(const CellState& left, const CellThermo& tl, const CellState& right,
                     const CellThermo& tr, ModelId model, double eps) {
  if (!single_velocity(model)) throw DomainError("HLLC flux is defined for single-velocity models");
  const double rl = mixture_density(left, model), rr = mixture_density(right, model);
  const double ul = tl.u_plus, ur = tr.u_plus;
  const double sl = std::min(ul - tl.c_max / eps, ur - tr.c_max / eps);
  const double sr = std::max(ul + tl.c_max / eps, ur + tr.c_max / eps);
  const FluxVector fl = physical_flux(left, tl, model, eps);
  if (sl >= 0.0) return fl;
  const FluxVector fr = physical_flux(right, tr, model, eps);
  if (sr <= 0.0) return fr;

  const double ql = rl * (sl - ul), qr = rr * (sr - ur);
  const double s_star = ((tr.p_mix - tl.p_mix) / (eps * eps) + ql * ul - qr * ur) / (ql - qr);

  auto star = [&](const CellState& u, const FluxVector& f, double rho, double vel, double sk) {
    const double chi = (sk - vel) / (sk - s_star);
    const FluxVector uk = conservative_vector(u, model);
    const FluxVector us{chi * u.R_plus, chi * u.R_minus, chi * rho * s_star, 0.0,
                        chi * u.R_plus * u.S_plus, chi * u.R_minus * u.S_minus};
    FluxVector out{};
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = f[k] + sk * (us[k] - uk[k]);
    return out;
  };
  return s_star >= 0.0 ? star(left, fl, rl, ul, sl) : star(right, fr, rr, ur, sr);
}

FluxVector split_dissipation_flux(const CellState& left, const CellThermo& tl,
                                  const CellState& right, const CellThermo& tr, ModelId model,
                                  double eps) {
  if (single_velocity(model)) throw DomainError("split flux is defined for two-velocity models");
  const FluxVector fl = physical_flux(left, tl, model, eps);
  const FluxVector fr = physical_flux(right, tr, model, eps);
  const FluxVector ul = conservative_vector(left, model);
  const FluxVector ur = conservative_vector(right, model);
  const double ap = std::max(std::abs(tl.u_plus), std::abs(tr.u_plus));
  const double am = std::max(std::abs(tl.u_minus), std::abs(tr.u_minus));
  // slots 0, 2, 4 belong to phase +, slots 1, 3, 5 to phase -
  const double a[6] = {ap, am, ap, am, ap, am};
  FluxVector f{};
  for (std::size_t k = 0; k < f.size(); ++k)
    f[k] = 0.5 * (fl[k] + fr[k]) - 0.5 * a[k] * (ur[k] - ul[k]);
  const double sp = std::max(tl.c_plus, tr.c_plus) / eps;
  const double sm = std::max(tl.c_minus, tr.c_minus) / eps;
  f[2] -= 0.25 * sp * (left.R_plus + right.R_plus) * (tr.u_plus - tl.u_plus);
  f[3] -= 0.25 * sm * (left.R_minus + right.R_minus) * (tr.u_minus - tl.u_minus);
  return f;
}

// ---------------------------------------------------------------------------------------------

double max_wave_speed(const PhaseState& s, const ClosureFields& th, const RunConfig& config) {
  double smax = 0.0;
  for (int i = 0; i < s.n_cells(); ++i) {
    const double v = local_speed(cell_thermo(s, th, i, config.params), s.model, config.epsilon);
    if (!std::isfinite(v)) throw DomainError(fmt::format("non-finite wave speed in cell {}", i));
    smax = std::max(smax, v);
  }
  return smax;
}

double cfl_dt(double dx, double cfl, double max_speed, double remaining) {
  if (!std::isfinite(max_speed) || !(max_speed > 0.0))
    throw DomainError(fmt::format("invalid maximum wave speed {}", max_speed));
  return std::min(cfl * dx / max_speed, remaining);
}

double cfl_dt(const PhaseState& s, const RunConfig& config) {
  const ClosureFields th = closure_project(s, config.params);
  return cfl_dt(config.grid.dx(), config.cfl, max_wave_speed(s, th, config),
                config.t_end - s.time);
}

double interface_pressure(const PintSpec& pint, ModelId model, double p_plus, double p_minus) {
  (void)model;
  (void)p_minus;
  if (pint.rule == PintRule::Constant) return pint.value;
  // Algebraic models: p+ == p- is the equilibrium pressure. M7: phase + pressure.
  return p_plus;
}

NonconservativeTerms nonconservative_rhs(const PhaseState& s, const ClosureFields& th,
                                         const RunConfig& config) {
  const std::size_t n = s.R_plus.size();
  NonconservativeTerms t;
  t.grad_p_plus.assign(n, 0.0);
  t.grad_p_minus.assign(n, 0.0);
  t.pint_grad_alpha.assign(n, 0.0);
  t.rate_m_plus.assign(n, 0.0);
  t.rate_m_minus.assign(n, 0.0);
  if (!is_two_velocity(s.model)) return t;

  const double inv2dx = 1.0 / (2.0 * config.grid.dx());
  const double inv_eps2 = 1.0 / (config.epsilon * config.epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n, im = wrap_index(static_cast<long>(i) - 1, n);
    const double a = th.alpha[i];
    t.grad_p_plus[i] = a * (th.p_plus[ip] - th.p_plus[im]) * inv2dx * inv_eps2;
    t.grad_p_minus[i] = (1.0 - a) * (th.p_minus[ip] - th.p_minus[im]) * inv2dx * inv_eps2;
    const double pint = interface_pressure(config.params.pint, s.model, th.p_plus[i], th.p_minus[i]);
    t.pint_grad_alpha[i] = pint * (th.alpha[ip] - th.alpha[im]) * inv2dx;
    t.rate_m_plus[i] = -(t.grad_p_plus[i] + t.pint_grad_alpha[i]);
    t.rate_m_minus[i] = -(t.grad_p_minus[i] - t.pint_grad_alpha[i]);
  }
  return t;
}

namespace {

std::vector<double> mixture_velocity(const PhaseState& s) {
  const std::size_t n = s.R_plus.size();
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i)
    u[i] = s.m[i] / (s.R_plus[i] + (s.model == ModelId::M1 ? 0.0 : s.R_minus[i]));
  return u;
}

}  // namespace

ViscousTerms viscous_rhs(const PhaseState& s, const PhysParams& params, const Grid1D& grid) {
  const std::size_t n = s.R_plus.size();
  ViscousTerms t;
  t.rate_m.assign(n, 0.0);
  if (!is_viscous(s.model)) return t;
  const double nu = 2.0 * params.mu_visc + params.lambda_visc;
  const double dx = grid.dx();
  const std::vector<double> u = mixture_velocity(s);
  double diss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t ip = (i + 1) % n, im = wrap_index(static_cast<long>(i) - 1, n);
    t.rate_m[i] = nu * (u[ip] - 2.0 * u[i] + u[im]) / (dx * dx);
    const double grad = (u[ip] - u[i]) / dx;
    diss += nu * grad * grad;
  }
  t.dissipation_rate = diss * dx;
  return t;
}

double viscous_implicit_step(PhaseState& s, double dt, const PhysParams& params,
                             const Grid1D& grid) {
  if (!is_viscous(s.model)) return 0.0;
  const std::size_t n = s.R_plus.size();
  const double nu = 2.0 * params.mu_visc + params.lambda_visc;
  const double dx = grid.dx();
  const double theta = dt * nu / (dx * dx);
  std::vector<double> rho(n), diag(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = s.R_plus[i] + (s.model == ModelId::M1 ? 0.0 : s.R_minus[i]);
    diag[i] = rho[i] + 2.0 * theta;
  }
  const std::vector<double> u = solve_cyclic_tridiagonal(diag, -theta, s.m);
  double diss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.m[i] = rho[i] * u[i];
    const double grad = (u[(i + 1) % n] - u[i]) / dx;
    diss += grad * grad;
  }
  return dt * nu * diss * dx;
}

void drag_step(PhaseState& s, double dt, const PhysParams& params) {
  if (!is_two_velocity(s.model) || params.eta_drag <= 0.0) return;
  for (std::size_t i = 0; i < s.R_plus.size(); ++i) {
    const double rp = s.R_plus[i], rm = s.R_minus[i];
    const double w = s.m_plus[i] / rp - s.m_minus[i] / rm;
    if (w == 0.0) continue;
    // |w|' = -k |w|^2, backward Euler in closed form.
    const double k = (1.0 / rp + 1.0 / rm) / params.eta_drag;
    const double a = std::abs(w);
    const double a_new = 2.0 * a / (1.0 + std::sqrt(1.0 + 4.0 * dt * k * a));
    const double w_new = std::copysign(a_new, w);
    const double total = s.m_plus[i] + s.m_minus[i];
    const double mass = rp + rm;
    const double uc = total / mass;
    s.m_plus[i] = rp * (uc + rm / mass * w_new);
    s.m_minus[i] = total - s.m_plus[i];
  }
}

// ---------------------------------------------------------------------------------------------

namespace {

// 8-point Gauss-Legendre on [-1, 1]
constexpr double kGlNodes[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                0.9602898564975363};
constexpr double kGlWeights[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                  0.1012285362903763};

template <typename F>
double gauss8(const F& g, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int j = 0; j < 4; ++j) s += kGlWeights[j] * (g(c - h * kGlNodes[j]) + g(c + h * kGlNodes[j]));
  return s * h;
}

template <typename F>
double adaptive_gauss(const F& g, double a, double b, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double l = gauss8(g, a, m), r = gauss8(g, m, b);
  if (depth == 0 || std::abs(l + r - whole) <= tol) return l + r;
  return adaptive_gauss(g, a, m, l, 0.5 * tol, depth - 1) +
         adaptive_gauss(g, m, b, r, 0.5 * tol, depth - 1);
}

struct RelaxOde {
  double R_plus, R_minus, S_plus, S_minus, gp, gm;

  double p_plus(double a) const { return pressure_entropic(R_plus / a, S_plus, gp); }
  double p_minus(double a) const { return pressure_entropic(R_minus / (1.0 - a), S_minus, gm); }
  double gap(double a) const { return p_plus(a) - p_minus(a); }
  // f(a) = a (1-a) (p+ - p-), strictly decreasing in a
  double f(double a) const { return a * (1.0 - a) * gap(a); }
  double fprime(double a) const {
    const double pp = p_plus(a), pm = p_minus(a);
    return (1.0 - 2.0 * a) * (pp - pm) + a * (1.0 - a) * (-gp * pp / a - gm * pm / (1.0 - a));
  }
  // internal energy at frozen masses; dE/da = -(p+ - p-)
  double energy(double a) const {
    return a * p_plus(a) / (gp - 1.0) + (1.0 - a) * p_minus(a) / (gm - 1.0);
  }
};

RelaxedCell relax_backward_euler(const RelaxOde& ode, double alpha_old, double k) {
  RelaxedCell out;
  out.alpha = alpha_old;
  double lo = 1e-14, hi = 1.0 - 1e-14;
  double a = alpha_old;
  int it = 0;
  bool converged = false;
  for (; it < 200; ++it) {
    const double F = a - alpha_old - k * ode.f(a);
    if (F == 0.0) {
      converged = true;
      break;
    }
    (F < 0.0 ? lo : hi) = a;
    double next = a - F / (1.0 - k * ode.fprime(a));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const bool small = std::abs(next - a) <= 4.0 * std::numeric_limits<double>::epsilon() * a;
    a = next;
    if (small || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon()) {
      converged = true;
      break;
    }
  }
  if (!converged) throw SolverFailure("relaxation Newton did not converge", lo, hi);
  out.alpha = a;
  out.iters = it + 1;
  return out;
}

// With a = a* + d0 e^z the ODE reads dz/dt = f(a) / (a - a*), so the state after a scaled
// time k solves int_z^0 q(s) ds = |f'(a*)| k with q = f'(a*) (a - a*) / f(a) -> 1 at a*.
// Near a* f(a) loses digits to cancellation; there q is replaced by its first-order
// expansion (error O(d^2) on an O(d) weight) 1 - f''(a*)/(2 f'(a*)) (a - a*).
RelaxedCell relax_exact(const RelaxOde& ode, double alpha_old, double k) {
  RelaxedCell out;
  out.alpha = alpha_old;
  double astar = equilibrium_closure(ode.R_plus, ode.R_minus, ode.S_plus, ode.S_minus, ode.gp,
                                     ode.gm)
                     .alpha_plus;
  for (int j = 0; j < 3; ++j) {
    const double fs = ode.f(astar);
    if (fs == 0.0) break;
    const double next = astar - fs / ode.fprime(astar);
    if (!(next > 0.0 && next < 1.0)) break;
    astar = next;
  }
  const double d0 = alpha_old - astar;
  if (d0 == 0.0) return out;
  const double fps = ode.fprime(astar);
  const double h = 1e-5 * std::min(astar, 1.0 - astar);
  const double curv = (ode.fprime(astar + h) - ode.fprime(astar - h)) / (2.0 * h) / (2.0 * fps);
  const double near = 1e-4 * std::min(astar, 1.0 - astar);
  auto q = [&](double s) {
    const double d = d0 * std::exp(s);
    if (std::abs(d) <= near) return 1.0 - curv * d;
    return fps * d / ode.f(astar + d);
  };
  auto integral = [&](double a, double b) {  // int_a^b q, a < b
    double sum = 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(b - a)));
    const double w = (b - a) / panels;
    for (int j = 0; j < panels; ++j) {
      const double x0 = a + j * w, x1 = x0 + w;
      sum += adaptive_gauss(q, x0, x1, gauss8(q, x0, x1), 1e-13 * w, 8);
    }
    return sum;
  };

  constexpr double kZFloor = -40.0;  // e^-40 |d0| is below double resolution of alpha
  const double K = -fps * k;
  if (K > 20.0 && integral(kZFloor, 0.0) <= K) {
    out.alpha = astar;
    out.iters = 1;
    return out;
  }
  // G(z) = int_z^0 q - K, decreasing in z, G(0) < 0 < G(kZFloor)
  double lo = kZFloor, hi = 0.0;
  double z = 0.0, G = -K;
  int it = 0;
  for (; it < 100; ++it) {
    (G < 0.0 ? hi : lo) = z;
    double next = z + G / q(z);
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    G += next < z ? integral(next, z) : -integral(z, next);
    const double step = std::abs(next - z);
    z = next;
    if (std::abs(G) <= 1e-14 * std::max(1.0, K) || step <= 1e-14 || hi - lo <= 1e-14) break;
  }
  if (it == 100) throw SolverFailure("relaxation integrator did not converge", lo, hi);
  out.alpha = astar + d0 * std::exp(z);
  out.iters = it + 1;
  return out;
}

}  // namespace

RelaxedCell relax_cell(double R_plus, double R_minus, double S_plus, double S_minus,
                       double alpha_old, double dt, const PhysParams& params, double eps) {
  const RelaxOde ode{R_plus, R_minus, S_plus, S_minus, params.gamma_plus, params.gamma_minus};
  const double k = dt / (eps * eps * params.tau_relax);
  // cells within the closure tolerance of equilibrium are fixed points
  const double pp = ode.p_plus(alpha_old), pm = ode.p_minus(alpha_old);
  if (k == 0.0 || std::abs(pp - pm) <= kClosureRelTol * std::max(pp, pm))
    return RelaxedCell{alpha_old, 0, 0.0};
  RelaxedCell out = params.relax_scheme == RelaxScheme::BackwardEuler
                        ? relax_backward_euler(ode, alpha_old, k)
                        : relax_exact(ode, alpha_old, k);
  out.energy_drop = std::max(0.0, (ode.energy(alpha_old) - ode.energy(out.alpha)) / (eps * eps));
  return out;
}

RelaxationResult relaxation_step(const PhaseState& s, double dt, const PhysParams& params,
                                 double eps, double dx) {
  if (!has_relaxation(s.model)) throw DomainError("relaxation_step requires M3 or M7");
  RelaxationResult r{s, 0.0, 0};
  const bool entropic = has_entropy(s.model);
  for (std::size_t i = 0; i < s.R_plus.size(); ++i) {
    try {
      const RelaxedCell c = relax_cell(s.R_plus[i], s.R_minus[i], entropic ? s.S_plus[i] : 0.0,
                                       entropic ? s.S_minus[i] : 0.0, s.alpha_plus[i], dt, params,
                                       eps);
      r.state.alpha_plus[i] = c.alpha;
      r.dissipation += c.energy_drop;
      r.max_iters = std::max(r.max_iters, c.iters);
    } catch (const SolverFailure& e) {
      throw SolverFailure(fmt::format("cell {}: {}", i, e.what()), e.bracket_lo(), e.bracket_hi());
    }
  }
  r.dissipation *= dx;
  return r;
}

// ---------------------------------------------------------------------------------------------

PhaseState fv_update(const PhaseState& s, const ClosureFields& th, double dt,
                     const RunConfig& config) {
  const ModelId model = s.model;
  const std::size_t n = s.R_plus.size();
  const double eps = config.epsilon;
  const double lam = dt / config.grid.dx();

  std::vector<CellThermo> ct(n);
  std::vector<CellState> cs(n);
  for (std::size_t i = 0; i < n; ++i) {
    cs[i] = cell_at(s, static_cast<int>(i));
    ct[i] = cell_thermo(s, th, static_cast<int>(i), config.params);
  }
  std::vector<FluxVector> face(n);  // face[i] between cells i and i+1
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = (i + 1) % n;
    if (config.flux == FluxKind::Rusanov)
      face[i] = rusanov_flux(cs[i], ct[i], cs[r], ct[r], model, eps);
    else if (single_velocity(model))
      face[i] = hllc_flux(cs[i], ct[i], cs[r], ct[r], model, eps);
    else
      face[i] = split_dissipation_flux(cs[i], ct[i], cs[r], ct[r], model, eps);
  }

  PhaseState out = s;
  const bool two_vel = is_two_velocity(model);
  NonconservativeTerms nc;
  if (two_vel) nc = nonconservative_rhs(s, th, config);

  for (std::size_t i = 0; i < n; ++i) {
    const FluxVector& fr = face[i];
    const FluxVector& fl = face[wrap_index(static_cast<long>(i) - 1, n)];
    out.R_plus[i] = s.R_plus[i] - lam * (fr[0] - fl[0]);
    if (is_two_phase(model)) out.R_minus[i] = s.R_minus[i] - lam * (fr[1] - fl[1]);
    if (two_vel) {
      out.m_plus[i] = s.m_plus[i] - lam * (fr[2] - fl[2]) + dt * nc.rate_m_plus[i];
      out.m_minus[i] = s.m_minus[i] - lam * (fr[3] - fl[3]) + dt * nc.rate_m_minus[i];
    } else {
      out.m[i] = s.m[i] - lam * (fr[2] - fl[2]);
    }
  }

  if (has_relaxation(model)) {
    // The interface velocity is u+ for M7 and the mixture velocity for M3.
    std::vector<double> up(n);
    for (std::size_t i = 0; i < n; ++i) up[i] = ct[i].u_plus;
    upwind_advect(out.alpha_plus, s.alpha_plus, up, lam);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!(out.R_plus[i] > 0.0) || (is_two_phase(model) && !(out.R_minus[i] > 0.0)))
      throw Error(fmt::format("positivity failure in cell {}, reduce cfl", i));
    if (has_entropy(model)) {
      const FluxVector& fr = face[i];
      const FluxVector& fl = face[wrap_index(static_cast<long>(i) - 1, n)];
      out.S_plus[i] = (s.R_plus[i] * s.S_plus[i] - lam * (fr[4] - fl[4])) / out.R_plus[i];
      out.S_minus[i] = (s.R_minus[i] * s.S_minus[i] - lam * (fr[5] - fl[5])) / out.R_minus[i];
    }
    if (has_relaxation(model) && !(out.alpha_plus[i] > 0.0 && out.alpha_plus[i] < 1.0))
      throw Error(fmt::format("volume fraction left (0,1) in cell {}, reduce cfl", i));
  }
  return out;
}

PhaseState strang_step(const PhaseState& s, const RunConfig& config, StepStats* stats) {
  const ModelId model = s.model;
  const double dx = config.grid.dx();
  const ClosureFields th0 = closure_project(s, config.params);
  const double speed = max_wave_speed(s, th0, config);
  const double remaining = config.t_end - s.time;
  const double dt = cfl_dt(dx, config.cfl, speed, remaining);

  StepStats st;
  st.dt = dt;
  st.max_wave_speed = speed;

  PhaseState cur = s;
  ClosureFields th = th0;
  if (has_relaxation(model)) {
    RelaxationResult r = relaxation_step(cur, 0.5 * dt, config.params, config.epsilon, dx);
    cur = std::move(r.state);
    st.dissipated_relaxation += r.dissipation;
    st.relax_newton_iters = std::max(st.relax_newton_iters, r.max_iters);
    th = closure_project(cur, config.params);
  }

  cur = fv_update(cur, th, dt, config);

  if (is_viscous(model)) st.dissipated_viscous = viscous_implicit_step(cur, dt, config.params, config.grid);
  drag_step(cur, dt, config.params);

  if (has_relaxation(model)) {
    RelaxationResult r = relaxation_step(cur, 0.5 * dt, config.params, config.epsilon, dx);
    cur = std::move(r.state);
    st.dissipated_relaxation += r.dissipation;
    st.relax_newton_iters = std::max(st.relax_newton_iters, r.max_iters);
  }

  cur.time = dt == remaining ? config.t_end : s.time + dt;
  if (stats) *stats = st;
  return cur;
}

Trajectory simulate(const RunConfig& config, const PhaseState& init) {
  if (auto errs = validate(config); !errs.empty())
    throw Error(fmt::format("invalid configuration: {}", fmt::join(errs, "; ")));
  if (auto errs = check_state(init, config.model, config.grid.n_cells); !errs.empty())
    throw Error(fmt::format("invalid initial state: {}", fmt::join(errs, "; ")));

  Trajectory traj;
  double diss_visc = 0.0, diss_relax = 0.0;
  auto record = [&](const PhaseState& st, int step, const StepStats& last) {
    const ClosureFields th = closure_project(st, config.params);
    Record r;
    r.step = step;
    r.state = st;
    r.energy = energy_total(st, th, config);
    r.energy.dissipated_viscous = diss_visc;
    r.energy.dissipated_relaxation = diss_relax;
    r.indicators = indicators(st, th, config);
    r.last_step = last;
    traj.max_pressure_gap = std::max(traj.max_pressure_gap, r.indicators.pressure_gap);
    traj.records.push_back(std::move(r));
  };

  PhaseState cur = init;
  record(cur, 0, StepStats{});
  int step = 0;
  while (cur.time < config.t_end) {
    ++step;
    StepStats st;
    try {
      // The gap of the state about to be advanced; the final state is covered by record().
      if (is_two_phase(config.model) && step > 1) {
        const ClosureFields th = closure_project(cur, config.params);
        for (std::size_t i = 0; i < th.p_plus.size(); ++i)
          traj.max_pressure_gap =
              std::max(traj.max_pressure_gap, std::abs(th.p_plus[i] - th.p_minus[i]));
      }
      cur = strang_step(cur, config, &st);
    } catch (const Error& e) {
      throw Error(fmt::format("step {}: {}", step, e.what()));
    }
    diss_visc += st.dissipated_viscous;
    diss_relax += st.dissipated_relaxation;
    const bool done = !(cur.time < config.t_end);
    if (step % config.output_stride == 0 || done) record(cur, step, st);
  }
  traj.steps = step;
  return traj;
}

}  // namespace lowmach
