#pragma once

#include <vector>

#include "lowmach/model.hpp"

namespace lowmach {

/// p = rho^gamma. Throws DomainError for negative (or non-finite) rho.
double pressure_barotropic(double rho, double gamma);

/// p = rho^gamma * exp(s). Identical to pressure_barotropic when s == 0.
double pressure_entropic(double rho, double s, double gamma);

/// c = sqrt(gamma p / rho). Throws DomainError for rho <= 0.
double sound_speed(double rho, double s, double gamma);

struct ClosureSolution {
  double alpha_plus = 0.5;
  double rho_plus = 1.0;
  double rho_minus = 1.0;
  double pressure = 1.0;
  int newton_iters = 0;
  double residual = 0.0;  // |p+ - p-| at termination
};

/// Raised when a partial mass is not strictly positive.
class VanishingPhaseError : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterative solve does not converge; carries the last bracket.
class SolverFailure : public Error {
 public:
  SolverFailure(const std::string& what, double lo, double hi) : Error(what), lo_(lo), hi_(hi) {}
  double bracket_lo() const { return lo_; }
  double bracket_hi() const { return hi_; }

 private:
  double lo_, hi_;
};

inline constexpr double kClosureRelTol = 1e-12;

/// Volume fraction alpha in (0,1) with (R+/alpha)^g+ e^s+ = (R-/(1-alpha))^g- e^s-.
///
/// Safeguarded Newton on the log-pressure difference, which is strictly decreasing in
/// alpha; bisection takes over whenever a Newton iterate leaves the current bracket.
/// `rel_tol` bounds |p+ - p-| relative to max(p+, p-).
ClosureSolution equilibrium_closure(double R_plus, double R_minus, double s_plus, double s_minus,
                                    double gamma_plus, double gamma_minus,
                                    double rel_tol = kClosureRelTol);

/// Per-cell thermodynamic fields.
struct ClosureFields {
  std::vector<double> alpha;
  std::vector<double> rho_plus;
  std::vector<double> rho_minus;
  std::vector<double> p_plus;
  std::vector<double> p_minus;
};

/// Thermodynamic fields of every cell.
///
/// Algebraic-closure models solve equilibrium_closure cell by cell (p+ == p- up to the
/// tolerance); relaxation models keep the stored alpha and evaluate each phase pressure.
/// M1 reports alpha = 1 and copies the single pressure into p_minus. Errors carry the cell index.
ClosureFields closure_project(const PhaseState& state, const PhysParams& params,
                              double rel_tol = kClosureRelTol);

}  // namespace lowmach
