#pragma once

#include <array>
#include <vector>

#include "lowmach/eos.hpp"
#include "lowmach/model.hpp"
#include "lowmach/trajectory.hpp"

namespace lowmach {

// ---------------------------------------------------------------------------------------------
// Single-cell building blocks

/// One cell of a PhaseState. Single-velocity models keep the mixture momentum in m_plus;
/// alpha is only meaningful for relaxation models (M3, M7).
struct CellState {
  double R_plus = 0.0;
  double R_minus = 0.0;
  double alpha = 1.0;
  double m_plus = 0.0;
  double m_minus = 0.0;
  double S_plus = 0.0;
  double S_minus = 0.0;
};

struct CellThermo {
  double alpha = 1.0;
  double p_plus = 0.0;
  double p_minus = 0.0;
  double c_plus = 0.0;
  double c_minus = 0.0;
  double u_plus = 0.0;   // phase velocities; equal for single-velocity models
  double u_minus = 0.0;
  double p_mix = 0.0;    // a+ p+ + a- p-, the conservative momentum pressure
  double c_max = 0.0;    // max phase sound speed
};

CellState cell_at(const PhaseState& s, int i);
CellThermo cell_thermo(const CellState& u, ModelId model, const PhysParams& params);
CellThermo cell_thermo(const PhaseState& s, const ClosureFields& thermo, int i,
                       const PhysParams& params);

/// Conservative variables (R+, R-, m+, m-, R+S+, R-S-); single-velocity models use slot 2
/// for the mixture momentum and leave slot 3 at zero, isentropic models leave the partial
/// entropies at zero. Pressure enters the flux only for single-velocity models; two-velocity
/// models carry it in nonconservative_rhs.
using FluxVector = std::array<double, 6>;

FluxVector conservative_vector(const CellState& u, ModelId model);
FluxVector physical_flux(const CellState& u, const CellThermo& th, ModelId model, double epsilon);

/// Local Lax-Friedrichs: 1/2 (f(L) + f(R)) - 1/2 s (U_R - U_L), s = max(|u| + c/eps).
FluxVector rusanov_flux(const CellState& left, const CellState& right, ModelId model,
                        const PhysParams& params, double epsilon);
FluxVector rusanov_flux(const CellState& left, const CellThermo& tl, const CellState& right,
                        const CellThermo& tr, ModelId model, double epsilon);

/// HLLC flux for the single-velocity models (Davis wave-speed bounds). Resolves material
/// contacts, so volume-fraction and entropy fronts are transported with upwind dissipation
/// proportional to |u| instead of c/eps.
FluxVector hllc_flux(const CellState& left, const CellThermo& tl, const CellState& right,
                     const CellThermo& tr, ModelId model, double epsilon);

/// Two-velocity flux, phase by phase: upwind dissipation max|u| on every component plus
/// acoustic dissipation (c/eps) on the velocity jump only, so phase contacts are not
/// smeared at the acoustic rate.
FluxVector split_dissipation_flux(const CellState& left, const CellThermo& tl,
                                  const CellState& right, const CellThermo& tr, ModelId model,
                                  double epsilon);

// ---------------------------------------------------------------------------------------------
// Field operators

double max_wave_speed(const PhaseState& s, const ClosureFields& thermo, const RunConfig& config);
/// dt = cfl dx / max_speed, capped by the time remaining. Throws on non-finite or zero speed.
double cfl_dt(double dx, double cfl, double max_speed, double remaining);
double cfl_dt(const PhaseState& s, const RunConfig& config);

/// Central-difference nonconservative momentum terms of the two-velocity models.
/// The momentum rates are  -(grad_p_plus + pint_grad_alpha)  for phase + and
/// -(grad_p_minus - pint_grad_alpha)  for phase -.
struct NonconservativeTerms {
  std::vector<double> grad_p_plus;      // a+_i (p+_{i+1} - p+_{i-1}) / (2 dx) / eps^2
  std::vector<double> grad_p_minus;     // a-_i (p-_{i+1} - p-_{i-1}) / (2 dx) / eps^2
  std::vector<double> pint_grad_alpha;  // pint_i (a+_{i+1} - a+_{i-1}) / (2 dx)
  std::vector<double> rate_m_plus;
  std::vector<double> rate_m_minus;
};

/// All zeros for single-velocity models.
NonconservativeTerms nonconservative_rhs(const PhaseState& s, const ClosureFields& thermo,
                                         const RunConfig& config);

double interface_pressure(const PintSpec& pint, ModelId model, double p_plus, double p_minus);

struct ViscousTerms {
  std::vector<double> rate_m;     // (2 mu + lambda) (u_{i+1} - 2 u_i + u_{i-1}) / dx^2
  double dissipation_rate = 0.0;  // sum (2 mu + lambda) ((u_{i+1} - u_i)/dx)^2 dx >= 0
};

ViscousTerms viscous_rhs(const PhaseState& s, const PhysParams& params, const Grid1D& grid);

/// Backward-Euler viscous substep rho u_new - dt (2mu+lambda) D2 u_new = m (periodic
/// tridiagonal solve). Returns the dissipated energy dt sum (2mu+lambda)(D u_new)^2 dx.
double viscous_implicit_step(PhaseState& s, double dt, const PhysParams& params,
                             const Grid1D& grid);

/// Implicit pointwise drag relaxing u+ and u- toward each other; conserves total momentum.
void drag_step(PhaseState& s, double dt, const PhysParams& params);

struct RelaxedCell {
  double alpha = 0.0;
  int iters = 0;
  double energy_drop = 0.0;  // (E(alpha_old) - E(alpha_new)) / eps^2 >= 0
};

/// Advances d alpha/dt = a (1-a) (p+ - p-) / (eps^2 tau) over dt at frozen masses with
/// params.relax_scheme. energy_drop is the exact internal-energy decrease over eps^2.
RelaxedCell relax_cell(double R_plus, double R_minus, double S_plus, double S_minus,
                       double alpha_old, double dt, const PhysParams& params, double epsilon);

struct RelaxationResult {
  PhaseState state;
  double dissipation = 0.0;  // sum of energy drops times dx
  int max_iters = 0;
};

RelaxationResult relaxation_step(const PhaseState& s, double dt, const PhysParams& params,
                                 double epsilon, double dx);

/// Forward-Euler finite-volume transport: conservative fluxes (partial entropies R S
/// included), two-velocity nonconservative products, upwind advection of alpha (M3, M7).
/// No viscous, drag or relaxation terms.
PhaseState fv_update(const PhaseState& s, const ClosureFields& thermo, double dt,
                     const RunConfig& config);

/// Strang-split step: half relaxation, transport, viscosity, drag, half relaxation.
PhaseState strang_step(const PhaseState& s, const RunConfig& config, StepStats* stats = nullptr);

/// Runs to t_end, recording diagnostics at step 0, every output_stride steps and the end.
Trajectory simulate(const RunConfig& config, const PhaseState& init);

}  // namespace lowmach
