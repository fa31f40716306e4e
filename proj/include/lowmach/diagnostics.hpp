#pragma once

#include <string>

#include "lowmach/eos.hpp"
#include "lowmach/model.hpp"
#include "lowmach/trajectory.hpp"

namespace lowmach {

/// Kinetic and eps-scaled internal energy by midpoint quadrature; dissipated parts are zero
/// (they are accumulated by simulate()).
EnergyBreakdown energy_total(const PhaseState& state, const RunConfig& config);
EnergyBreakdown energy_total(const PhaseState& state, const ClosureFields& thermo,
                             const RunConfig& config);

inline constexpr double kEnergyAuditTol = 1e-8;

struct EnergyAuditReport {
  bool passed = true;
  double worst_violation = 0.0;  // relative to |total(0)|; <= 0 means no growth
  int worst_record = 0;
  std::string message;
};

/// Checks total(t) <= total(0) (1 + tol) at every record and that the total never grows
/// between consecutive records by more than tol |total(0)|.
EnergyAuditReport energy_audit(const Trajectory& trajectory, const RunConfig& config,
                               double tol = kEnergyAuditTol);

LimitIndicators indicators(const PhaseState& state, const RunConfig& config);
LimitIndicators indicators(const PhaseState& state, const ClosureFields& thermo,
                           const RunConfig& config);

/// Velocity whose spatial variation measures distance from the limit: the mixture
/// velocity for single-velocity models, the volume flux a+ u+ + a- u- otherwise.
std::vector<double> limit_velocity(const PhaseState& state, const ClosureFields& thermo);

}  // namespace lowmach
