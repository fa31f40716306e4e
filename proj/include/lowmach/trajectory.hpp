#pragma once

#include <vector>

#include "lowmach/model.hpp"

namespace lowmach {

struct StepStats {
  double dt = 0.0;
  double max_wave_speed = 0.0;
  int relax_newton_iters = 0;      // max over cells, both half steps
  double dissipated_viscous = 0.0;   // energy removed by the viscous substep
  double dissipated_relaxation = 0.0;  // energy removed by pressure relaxation
};

struct EnergyBreakdown {
  double kinetic = 0.0;
  double internal = 0.0;
  double dissipated_viscous = 0.0;
  double dissipated_relaxation = 0.0;

  double total() const { return kinetic + internal + dissipated_viscous + dissipated_relaxation; }
};

/// Distances of a state from the formal low-Mach limit. All are >= 0.
struct LimitIndicators {
  double pressure_gap = 0.0;       // max |p+ - p-|
  double density_dev_plus = 0.0;   // max |rho+ - C0^(1/g+) e^(-S+/g+)|
  double density_dev_minus = 0.0;
  double pressure_dev = 0.0;       // max over cells and phases |p - C0|
  double u_variance = 0.0;         // L2 of velocity (or mixture volume flux) minus its mean
  double div_norm = 0.0;           // L2 of its central derivative
  double alpha_oracle_err = 0.0;   // L1 distance of alpha to the translated initial profile
  double m7_constraint_residual = 0.0;
  double m7_constraint_scale = 0.0;  // L2 of alpha+ d_x u+, for normalising the residual
};

struct Record {
  int step = 0;
  PhaseState state;
  EnergyBreakdown energy;
  LimitIndicators indicators;
  StepStats last_step;
};

struct Trajectory {
  std::vector<Record> records;
  int steps = 0;
  double max_pressure_gap = 0.0;  // over every step, not only recorded ones
};

}  // namespace lowmach
