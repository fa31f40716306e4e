#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lowmach/model.hpp"
#include "lowmach/trajectory.hpp"

namespace lowmach {

struct OrderFit {
  double slope = 0.0;
  double residual = 0.0;  // root-mean-square log-log residual
  bool vanished = false;  // some value <= 0: already at the limit, order undefined
};

/// Least-squares slope of log(value) against log(epsilon). Needs >= 2 points.
OrderFit fit_order(const std::vector<std::pair<double, double>>& points);

/// Indicator columns in their fixed serialization order. "m7_normalized_residual" is
/// m7_constraint_residual / m7_constraint_scale.
const std::vector<std::string>& indicator_names();
double indicator_value(const LimitIndicators& ind, std::string_view name);

struct SweepRun {
  double epsilon = 0.0;
  LimitIndicators final_indicators;
  double max_pressure_gap = 0.0;
  int steps = 0;
  double wall_seconds = 0.0;
  std::string error;  // empty on success
  Trajectory trajectory;
};

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SweepReport {
  RunConfig base_config;
  std::vector<double> epsilons;
  std::vector<SweepRun> runs;  // same order as epsilons
  std::vector<std::pair<std::string, OrderFit>> orders;
  std::vector<Verdict> verdicts;
  bool passed = false;
};

/// The checks applied to `model` by mach_sweep, given the finished runs.
std::vector<Verdict> sweep_verdicts(ModelId model, const std::vector<SweepRun>& runs);

/// Runs base_config at each epsilon (strictly decreasing, at least 3) from the
/// well-prepared datum described by base_config.init. At most `workers` runs execute
/// concurrently; the report does not depend on the worker count.
SweepReport mach_sweep(const RunConfig& base_config, const std::vector<double>& epsilons,
                       int workers = 1);

}  // namespace lowmach
