#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "lowmach/model.hpp"
#include "lowmach/sweep.hpp"
#include "lowmach/trajectory.hpp"

namespace lowmach {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Raised for malformed configuration text; the message names the key and line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Flat `key = value` text; '#' starts a comment. Unknown keys, malformed values, and
/// configurations failing validate() are rejected.
RunConfig parse_config_text(std::string_view text);
RunConfig parse_config(const std::filesystem::path& path);

/// Every key with its current value, in a fixed order; parse_config_text(print_config(c)) == c.
std::string print_config(const RunConfig& config);

/// Fixed column orders of the two CSV outputs.
std::vector<std::string> trajectory_columns();
std::vector<std::string> snapshot_columns(ModelId model);

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);
/// One block of rows per record, each row one cell.
void write_snapshot_csv(std::ostream& out, const Trajectory& trajectory, const RunConfig& config);

std::string sweep_to_json(const SweepReport& report);
/// Inverse of sweep_to_json; trajectories and wall times are not part of the JSON.
SweepReport sweep_from_json(std::string_view json);

/// Human-readable equations and active fields of a model.
std::string describe_model(ModelId model);

}  // namespace lowmach
