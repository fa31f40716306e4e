#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lowmach/model.hpp"

namespace lowmach {

inline constexpr double kAlphaMargin = 0.05;

/// base + amplitude * shape(x) on a periodic domain of the given length.
double profile_value(const PerturbationProfile& profile, double x, double length);

std::vector<double> sample_profile(const PerturbationProfile& profile, const Grid1D& grid);

/// C0^(1/gamma) e^(-S/gamma): the density at which p(rho, S) equals C0.
double limit_density(double c0, double s, double gamma);

/// Well-prepared initial datum for `config.model`.
///
/// Phase densities sit at the common pressure C0 (plus the O(eps^2) acoustic correction
/// in AcousticMode::RightGoing), the volume fraction follows `alpha_profile`, and every
/// volume flux is u_mean + eps * velocity_profile(x), so its derivative is O(eps). The
/// two-velocity models add the slip w = config.init.slip_profile(x) as u+ = U + a- w,
/// u- = U - a+ w, which leaves the volume flux U unchanged. Throws DomainError if alpha leaves (0.05, 0.95).
PhaseState make_well_prepared(
    const RunConfig& config, const PerturbationProfile& alpha_profile, double u_mean,
    const std::optional<PerturbationProfile>& velocity_profile = std::nullopt,
    const std::optional<std::pair<PerturbationProfile, PerturbationProfile>>& entropy_profiles =
        std::nullopt);

/// config.init with the run seed added to every profile seed.
InitSpec seeded_init(const RunConfig& config);

/// Same, with every profile taken from `seeded_init(config)`.
PhaseState make_well_prepared(const RunConfig& config);

struct LimitState {
  std::vector<double> alpha;  // alpha_0(x - u_mean t), periodic
  double u = 0.0;             // u_mean
};

/// Exact 1-D periodic solution of the single-velocity limit system: the velocity is a
/// constant and the volume fraction is transported by it.
LimitState exact_limit_state(const PerturbationProfile& alpha_profile, double u_mean, double t,
                             const Grid1D& grid);

/// PhaseState of `config.model` sitting exactly on the limit solution at time t
/// (equilibrium densities, uniform velocity, transported alpha and entropies).
PhaseState embed_limit_state(const RunConfig& config, double t);

}  // namespace lowmach
