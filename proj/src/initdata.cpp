#include "lowmach/initdata.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "lowmach/eos.hpp"

namespace lowmach {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform double in [0,1) from the raw engine output, independent of the stdlib's
// distribution implementation.
double unit_uniform(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

double wrap(double x, double length) {
  double y = std::fmod(x, length);
  return y < 0.0 ? y + length : y;
}

}  // namespace

double profile_value(const PerturbationProfile& p, double x, double length) {
  const double xi = wrap(x, length) / length;
  double shape = 0.0;
  switch (p.kind) {
    case ProfileKind::Sine:
      shape = std::sin(kTwoPi * p.k * xi);
      break;
    case ProfileKind::Bump: {
      double d = std::abs(xi - wrap(p.center, length) / length);
      d = std::min(d, 1.0 - d);
      const double w = p.width / length;
      shape = std::exp(-(d / w) * (d / w));
      break;
    }
    case ProfileKind::RandomSmooth: {
      std::mt19937_64 eng(p.seed);
      double norm = 0.0;
      for (int m = 1; m <= p.modes; ++m) {
        const double a = (2.0 * unit_uniform(eng) - 1.0) / m;
        const double phase = kTwoPi * unit_uniform(eng);
        shape += a * std::sin(kTwoPi * m * xi + phase);
        norm += std::abs(a);
      }
      if (norm > 0.0) shape /= norm;
      break;
    }
  }
  return p.base + p.amplitude * shape;
}

std::vector<double> sample_profile(const PerturbationProfile& p, const Grid1D& grid) {
  std::vector<double> out(static_cast<std::size_t>(grid.n_cells));
  for (int i = 0; i < grid.n_cells; ++i) out[i] = profile_value(p, grid.center(i), grid.length);
  return out;
}

double limit_density(double c0, double s, double gamma) {
  return std::pow(c0, 1.0 / gamma) * std::exp(-s / gamma);
}

PhaseState make_well_prepared(
    const RunConfig& config, const PerturbationProfile& alpha_profile, double u_mean,
    const std::optional<PerturbationProfile>& velocity_profile,
    const std::optional<std::pair<PerturbationProfile, PerturbationProfile>>& entropy_profiles) {
  const ModelId model = config.model;
  const Grid1D& grid = config.grid;
  const int n = grid.n_cells;
  const double eps = config.epsilon;
  const double c0 = config.init.c0;
  const double gp = config.params.gamma_plus, gm = config.params.gamma_minus;

  PhaseState s = PhaseState::zeros(model, n);
  s.time = 0.0;

  std::vector<double> alpha(static_cast<std::size_t>(n), 1.0);
  if (is_two_phase(model)) {
    alpha = sample_profile(alpha_profile, grid);
    for (int i = 0; i < n; ++i)
      if (!(alpha[i] > kAlphaMargin && alpha[i] < 1.0 - kAlphaMargin))
        throw DomainError(fmt::format("alpha profile value {} at cell {} outside ({}, {})",
                                      alpha[i], i, kAlphaMargin, 1.0 - kAlphaMargin));
  }

  std::vector<double> du(static_cast<std::size_t>(n), 0.0);
  if (velocity_profile)
    for (int i = 0; i < n; ++i)
      du[i] = eps * (profile_value(*velocity_profile, grid.center(i), grid.length) -
                     velocity_profile->base);

  std::vector<double> sp(static_cast<std::size_t>(n), 0.0), sm(sp);
  if (entropy_profiles) {
    if (!has_entropy(model)) throw DomainError("entropy profiles given for an isentropic model");
    sp = sample_profile(entropy_profiles->first, grid);
    sm = sample_profile(entropy_profiles->second, grid);
  }

  for (int i = 0; i < n; ++i) {
    double p = c0;
    if (config.init.acoustic == AcousticMode::RightGoing && du[i] != 0.0) {
      // Linear right-going acoustic wave: (1/eps^2) p' = Z u' / eps, Z = rho c (Wood's mixture).
      const double rp = limit_density(c0, sp[i], gp);
      double rho, compressibility;
      if (model == ModelId::M1) {
        rho = rp;
        compressibility = 1.0 / (gp * c0);
      } else {
        const double rm = limit_density(c0, sm[i], gm);
        rho = alpha[i] * rp + (1.0 - alpha[i]) * rm;
        compressibility = alpha[i] / (gp * c0) + (1.0 - alpha[i]) / (gm * c0);
      }
      const double impedance = std::sqrt(rho / compressibility);
      p = c0 + eps * impedance * du[i];
      if (!(p > 0.0))
        throw DomainError(fmt::format(
            "right-going acoustic pressure {} at cell {} is not positive; reduce epsilon or the "
            "velocity amplitude",
            p, i));
    }
    const double rp = limit_density(p, sp[i], gp);
    const double u = u_mean + du[i];
    if (model == ModelId::M1) {
      s.R_plus[i] = rp;
      s.m[i] = rp * u;
      continue;
    }
    const double rm = limit_density(p, sm[i], gm);
    s.R_plus[i] = alpha[i] * rp;
    s.R_minus[i] = (1.0 - alpha[i]) * rm;
    if (has_relaxation(model)) s.alpha_plus[i] = alpha[i];
    if (is_two_velocity(model)) {
      const double w = profile_value(config.init.slip_profile, grid.center(i), grid.length);
      s.m_plus[i] = s.R_plus[i] * (u + (1.0 - alpha[i]) * w);
      s.m_minus[i] = s.R_minus[i] * (u - alpha[i] * w);
    } else {
      s.m[i] = (s.R_plus[i] + s.R_minus[i]) * u;
    }
    if (has_entropy(model)) {
      s.S_plus[i] = sp[i];
      s.S_minus[i] = sm[i];
    }
  }
  return s;
}

InitSpec seeded_init(const RunConfig& config) {
  InitSpec in = config.init;
  auto mix = [&](PerturbationProfile& p) { p.seed += config.seed; };
  mix(in.alpha_profile);
  mix(in.velocity_profile);
  mix(in.slip_profile);
  if (in.entropy_plus) mix(*in.entropy_plus);
  if (in.entropy_minus) mix(*in.entropy_minus);
  return in;
}

PhaseState make_well_prepared(const RunConfig& config) {
  RunConfig seeded = config;
  seeded.init = seeded_init(config);
  const InitSpec& in = seeded.init;
  std::optional<std::pair<PerturbationProfile, PerturbationProfile>> entropy;
  if (has_entropy(seeded.model) && (in.entropy_plus || in.entropy_minus)) {
    PerturbationProfile zero{};
    zero.target = ProfileTarget::Entropy;
    entropy.emplace(in.entropy_plus.value_or(zero), in.entropy_minus.value_or(zero));
  }
  return make_well_prepared(seeded, in.alpha_profile, in.u_mean, in.velocity_profile, entropy);
}

LimitState exact_limit_state(const PerturbationProfile& alpha_profile, double u_mean, double t,
                             const Grid1D& grid) {
  LimitState out;
  out.u = u_mean;
  out.alpha.resize(static_cast<std::size_t>(grid.n_cells));
  for (int i = 0; i < grid.n_cells; ++i)
    out.alpha[i] = profile_value(alpha_profile, grid.center(i) - u_mean * t, grid.length);
  return out;
}

PhaseState embed_limit_state(const RunConfig& config, double t) {
  const InitSpec& in = config.init;
  const LimitState lim =
      exact_limit_state(seeded_init(config).alpha_profile, in.u_mean, t, config.grid);
  const int n = config.grid.n_cells;
  const ModelId model = config.model;
  PhaseState s = PhaseState::zeros(model, n);
  s.time = t;
  for (int i = 0; i < n; ++i) {
    const double x0 = config.grid.center(i) - in.u_mean * t;
    const double sp = in.entropy_plus ? profile_value(*in.entropy_plus, x0, config.grid.length) : 0.0;
    const double sm =
        in.entropy_minus ? profile_value(*in.entropy_minus, x0, config.grid.length) : 0.0;
    const double rp = limit_density(in.c0, has_entropy(model) ? sp : 0.0, config.params.gamma_plus);
    if (model == ModelId::M1) {
      s.R_plus[i] = rp;
      s.m[i] = rp * lim.u;
      continue;
    }
    const double rm =
        limit_density(in.c0, has_entropy(model) ? sm : 0.0, config.params.gamma_minus);
    const double a = lim.alpha[i];
    s.R_plus[i] = a * rp;
    s.R_minus[i] = (1.0 - a) * rm;
    if (has_relaxation(model)) s.alpha_plus[i] = a;
    if (is_two_velocity(model)) {
      s.m_plus[i] = s.R_plus[i] * lim.u;
      s.m_minus[i] = s.R_minus[i] * lim.u;
    } else {
      s.m[i] = (s.R_plus[i] + s.R_minus[i]) * lim.u;
    }
    if (has_entropy(model)) {
      s.S_plus[i] = sp;
      s.S_minus[i] = sm;
    }
  }
  return s;
}

}  // namespace lowmach
