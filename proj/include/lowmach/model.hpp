#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lowmach {

/// The seven scaled flow systems the laboratory can run.
///
///   M1  one-phase isentropic Navier-Stokes
///   M2  two-phase, one velocity, algebraic pressure closure
///   M3  two-phase, one velocity, relaxation (PDE) pressure closure
///   M4  two-phase, one velocity, non-isentropic, algebraic closure
///   M5  two-phase, two velocities, isentropic, algebraic closure
///   M6  two-phase, two velocities, non-isentropic, algebraic closure
///   M7  two-phase, two velocities, non-isentropic, relaxation closure
enum class ModelId { M1, M2, M3, M4, M5, M6, M7 };

inline constexpr ModelId kAllModels[] = {ModelId::M1, ModelId::M2, ModelId::M3, ModelId::M4,
                                         ModelId::M5, ModelId::M6, ModelId::M7};

std::string_view to_string(ModelId model);
/// Accepts "M1".."M7" (case-insensitive); throws std::invalid_argument otherwise.
ModelId model_from_string(std::string_view name);

constexpr bool is_two_phase(ModelId m) { return m != ModelId::M1; }
constexpr bool is_two_velocity(ModelId m) {
  return m == ModelId::M5 || m == ModelId::M6 || m == ModelId::M7;
}
constexpr bool has_entropy(ModelId m) {
  return m == ModelId::M4 || m == ModelId::M6 || m == ModelId::M7;
}
/// Volume fraction is prognostic (relaxation closure) rather than recovered from the closure.
constexpr bool has_relaxation(ModelId m) { return m == ModelId::M3 || m == ModelId::M7; }
constexpr bool has_algebraic_closure(ModelId m) {
  return m == ModelId::M2 || m == ModelId::M4 || m == ModelId::M5 || m == ModelId::M6;
}
constexpr bool is_viscous(ModelId m) { return !is_two_velocity(m); }

enum class PintRule { EquilibriumPressure, Constant };

struct PintSpec {
  PintRule rule = PintRule::EquilibriumPressure;
  double value = 1.0;  // used by PintRule::Constant only

  bool operator==(const PintSpec&) const = default;
};

/// Integrator of the pressure-relaxation ODE at frozen masses.
///   Exact:         inverts the time integral of the scalar ODE (quadrature + Newton)
///   BackwardEuler: one implicit Euler step per substep
enum class RelaxScheme { Exact, BackwardEuler };

struct PhysParams {
  double gamma_plus = 1.4;
  double gamma_minus = 2.0;
  double mu_visc = 0.01;
  double lambda_visc = 0.0;
  double tau_relax = 1.0;
  double eta_drag = 0.0;  // 0 disables drag
  PintSpec pint;
  double body_force = 0.0;
  RelaxScheme relax_scheme = RelaxScheme::Exact;

  bool operator==(const PhysParams&) const = default;
};

struct Grid1D {
  int n_cells = 256;
  double length = 1.0;

  double dx() const { return length / n_cells; }
  double center(int i) const { return (i + 0.5) * dx(); }
  bool operator==(const Grid1D&) const = default;
};

enum class ProfileKind { Sine, Bump, RandomSmooth };
enum class ProfileTarget { Velocity, VolumeFraction, Entropy };

/// A smooth periodic scalar profile, value(x) = base + amplitude * shape(x).
struct PerturbationProfile {
  ProfileKind kind = ProfileKind::Sine;
  ProfileTarget target = ProfileTarget::Velocity;
  double base = 0.0;
  double amplitude = 0.0;
  int k = 1;              // sine wavenumber
  double center = 0.5;    // bump
  double width = 0.1;     // bump
  std::uint64_t seed = 0; // random-smooth
  int modes = 4;          // random-smooth

  bool operator==(const PerturbationProfile&) const = default;
};

/// How the O(eps) velocity perturbation of well-prepared data is paired with the pressure.
///   Standing:   pressure exactly uniform (p = C0); the perturbation splits into two
///               counter-propagating acoustic waves.
///   RightGoing: O(eps^2) pressure perturbation on the right-going acoustic characteristic,
///               so only one acoustic wave is launched.
enum class AcousticMode { Standing, RightGoing };

/// Description of the well-prepared initial datum carried with a run.
struct InitSpec {
  PerturbationProfile alpha_profile{ProfileKind::Sine, ProfileTarget::VolumeFraction, 0.5, 0.2};
  PerturbationProfile velocity_profile{ProfileKind::Sine, ProfileTarget::Velocity, 0.0, 1.0};
  double u_mean = 0.3;
  /// Relative velocity u+ - u- of the two-velocity models, set so that the volume flux
  /// a+ u+ + a- u- is unchanged. Zero amplitude by default.
  PerturbationProfile slip_profile{ProfileKind::Sine, ProfileTarget::Velocity, 0.0, 0.0};
  std::optional<PerturbationProfile> entropy_plus;
  std::optional<PerturbationProfile> entropy_minus;
  double c0 = 1.0;
  AcousticMode acoustic = AcousticMode::Standing;

  bool operator==(const InitSpec&) const = default;
};

/// LowDissipation: HLLC for the single-velocity models, split_dissipation_flux for the
/// two-velocity models. Rusanov: local Lax-Friedrichs everywhere.
enum class FluxKind { LowDissipation, Rusanov };

struct RunConfig {
  ModelId model = ModelId::M2;
  PhysParams params;
  Grid1D grid;
  double epsilon = 0.1;
  double cfl = 0.4;
  double t_end = 0.2;
  int output_stride = 50;
  std::uint64_t seed = 0;
  FluxKind flux = FluxKind::LowDissipation;
  InitSpec init;
  std::vector<double> sweep_epsilons;  // Mach ladder for the sweep driver; may be empty

  bool operator==(const RunConfig&) const = default;
};

/// Defaults for `model`: the two-velocity models are inviscid (mu_visc = lambda_visc = 0).
RunConfig default_config(ModelId model);

enum class Field { R_plus, R_minus, alpha_plus, m, m_plus, m_minus, S_plus, S_minus };

std::string_view to_string(Field f);

/// Cell-averaged fields of one simulation; inactive fields are empty.
struct PhaseState {
  ModelId model = ModelId::M1;
  double time = 0.0;
  std::vector<double> R_plus;
  std::vector<double> R_minus;
  std::vector<double> alpha_plus;
  std::vector<double> m;
  std::vector<double> m_plus;
  std::vector<double> m_minus;
  std::vector<double> S_plus;
  std::vector<double> S_minus;

  /// Allocates exactly the active fields of `model`, zero-filled.
  static PhaseState zeros(ModelId model, int n_cells);

  int n_cells() const { return static_cast<int>(R_plus.size()); }
  std::vector<double>& field(Field f);
  const std::vector<double>& field(Field f) const;

  bool operator==(const PhaseState&) const = default;
};

/// Fields evolved by `model`, in a fixed canonical order.
std::vector<Field> active_fields(ModelId model);

/// Every violated invariant of the configuration; empty means valid.
std::vector<std::string> validate(const RunConfig& config);

/// Invariant violations of a state against its model (sizes, positivity, finiteness).
std::vector<std::string> check_state(const PhaseState& state, ModelId model, int n_cells);

/// Base of all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace lowmach
