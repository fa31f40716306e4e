#include "lowmach/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

#include <fmt/format.h>

namespace lowmach {

std::string_view to_string(ModelId model) {
  switch (model) {
    case ModelId::M1: return "M1";
    case ModelId::M2: return "M2";
    case ModelId::M3: return "M3";
    case ModelId::M4: return "M4";
    case ModelId::M5: return "M5";
    case ModelId::M6: return "M6";
    case ModelId::M7: return "M7";
  }
  return "?";
}

ModelId model_from_string(std::string_view name) {
  if (name.size() == 2 && (name[0] == 'M' || name[0] == 'm') && name[1] >= '1' && name[1] <= '7')
    return kAllModels[name[1] - '1'];
  throw std::invalid_argument(std::string("unknown model '") + std::string(name) + "'");
}

std::string_view to_string(Field f) {
  switch (f) {
    case Field::R_plus: return "R_plus";
    case Field::R_minus: return "R_minus";
    case Field::alpha_plus: return "alpha_plus";
    case Field::m: return "m";
    case Field::m_plus: return "m_plus";
    case Field::m_minus: return "m_minus";
    case Field::S_plus: return "S_plus";
    case Field::S_minus: return "S_minus";
  }
  return "?";
}

std::vector<Field> active_fields(ModelId model) {
  std::vector<Field> out{Field::R_plus};
  if (is_two_phase(model)) out.push_back(Field::R_minus);
  if (has_relaxation(model)) out.push_back(Field::alpha_plus);
  if (is_two_velocity(model)) {
    out.push_back(Field::m_plus);
    out.push_back(Field::m_minus);
  } else {
    out.push_back(Field::m);
  }
  if (has_entropy(model)) {
    out.push_back(Field::S_plus);
    out.push_back(Field::S_minus);
  }
  return out;
}

PhaseState PhaseState::zeros(ModelId model, int n_cells) {
  PhaseState s;
  s.model = model;
  for (Field f : active_fields(model)) s.field(f).assign(static_cast<std::size_t>(n_cells), 0.0);
  return s;
}

std::vector<double>& PhaseState::field(Field f) {
  return const_cast<std::vector<double>&>(std::as_const(*this).field(f));
}

const std::vector<double>& PhaseState::field(Field f) const {
  switch (f) {
    case Field::R_plus: return R_plus;
    case Field::R_minus: return R_minus;
    case Field::alpha_plus: return alpha_plus;
    case Field::m: return m;
    case Field::m_plus: return m_plus;
    case Field::m_minus: return m_minus;
    case Field::S_plus: return S_plus;
    case Field::S_minus: return S_minus;
  }
  throw std::logic_error("bad field");
}

RunConfig default_config(ModelId model) {
  RunConfig c;
  c.model = model;
  if (is_two_velocity(model)) c.params.mu_visc = c.params.lambda_visc = 0.0;
  return c;
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> errs;
  auto bad = [&](const std::string& msg) { errs.push_back(msg); };
  auto finite = [](double v) { return std::isfinite(v); };

  const auto& p = c.params;
  const ModelId m = c.model;

  if (!finite(p.gamma_plus) || !(p.gamma_plus > 1.0)) bad("gamma_plus must be > 1");
  if (is_two_phase(m) && (!finite(p.gamma_minus) || !(p.gamma_minus > 1.0)))
    bad("gamma_minus must be > 1");

  if (is_viscous(m)) {
    if (!finite(p.mu_visc) || !(p.mu_visc > 0.0)) bad("mu_visc must be > 0 for viscous models");
    if (!finite(p.lambda_visc) || !(p.lambda_visc + 2.0 * p.mu_visc > 0.0))
      bad("lambda_visc + 2 mu_visc must be > 0");
  } else if (p.mu_visc != 0.0 || p.lambda_visc != 0.0) {
    bad("two-velocity models are inviscid here (mu_visc = lambda_visc = 0 required)");
  }

  if (has_relaxation(m) && (!finite(p.tau_relax) || !(p.tau_relax > 0.0)))
    bad("relaxation coefficient required: tau_relax must be > 0");

  if (!finite(p.eta_drag) || p.eta_drag < 0.0) bad("eta_drag must be >= 0");
  if (p.eta_drag > 0.0 && !is_two_velocity(m)) bad("drag applies to two-velocity models only");
  if (p.pint.rule == PintRule::Constant && !finite(p.pint.value)) bad("pint constant must be finite");
  if (p.body_force != 0.0) bad("body_force must be 0");

  if (c.grid.n_cells < 8) bad("n_cells must be >= 8");
  if (!finite(c.grid.length) || !(c.grid.length > 0.0)) bad("length must be > 0");

  if (!finite(c.epsilon) || !(c.epsilon > 0.0) || c.epsilon > 1.0) bad("epsilon must be in (0, 1]");
  if (!finite(c.cfl) || !(c.cfl > 0.0 && c.cfl < 1.0)) bad("cfl must be in (0, 1)");
  if (!finite(c.t_end) || c.t_end < 0.0) bad("t_end must be >= 0");
  if (c.output_stride < 1) bad("output_stride must be >= 1");

  const auto& a = c.init.alpha_profile;
  if (!finite(a.base) || !finite(a.amplitude)) bad("alpha_profile must be finite");
  if (a.kind == ProfileKind::Sine && a.k < 1) bad("alpha_profile.k must be >= 1");
  if (c.init.velocity_profile.kind == ProfileKind::Sine && c.init.velocity_profile.k < 1)
    bad("velocity_profile.k must be >= 1");
  if (!finite(c.init.u_mean)) bad("u_mean must be finite");
  if (!finite(c.init.c0) || !(c.init.c0 > 0.0)) bad("c0 must be > 0");
  if (!c.sweep_epsilons.empty()) {
    if (c.sweep_epsilons.size() < 3) bad("sweep.epsilons needs at least 3 values");
    for (std::size_t k = 0; k < c.sweep_epsilons.size(); ++k) {
      const double e = c.sweep_epsilons[k];
      if (!finite(e) || !(e > 0.0) || e > 1.0) bad("sweep.epsilons values must be in (0, 1]");
      if (k > 0 && !(e < c.sweep_epsilons[k - 1])) bad("sweep.epsilons must be strictly decreasing");
    }
  }
  if ((c.init.entropy_plus || c.init.entropy_minus) && !has_entropy(m))
    bad("entropy profiles given for an isentropic model");
  return errs;
}

std::vector<std::string> check_state(const PhaseState& s, ModelId model, int n) {
  std::vector<std::string> errs;
  if (s.model != model) errs.push_back("state model mismatch");
  const auto active = active_fields(model);
  for (Field f : {Field::R_plus, Field::R_minus, Field::alpha_plus, Field::m, Field::m_plus,
                  Field::m_minus, Field::S_plus, Field::S_minus}) {
    const auto& v = s.field(f);
    const bool want = std::find(active.begin(), active.end(), f) != active.end();
    if (want && static_cast<int>(v.size()) != n)
      errs.push_back(fmt::format("{} has {} cells, expected {}", to_string(f), v.size(), n));
    if (!want && !v.empty()) errs.push_back(fmt::format("{} is not active", to_string(f)));
    for (double x : v)
      if (!std::isfinite(x)) {
        errs.push_back(fmt::format("{} has non-finite entries", to_string(f)));
        break;
      }
  }
  for (double r : s.R_plus)
    if (r < 0) { errs.push_back("R_plus negative"); break; }
  for (double r : s.R_minus)
    if (r < 0) { errs.push_back("R_minus negative"); break; }
  for (double a : s.alpha_plus)
    if (!(a > 0.0 && a < 1.0)) { errs.push_back("alpha_plus outside (0,1)"); break; }
  return errs;
}

}  // namespace lowmach
