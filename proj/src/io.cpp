#include "lowmach/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "lowmach/eos.hpp"

namespace lowmach {

namespace {

using json = nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double v) { return fmt::format("{:.17g}", v); }

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument(fmt::format("malformed number '{}'", s));
  return v;
}

template <typename Int>
Int parse_int(std::string_view s) {
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::invalid_argument(fmt::format("malformed integer '{}'", s));
  return v;
}

template <typename E>
E parse_enum(std::string_view s, std::initializer_list<std::pair<std::string_view, E>> table) {
  for (const auto& [name, e] : table)
    if (name == s) return e;
  std::string names;
  for (const auto& [name, e] : table) names += (names.empty() ? "" : "|") + std::string(name);
  throw std::invalid_argument(fmt::format("expected one of {}, got '{}'", names, s));
}

std::string_view kind_name(ProfileKind k) {
  switch (k) {
    case ProfileKind::Sine: return "sine";
    case ProfileKind::Bump: return "bump";
    case ProfileKind::RandomSmooth: return "random_smooth";
  }
  return "?";
}

struct Entry {
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
  std::function<bool(const RunConfig&)> printed = [](const RunConfig&) { return true; };
};

void add_double(std::vector<Entry>& t, std::string key, std::function<double&(RunConfig&)> ref) {
  t.push_back({key, [ref](RunConfig& c, std::string_view v) { ref(c) = parse_double(v); },
               [ref](const RunConfig& c) { return num(ref(const_cast<RunConfig&>(c))); }});
}

void add_profile(std::vector<Entry>& t, const std::string& prefix,
                 std::function<PerturbationProfile&(RunConfig&)> ref,
                 std::function<bool(const RunConfig&)> printed) {
  auto entry = [&](std::string sub, std::function<void(PerturbationProfile&, std::string_view)> set,
                   std::function<std::string(const PerturbationProfile&)> get) {
    Entry e{prefix + "." + sub,
            [ref, set](RunConfig& c, std::string_view v) { set(ref(c), v); },
            [ref, get](const RunConfig& c) { return get(ref(const_cast<RunConfig&>(c))); }};
    e.printed = printed;
    t.push_back(std::move(e));
  };
  entry(
      "kind",
      [](PerturbationProfile& p, std::string_view v) {
        p.kind = parse_enum<ProfileKind>(v, {{"sine", ProfileKind::Sine},
                                            {"bump", ProfileKind::Bump},
                                            {"random_smooth", ProfileKind::RandomSmooth}});
      },
      [](const PerturbationProfile& p) { return std::string(kind_name(p.kind)); });
  entry("base", [](PerturbationProfile& p, std::string_view v) { p.base = parse_double(v); },
        [](const PerturbationProfile& p) { return num(p.base); });
  entry("amplitude",
        [](PerturbationProfile& p, std::string_view v) { p.amplitude = parse_double(v); },
        [](const PerturbationProfile& p) { return num(p.amplitude); });
  entry("k", [](PerturbationProfile& p, std::string_view v) { p.k = parse_int<int>(v); },
        [](const PerturbationProfile& p) { return std::to_string(p.k); });
  entry("center", [](PerturbationProfile& p, std::string_view v) { p.center = parse_double(v); },
        [](const PerturbationProfile& p) { return num(p.center); });
  entry("width", [](PerturbationProfile& p, std::string_view v) { p.width = parse_double(v); },
        [](const PerturbationProfile& p) { return num(p.width); });
  entry("seed",
        [](PerturbationProfile& p, std::string_view v) { p.seed = parse_int<std::uint64_t>(v); },
        [](const PerturbationProfile& p) { return std::to_string(p.seed); });
  entry("modes", [](PerturbationProfile& p, std::string_view v) { p.modes = parse_int<int>(v); },
        [](const PerturbationProfile& p) { return std::to_string(p.modes); });
}

PerturbationProfile& entropy_ref(std::optional<PerturbationProfile>& o) {
  if (!o) {
    o.emplace();
    o->target = ProfileTarget::Entropy;
  }
  return *o;
}

const std::vector<Entry>& key_table() {
  static const std::vector<Entry> table = [] {
    std::vector<Entry> t;
    t.push_back({"model",
                 [](RunConfig& c, std::string_view v) { c.model = model_from_string(v); },
                 [](const RunConfig& c) { return std::string(to_string(c.model)); }});
    add_double(t, "gamma_plus", [](RunConfig& c) -> double& { return c.params.gamma_plus; });
    add_double(t, "gamma_minus", [](RunConfig& c) -> double& { return c.params.gamma_minus; });
    add_double(t, "mu_visc", [](RunConfig& c) -> double& { return c.params.mu_visc; });
    add_double(t, "lambda_visc", [](RunConfig& c) -> double& { return c.params.lambda_visc; });
    add_double(t, "tau_relax", [](RunConfig& c) -> double& { return c.params.tau_relax; });
    add_double(t, "eta_drag", [](RunConfig& c) -> double& { return c.params.eta_drag; });
    t.push_back({"pint_rule",
                 [](RunConfig& c, std::string_view v) {
                   c.params.pint.rule = parse_enum<PintRule>(
                       v, {{"equilibrium", PintRule::EquilibriumPressure},
                           {"constant", PintRule::Constant}});
                 },
                 [](const RunConfig& c) {
                   return std::string(c.params.pint.rule == PintRule::Constant ? "constant"
                                                                               : "equilibrium");
                 }});
    t.push_back({"relax_scheme",
                 [](RunConfig& c, std::string_view v) {
                   c.params.relax_scheme = parse_enum<RelaxScheme>(
                       v, {{"exact", RelaxScheme::Exact},
                           {"backward_euler", RelaxScheme::BackwardEuler}});
                 },
                 [](const RunConfig& c) {
                   return std::string(c.params.relax_scheme == RelaxScheme::BackwardEuler
                                          ? "backward_euler"
                                          : "exact");
                 }});
    add_double(t, "pint_value", [](RunConfig& c) -> double& { return c.params.pint.value; });
    add_double(t, "epsilon", [](RunConfig& c) -> double& { return c.epsilon; });
    add_double(t, "cfl", [](RunConfig& c) -> double& { return c.cfl; });
    t.push_back({"n_cells",
                 [](RunConfig& c, std::string_view v) { c.grid.n_cells = parse_int<int>(v); },
                 [](const RunConfig& c) { return std::to_string(c.grid.n_cells); }});
    add_double(t, "length", [](RunConfig& c) -> double& { return c.grid.length; });
    add_double(t, "t_end", [](RunConfig& c) -> double& { return c.t_end; });
    t.push_back({"output_stride",
                 [](RunConfig& c, std::string_view v) { c.output_stride = parse_int<int>(v); },
                 [](const RunConfig& c) { return std::to_string(c.output_stride); }});
    t.push_back({"seed",
                 [](RunConfig& c, std::string_view v) { c.seed = parse_int<std::uint64_t>(v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    t.push_back({"flux",
                 [](RunConfig& c, std::string_view v) {
                   c.flux = parse_enum<FluxKind>(v, {{"low_dissipation", FluxKind::LowDissipation},
                                                     {"rusanov", FluxKind::Rusanov}});
                 },
                 [](const RunConfig& c) {
                   return std::string(c.flux == FluxKind::Rusanov ? "rusanov" : "low_dissipation");
                 }});
    add_double(t, "c0", [](RunConfig& c) -> double& { return c.init.c0; });
    add_double(t, "u_mean", [](RunConfig& c) -> double& { return c.init.u_mean; });
    t.push_back({"acoustic_mode",
                 [](RunConfig& c, std::string_view v) {
                   c.init.acoustic = parse_enum<AcousticMode>(
                       v, {{"standing", AcousticMode::Standing},
                           {"right_going", AcousticMode::RightGoing}});
                 },
                 [](const RunConfig& c) {
                   return std::string(c.init.acoustic == AcousticMode::RightGoing ? "right_going"
                                                                                  : "standing");
                 }});
    auto always = [](const RunConfig&) { return true; };
    add_profile(t, "alpha_profile",
                [](RunConfig& c) -> PerturbationProfile& { return c.init.alpha_profile; }, always);
    add_profile(t, "velocity_profile",
                [](RunConfig& c) -> PerturbationProfile& { return c.init.velocity_profile; },
                always);
    add_profile(t, "slip_profile",
                [](RunConfig& c) -> PerturbationProfile& { return c.init.slip_profile; }, always);
    add_profile(
        t, "entropy_profile.plus",
        [](RunConfig& c) -> PerturbationProfile& { return entropy_ref(c.init.entropy_plus); },
        [](const RunConfig& c) { return c.init.entropy_plus.has_value(); });
    add_profile(
        t, "entropy_profile.minus",
        [](RunConfig& c) -> PerturbationProfile& { return entropy_ref(c.init.entropy_minus); },
        [](const RunConfig& c) { return c.init.entropy_minus.has_value(); });
    Entry ladder{"sweep.epsilons",
                 [](RunConfig& c, std::string_view v) {
                   c.sweep_epsilons.clear();
                   while (true) {
                     const auto comma = v.find(',');
                     c.sweep_epsilons.push_back(parse_double(trim(v.substr(0, comma))));
                     if (comma == std::string_view::npos) break;
                     v.remove_prefix(comma + 1);
                   }
                 },
                 [](const RunConfig& c) {
                   std::string s;
                   for (double e : c.sweep_epsilons) s += (s.empty() ? "" : ",") + num(e);
                   return s;
                 }};
    ladder.printed = [](const RunConfig& c) { return !c.sweep_epsilons.empty(); };
    t.push_back(std::move(ladder));
    return t;
  }();
  return table;
}

const Entry* find_entry(std::string_view key) {
  for (const auto& e : key_table())
    if (e.key == key) return &e;
  return nullptr;
}

}  // namespace

RunConfig parse_config_text(std::string_view text) {
  struct Line {
    int number;
    std::string key, value;
  };
  std::vector<Line> lines;
  int number = 0;
  while (!text.empty()) {
    ++number;
    const auto nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    const auto eq = raw.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", number, raw));
    Line l{number, std::string(trim(raw.substr(0, eq))), std::string(trim(raw.substr(eq + 1)))};
    if (!find_entry(l.key))
      throw ConfigError(fmt::format("line {}: unknown key '{}'", number, l.key));
    for (const auto& prev : lines)
      if (prev.key == l.key)
        throw ConfigError(fmt::format("line {}: key '{}' repeated (first on line {})", number,
                                      l.key, prev.number));
    lines.push_back(std::move(l));
  }

  ModelId model = RunConfig{}.model;
  for (const auto& l : lines)
    if (l.key == "model") {
      try {
        model = model_from_string(l.value);
      } catch (const std::exception& e) {
        throw ConfigError(fmt::format("line {}: key 'model': {}", l.number, e.what()));
      }
    }
  RunConfig cfg = default_config(model);
  bool has_tau = false;
  for (const auto& l : lines) {
    try {
      find_entry(l.key)->set(cfg, l.value);
    } catch (const std::exception& e) {
      throw ConfigError(fmt::format("line {}: key '{}': {}", l.number, l.key, e.what()));
    }
    has_tau = has_tau || l.key == "tau_relax";
  }
  if (has_relaxation(cfg.model) && !has_tau)
    throw ConfigError(fmt::format("missing key 'tau_relax': relaxation coefficient required for {}",
                                  to_string(cfg.model)));
  if (auto errs = validate(cfg); !errs.empty())
    throw ConfigError(fmt::format("invalid configuration: {}", fmt::join(errs, "; ")));
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string print_config(const RunConfig& config) {
  std::string out;
  for (const auto& e : key_table())
    if (e.printed(config)) out += fmt::format("{} = {}\n", e.key, e.get(config));
  return out;
}

// ---------------------------------------------------------------------------------------------

std::vector<std::string> trajectory_columns() {
  std::vector<std::string> cols{"time",  "kinetic", "internal", "dissipated_viscous",
                                "dissipated_relaxation", "total"};
  for (const auto& n : indicator_names())
    if (n != "m7_normalized_residual") cols.push_back(n);
  return cols;
}

std::vector<std::string> snapshot_columns(ModelId model) {
  std::vector<std::string> cols{"time", "x", "R_plus", "R_minus", "alpha"};
  if (is_two_velocity(model)) {
    cols.push_back("u_plus");
    cols.push_back("u_minus");
  } else {
    cols.push_back("u");
  }
  for (const char* c : {"S_plus", "S_minus", "p_plus", "p_minus"}) cols.push_back(c);
  return cols;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << fmt::format("{}\n", fmt::join(trajectory_columns(), ","));
  for (const auto& r : traj.records) {
    const auto& e = r.energy;
    std::vector<double> row{r.state.time, e.kinetic, e.internal, e.dissipated_viscous,
                            e.dissipated_relaxation, e.total()};
    for (const auto& n : indicator_names())
      if (n != "m7_normalized_residual") row.push_back(indicator_value(r.indicators, n));
    out << fmt::format("{:.17g}\n", fmt::join(row, ","));
  }
}

void write_snapshot_csv(std::ostream& out, const Trajectory& traj, const RunConfig& config) {
  if (traj.records.empty()) return;
  const ModelId model = traj.records.front().state.model;
  out << fmt::format("{}\n", fmt::join(snapshot_columns(model), ","));
  for (const auto& r : traj.records) {
    const PhaseState& s = r.state;
    const ClosureFields th = closure_project(s, config.params);
    for (int i = 0; i < s.n_cells(); ++i) {
      std::vector<double> row{s.time, config.grid.center(i), s.R_plus[i],
                              is_two_phase(model) ? s.R_minus[i] : 0.0, th.alpha[i]};
      if (is_two_velocity(model)) {
        row.push_back(s.m_plus[i] / s.R_plus[i]);
        row.push_back(s.m_minus[i] / s.R_minus[i]);
      } else {
        row.push_back(s.m[i] / (s.R_plus[i] + (is_two_phase(model) ? s.R_minus[i] : 0.0)));
      }
      row.push_back(has_entropy(model) ? s.S_plus[i] : 0.0);
      row.push_back(has_entropy(model) ? s.S_minus[i] : 0.0);
      row.push_back(th.p_plus[i]);
      row.push_back(th.p_minus[i]);
      out << fmt::format("{:.17g}\n", fmt::join(row, ","));
    }
  }
}

// ---------------------------------------------------------------------------------------------

std::string sweep_to_json(const SweepReport& rep) {
  json j;
  j["tool"] = "lowmach";
  j["version"] = std::string(kToolVersion);
  j["model"] = std::string(to_string(rep.base_config.model));
  j["ladder"] = rep.epsilons;
  json cfg = json::object();
  for (const auto& e : key_table())
    if (e.printed(rep.base_config)) cfg[e.key] = e.get(rep.base_config);
  j["config"] = cfg;
  json runs = json::array();
  for (const auto& r : rep.runs) {
    json ind = json::object();
    for (const auto& n : indicator_names()) ind[n] = indicator_value(r.final_indicators, n);
    runs.push_back({{"epsilon", r.epsilon},
                    {"steps", r.steps},
                    {"max_pressure_gap", r.max_pressure_gap},
                    {"error", r.error},
                    {"indicators", ind}});
  }
  j["runs"] = runs;
  json orders = json::array();
  for (const auto& [name, f] : rep.orders)
    orders.push_back(
        {{"indicator", name}, {"slope", f.slope}, {"residual", f.residual}, {"vanished", f.vanished}});
  j["orders"] = orders;
  json verdicts = json::array();
  for (const auto& v : rep.verdicts)
    verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  j["verdicts"] = verdicts;
  j["passed"] = rep.passed;
  return j.dump(2) + "\n";
}

SweepReport sweep_from_json(std::string_view text) {
  SweepReport rep;
  try {
    const json j = json::parse(text);
    std::string cfg_text;
    for (const auto& [k, v] : j.at("config").items()) cfg_text += k + " = " + v.get<std::string>() + "\n";
    rep.base_config = parse_config_text(cfg_text);
    rep.epsilons = j.at("ladder").get<std::vector<double>>();
    for (const auto& r : j.at("runs")) {
      SweepRun run;
      run.epsilon = r.at("epsilon").get<double>();
      run.steps = r.at("steps").get<int>();
      run.max_pressure_gap = r.at("max_pressure_gap").get<double>();
      run.error = r.at("error").get<std::string>();
      const json& ind = r.at("indicators");
      LimitIndicators& li = run.final_indicators;
      li.pressure_gap = ind.at("pressure_gap").get<double>();
      li.density_dev_plus = ind.at("density_dev_plus").get<double>();
      li.density_dev_minus = ind.at("density_dev_minus").get<double>();
      li.pressure_dev = ind.at("pressure_dev").get<double>();
      li.u_variance = ind.at("u_variance").get<double>();
      li.div_norm = ind.at("div_norm").get<double>();
      li.alpha_oracle_err = ind.at("alpha_oracle_err").get<double>();
      li.m7_constraint_residual = ind.at("m7_constraint_residual").get<double>();
      li.m7_constraint_scale = ind.at("m7_constraint_scale").get<double>();
      rep.runs.push_back(std::move(run));
    }
    for (const auto& o : j.at("orders"))
      rep.orders.emplace_back(o.at("indicator").get<std::string>(),
                              OrderFit{o.at("slope").get<double>(), o.at("residual").get<double>(),
                                       o.at("vanished").get<bool>()});
    for (const auto& v : j.at("verdicts"))
      rep.verdicts.push_back({v.at("name").get<std::string>(), v.at("passed").get<bool>(),
                              v.at("detail").get<std::string>()});
    rep.passed = j.at("passed").get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed sweep report: {}", e.what()));
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------

std::string describe_model(ModelId model) {
  std::string eq;
  switch (model) {
    case ModelId::M1:
      eq =
          "one-phase isentropic compressible Navier-Stokes\n"
          "  d_t rho + d_x(rho u) = 0\n"
          "  d_t(rho u) + d_x(rho u^2) + d_x p / eps^2 = (2 mu + lambda) d_xx u\n"
          "  p = rho^gamma+\n";
      break;
    case ModelId::M2:
      eq =
          "two-phase, one velocity, isentropic, algebraic pressure closure\n"
          "  d_t(a+ rho+) + d_x(a+ rho+ u) = 0\n"
          "  d_t(a- rho-) + d_x(a- rho- u) = 0\n"
          "  d_t(rho u) + d_x(rho u^2) + d_x(a+ p+ + a- p-) / eps^2 = (2 mu + lambda) d_xx u\n"
          "  p+(rho+) = p-(rho-),  a+ + a- = 1,  p+- = rho+-^gamma+-\n";
      break;
    case ModelId::M3:
      eq =
          "two-phase, one velocity, isentropic, relaxation (PDE) closure\n"
          "  d_t(a+ rho+) + d_x(a+ rho+ u) = 0\n"
          "  d_t(a- rho-) + d_x(a- rho- u) = 0\n"
          "  d_t(rho u) + d_x(rho u^2) + d_x(a+ p+ + a- p-) / eps^2 = (2 mu + lambda) d_xx u\n"
          "  d_t a+ + u d_x a+ = a+ a- (p+ - p-) / (eps^2 tau)\n";
      break;
    case ModelId::M4:
      eq =
          "two-phase, one velocity, non-isentropic, algebraic pressure closure\n"
          "  d_t(a+- rho+-) + d_x(a+- rho+- u) = 0\n"
          "  d_t(rho u) + d_x(rho u^2) + d_x(a+ p+ + a- p-) / eps^2 = (2 mu + lambda) d_xx u\n"
          "  d_t S+- + u d_x S+- = 0\n"
          "  p+-(rho+-, S+-) = rho+-^gamma+- exp(S+-),  p+ = p-\n";
      break;
    case ModelId::M5:
      eq =
          "two-phase, two velocities, isentropic, algebraic pressure closure\n"
          "  d_t(a+- rho+-) + d_x(a+- rho+- u+-) = 0\n"
          "  d_t(a+- rho+- u+-) + d_x(a+- rho+- u+-^2) + a+- d_x p+- / eps^2 +- p_int d_x a+ = F+-\n"
          "  p+(rho+) = p-(rho-)\n";
      break;
    case ModelId::M6:
      eq =
          "two-phase, two velocities, non-isentropic, algebraic pressure closure\n"
          "  d_t(a+- rho+-) + d_x(a+- rho+- u+-) = 0\n"
          "  d_t(a+- rho+- u+-) + d_x(a+- rho+- u+-^2) + a+- d_x p+- / eps^2 +- p_int d_x a+ = F+-\n"
          "  d_t S+- + u+- d_x S+- = 0\n"
          "  p+(rho+, S+) = p-(rho-, S-)\n";
      break;
    case ModelId::M7:
      eq =
          "two-phase, two velocities, non-isentropic, relaxation (PDE) closure with u_I = u+\n"
          "  d_t(a+- rho+-) + d_x(a+- rho+- u+-) = 0\n"
          "  d_t(a+- rho+- u+-) + d_x(a+- rho+- u+-^2) + a+- d_x p+- / eps^2 +- p_int d_x a+ = F+-\n"
          "  d_t S+- + u+- d_x S+- = 0\n"
          "  d_t a+ + u+ d_x a+ = a+ a- (p+ - p-) / (eps^2 tau)\n";
      break;
  }
  std::string fields;
  for (Field f : active_fields(model)) fields += (fields.empty() ? "" : ", ") + std::string(to_string(f));
  std::string extra;
  if (is_two_velocity(model))
    extra =
        "  p_int: common pressure (pint_rule = equilibrium) or pint_value (pint_rule = constant)\n"
        "  F+- = (1/eta) |u+ - u-| (u-+ - u+-) when eta_drag > 0, else 0\n";
  return fmt::format("{}: {}{}  active fields: {}\n", to_string(model), eq, extra, fields);
}

}  // namespace lowmach
