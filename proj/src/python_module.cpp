#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "lowmach/cli.hpp"
#include "lowmach/diagnostics.hpp"
#include "lowmach/eos.hpp"
#include "lowmach/initdata.hpp"
#include "lowmach/io.hpp"
#include "lowmach/scheme.hpp"
#include "lowmach/sweep.hpp"

namespace py = pybind11;
using namespace lowmach;

namespace {

py::dict indicators_dict(const LimitIndicators& ind) {
  py::dict d;
  for (const auto& n : indicator_names()) d[py::str(n)] = indicator_value(ind, n);
  return d;
}

py::dict energy_dict(const EnergyBreakdown& e) {
  py::dict d;
  d["kinetic"] = e.kinetic;
  d["internal"] = e.internal;
  d["dissipated_viscous"] = e.dissipated_viscous;
  d["dissipated_relaxation"] = e.dissipated_relaxation;
  d["total"] = e.total();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "1-D periodic finite-volume lab for scaled two-phase low-Mach models";
  m.attr("__version__") = std::string(kToolVersion);

  // Translators run most-recent first, so the base class goes in first.
  auto& base = py::register_exception<Error>(m, "Error");
  py::register_exception<DomainError>(m, "DomainError", py::make_tuple(base, py::handle(PyExc_ValueError)));
  py::register_exception<ConfigError>(m, "ConfigError", base);

  py::enum_<ModelId>(m, "ModelId")
      .value("M1", ModelId::M1)
      .value("M2", ModelId::M2)
      .value("M3", ModelId::M3)
      .value("M4", ModelId::M4)
      .value("M5", ModelId::M5)
      .value("M6", ModelId::M6)
      .value("M7", ModelId::M7);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init([](const std::string& model) { return default_config(model_from_string(model)); }),
           py::arg("model") = "M2")
      .def_static("from_text", &parse_config_text, py::arg("text"))
      .def_static("from_file", [](const std::string& p) { return parse_config(p); }, py::arg("path"))
      .def("to_text", &print_config)
      .def("validate", &validate)
      .def("with_epsilon",
           [](RunConfig c, double eps) {
             c.epsilon = eps;
             return c;
           })
      .def_property_readonly("model", [](const RunConfig& c) { return std::string(to_string(c.model)); })
      .def_readwrite("epsilon", &RunConfig::epsilon)
      .def_readwrite("cfl", &RunConfig::cfl)
      .def_readwrite("t_end", &RunConfig::t_end)
      .def_readwrite("output_stride", &RunConfig::output_stride)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("sweep_epsilons", &RunConfig::sweep_epsilons)
      .def_property(
          "n_cells", [](const RunConfig& c) { return c.grid.n_cells; },
          [](RunConfig& c, int n) { c.grid.n_cells = n; })
      .def("__eq__", [](const RunConfig& a, const RunConfig& b) { return a == b; })
      .def("__repr__", [](const RunConfig& c) {
        return "<RunConfig " + std::string(to_string(c.model)) + " eps=" + std::to_string(c.epsilon) + ">";
      });

  py::class_<PhaseState>(m, "PhaseState")
      .def_property_readonly("model", [](const PhaseState& s) { return std::string(to_string(s.model)); })
      .def_readonly("time", &PhaseState::time)
      .def_property_readonly("n_cells", &PhaseState::n_cells)
      .def("field", [](const PhaseState& s, const std::string& name) {
        for (Field f : active_fields(s.model))
          if (to_string(f) == name) return s.field(f);
        throw py::key_error("inactive or unknown field '" + name + "'");
      })
      .def("fields", [](const PhaseState& s) {
        py::dict d;
        for (Field f : active_fields(s.model)) d[py::str(std::string(to_string(f)))] = s.field(f);
        return d;
      });

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("steps", &Trajectory::steps)
      .def_readonly("max_pressure_gap", &Trajectory::max_pressure_gap)
      .def("__len__", [](const Trajectory& t) { return t.records.size(); })
      .def("times", [](const Trajectory& t) {
        std::vector<double> v;
        for (const auto& r : t.records) v.push_back(r.state.time);
        return v;
      })
      .def("state", [](const Trajectory& t, int k) { return t.records.at(k < 0 ? t.records.size() + k : k).state; })
      .def("energy", [](const Trajectory& t, int k) { return energy_dict(t.records.at(k < 0 ? t.records.size() + k : k).energy); })
      .def("indicators", [](const Trajectory& t, int k) {
        return indicators_dict(t.records.at(k < 0 ? t.records.size() + k : k).indicators);
      });

  m.def("active_fields", [](const std::string& model) {
    std::vector<std::string> out;
    for (Field f : active_fields(model_from_string(model))) out.emplace_back(to_string(f));
    return out;
  });
  m.def("pressure_barotropic", &pressure_barotropic, py::arg("rho"), py::arg("gamma"));
  m.def("pressure_entropic", &pressure_entropic, py::arg("rho"), py::arg("s"), py::arg("gamma"));
  m.def("sound_speed", &sound_speed, py::arg("rho"), py::arg("s"), py::arg("gamma"));
  m.def(
      "equilibrium_closure",
      [](double Rp, double Rm, double sp, double sm, double gp, double gm, double tol) {
        const ClosureSolution s = equilibrium_closure(Rp, Rm, sp, sm, gp, gm, tol);
        py::dict d;
        d["alpha_plus"] = s.alpha_plus;
        d["rho_plus"] = s.rho_plus;
        d["rho_minus"] = s.rho_minus;
        d["pressure"] = s.pressure;
        d["newton_iters"] = s.newton_iters;
        d["residual"] = s.residual;
        return d;
      },
      py::arg("R_plus"), py::arg("R_minus"), py::arg("s_plus"), py::arg("s_minus"),
      py::arg("gamma_plus"), py::arg("gamma_minus"), py::arg("tol") = kClosureRelTol);
  m.def("make_well_prepared", py::overload_cast<const RunConfig&>(&make_well_prepared));
  m.def("simulate", [](const RunConfig& c) { return simulate(c, make_well_prepared(c)); },
        py::call_guard<py::gil_scoped_release>());
  m.def("simulate_from", &simulate, py::arg("config"), py::arg("init"),
        py::call_guard<py::gil_scoped_release>());
  m.def("strang_step", [](const PhaseState& s, const RunConfig& c) { return strang_step(s, c); });
  m.def("energy_total", [](const PhaseState& s, const RunConfig& c) { return energy_dict(energy_total(s, c)); });
  m.def("indicators", [](const PhaseState& s, const RunConfig& c) { return indicators_dict(indicators(s, c)); });
  m.def("energy_audit", [](const Trajectory& t, const RunConfig& c, double tol) {
    const EnergyAuditReport r = energy_audit(t, c, tol);
    return py::make_tuple(r.passed, r.worst_violation, r.message);
  }, py::arg("trajectory"), py::arg("config"), py::arg("tol") = kEnergyAuditTol);
  m.def("fit_order", [](const std::vector<std::pair<double, double>>& pts) {
    const OrderFit f = fit_order(pts);
    return py::make_tuple(f.slope, f.residual);
  });
  m.def("mach_sweep_json", [](const RunConfig& c, const std::vector<double>& eps, int workers) {
    SweepReport r;
    {
      py::gil_scoped_release release;
      r = mach_sweep(c, eps, workers);
    }
    return sweep_to_json(r);
  }, py::arg("config"), py::arg("epsilons"), py::arg("workers") = 1);
  m.def("describe_model", [](const std::string& model) { return describe_model(model_from_string(model)); });
  m.def("cli_main", [](std::vector<std::string> args) {
    args.insert(args.begin(), "lowmach");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli_main(static_cast<int>(argv.size()), argv.data());
  });
}
