#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <sstream>

#include "opbde/errors.hpp"
#include "opbde/experiment.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using namespace opbde;

namespace {

// Row j of the array is grid row j (ascending y), matching snapshot files.
py::array_t<double> to_array(const CellField& f) {
  const GridSpec& g = f.grid();
  py::array_t<double> out({g.Ny, g.Nx});
  std::memcpy(out.mutable_data(), f.values().data(), f.size() * sizeof(double));
  return out;
}

CellField from_array(const GridSpec& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(0) != g.Ny || a.shape(1) != g.Nx) {
    throw py::value_error("array shape must be (Ny, Nx) of the grid");
  }
  return CellField(g, std::vector<double>(a.data(), a.data() + a.size()));
}

ExperimentKind kind_from(const std::string& s) {
  if (s == "coarsening") return ExperimentKind::coarsening;
  if (s == "droplet_flat") return ExperimentKind::droplet_flat;
  if (s == "droplet_curved") return ExperimentKind::droplet_curved;
  if (s == "custom") return ExperimentKind::custom;
  throw py::value_error("unknown experiment kind '" + s + "'");
}

// Applies "section.key = value" overrides by rewriting the canonical text.
RunConfig with_overrides(const RunConfig& base, const py::dict& overrides) {
  std::string text = to_text(base);
  std::ostringstream extra;
  for (auto item : overrides) {
    const std::string full = py::str(item.first);
    const auto dot = full.find('.');
    if (dot == std::string::npos) throw py::value_error("override keys look like 'section.key'");
    const std::string section = full.substr(0, dot);
    const std::string key = full.substr(dot + 1);
    const std::string value = py::str(item.second);
    // Drop the existing line, then append the new value under its section.
    std::istringstream in(text);
    std::ostringstream kept;
    std::string line, current;
    bool placed = false;
    while (std::getline(in, line)) {
      if (!line.empty() && line.front() == '[') current = line.substr(1, line.find(']') - 1);
      const auto eq = line.find('=');
      if (current == section && eq != std::string::npos) {
        std::string k = line.substr(0, eq);
        k.erase(k.find_last_not_of(" \t") + 1);
        if (k == key) {
          kept << key << " = " << value << '\n';
          placed = true;
          continue;
        }
      }
      kept << line << '\n';
    }
    if (!placed) throw py::key_error("unknown config key '" + full + "'");
    text = kept.str();
  }
  return parse_config_text(text, "<overrides>");
}

py::dict diagnostics_dict(const Diagnostics& d) {
  return py::dict("step"_a = d.step, "t"_a = d.t, "energy"_a = d.energy, "volume"_a = d.volume,
                  "volume_drift"_a = d.volume_drift, "energy_law_residual"_a = d.energy_law_residual,
                  "pumped_power"_a = d.pumped_power, "solver_iters"_a = d.solver_iters,
                  "solver_residual"_a = d.solver_residual);
}

}  // namespace

PYBIND11_MODULE(_opbde, m) {
  m.doc() = "Embedded-domain Cahn-Hilliard solver with dynamic boundary conditions";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolveError>(m, "SolveError", PyExc_RuntimeError);
  py::register_exception<MeasurementError>(m, "MeasurementError", PyExc_RuntimeError);

  py::class_<RunConfig>(m, "RunConfig")
      .def_property_readonly("experiment", [](const RunConfig& c) { return to_string(c.experiment); })
      .def_property_readonly("solver", [](const RunConfig& c) { return to_string(c.solver_kind); })
      .def_readonly("seed", &RunConfig::seed)
      .def_readonly("output_dir", &RunConfig::output_dir)
      .def_readonly("dt", &RunConfig::dt)
      .def_readonly("t_final", &RunConfig::t_final)
      .def_property_readonly("eps", [](const RunConfig& c) { return c.physics.eps; })
      .def_property_readonly("gamma_inv", [](const RunConfig& c) { return c.physics.gamma_inv; })
      .def_property_readonly("shape", [](const RunConfig& c) {
        const GridSpec g = run_grid(c);
        return py::make_tuple(g.Ny, g.Nx);
      })
      .def("steps", &RunConfig::steps)
      .def("to_text", [](const RunConfig& c) { return to_text(c); })
      .def("digest", [](const RunConfig& c) { return config_digest(c); })
      .def("replace", &with_overrides, "overrides"_a,
           "Copy with {'section.key': value} entries changed, validated like a file.")
      .def("__repr__", [](const RunConfig& c) {
        return "<RunConfig " + to_string(c.experiment) + "/" + to_string(c.solver_kind) + " " + config_digest(c) +
               ">";
      });

  m.def("preset", [](const std::string& kind) { return preset(kind_from(kind)); }, "kind"_a);
  m.def("parse_config", &parse_config, "path"_a);
  m.def("parse_config_text", &parse_config_text, "text"_a, "origin"_a = "<string>");

  m.def("seeded_uniform", &seeded_uniform, "seed"_a, "kx"_a, "ky"_a);

  m.def(
      "initial_field",
      [](const RunConfig& c) { return to_array(build_problem(c).phi0); }, "config"_a);
  m.def(
      "psi",
      [](const RunConfig& c) {
        const Problem p = build_problem(c);
        return p.embedding ? to_array(p.embedding->psi) : to_array(CellField(p.grid, 1.0));
      },
      "config"_a, "Diffuse indicator of the domain on the run grid.");

  m.def(
      "run",
      [](const RunConfig& c, const std::function<void(py::dict)>& on_step) {
        RunSummary s;
        {
          StepObserver obs;
          if (on_step) obs = [&](const CellField&, const Diagnostics& d) { on_step(diagnostics_dict(d)); };
          s = run(c, obs);
        }
        py::list records;
        for (const Diagnostics& d : s.records) records.append(diagnostics_dict(d));
        return py::dict("phi"_a = to_array(s.final_phi), "t"_a = s.final_t, "steps"_a = s.steps,
                        "records"_a = records, "max_abs_volume_drift"_a = s.max_abs_volume_drift,
                        "max_energy_law_residual"_a = s.max_energy_law_residual,
                        "max_relative_energy_law_residual"_a = s.max_relative_energy_law_residual,
                        "g_floor_hits"_a = s.g_floor_hits);
      },
      "config"_a, "on_step"_a = nullptr, "Steps the configuration in memory; on_step receives every diagnostics row.");

  m.def(
      "cmd_run",
      [](const RunConfig& c) {
        std::ostringstream log;
        const int rc = cmd_run(c, log);
        return py::make_tuple(rc, log.str());
      },
      "config"_a, "Writes the run's files; returns (exit status, log).");

  m.def(
      "compare",
      [](const RunConfig& ref, const RunConfig& ext, const std::vector<double>& times, double mask) {
        const ComparisonReport r = compare(ref, ext, times, mask);
        return py::dict("times"_a = r.times, "l2_errors"_a = r.l2_errors, "eps"_a = r.eps,
                        "digest"_a = r.config_digest);
      },
      "reference"_a, "extended"_a, "times"_a, "mask_threshold"_a = 0.5);

  m.def(
      "gamma_sweep",
      [](const RunConfig& c, const std::vector<double>& gammas, double slack) {
        const GammaSweepReport r = gamma_sweep(c, gammas, slack);
        return py::dict("gammas"_a = r.gammas, "times"_a = r.times, "energies"_a = r.energies,
                        "ordered"_a = r.ordered, "worst_violation"_a = r.worst_violation);
      },
      "config"_a, "gammas"_a, "slack"_a = 1e-6);

  m.def(
      "contact_angle",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& phi, std::tuple<double, double> x_range,
         std::tuple<double, double> y_range, double band_min, double band_max, double substrate_y) {
        if (phi.ndim() != 2) throw py::value_error("phi must be two-dimensional");
        const GridSpec g = GridSpec::box(std::get<0>(x_range), std::get<1>(x_range), std::get<0>(y_range),
                                         std::get<1>(y_range), static_cast<int>(phi.shape(1)),
                                         static_cast<int>(phi.shape(0)));
        const ContactAngle a = contact_angle(from_array(g, phi), Substrate{substrate_y, 0.0, 1.0}, band_min, band_max);
        return py::dict("degrees"_a = a.degrees, "left"_a = a.left_degrees, "right"_a = a.right_degrees,
                        "center"_a = py::make_tuple(a.circle.cx, a.circle.cy), "radius"_a = a.circle.radius);
      },
      "phi"_a, "x_range"_a, "y_range"_a, "band_min"_a, "band_max"_a, "substrate_y"_a = 0.0,
      "Contact angle against a flat substrate for a field sampled at cell centres of the given box.");

  m.def("read_snapshot", [](const std::string& path) {
    double t = 0.0;
    const CellField f = read_snapshot(path, &t);
    return py::make_tuple(to_array(f), t);
  });
}
