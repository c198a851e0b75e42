#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "edlab/acceptance.hpp"
#include "edlab/config.hpp"
#include "edlab/errors.hpp"
#include "edlab/inference.hpp"
#include "edlab/kernel.hpp"
#include "edlab/run.hpp"

namespace py = pybind11;
using namespace edlab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v, const GridSpec& grid) {
  if (grid.dim == 2) {
    py::array_t<double> a({grid.points[0], grid.points[1]});
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
  }
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::dict fields_dict(const VelocityFields& f) {
  py::dict d;
  d["rho"] = to_array(f.rho, f.grid);
  const char* axes[2] = {"x", "y"};
  for (int a = 0; a < f.grid.dim; ++a) {
    const std::string s = f.grid.dim == 1 ? "" : std::string("_") + axes[a];
    d[("u" + s).c_str()] = to_array(f.u[a], f.grid);
    d[("b" + s).c_str()] = to_array(f.b[a], f.grid);
    d[("v" + s).c_str()] = to_array(f.v[a], f.grid);
  }
  return d;
}

py::list checks_list(const std::vector<CheckResult>& checks) {
  py::list out;
  for (const auto& c : checks) out.append(py::dict(py::arg("name") = c.name, py::arg("passed") = c.passed,
                                                   py::arg("detail") = c.detail));
  return out;
}

py::dict outcome_dict(const RunOutcome& r) {
  py::list files;
  for (const auto& f : r.files) files.append(f.name);
  py::dict report;
  for (const auto& [k, v] : r.report) report[k.c_str()] = v;
  return py::dict(py::arg("directory") = r.dir.string(), py::arg("files") = files,
                  py::arg("checks") = checks_list(r.checks), py::arg("report") = report,
                  py::arg("passed") = r.passed);
}

}  // namespace

PYBIND11_MODULE(edlab, m) {
  m.doc() = "Entropic dynamics laboratory: closed-form states, grid velocities, scenarios and inference";
  m.attr("__version__") = EDLAB_VERSION;

  static py::exception<ConfigurationError> config_error(m, "ConfigurationError", PyExc_ValueError);
  static py::exception<Error> edlab_error(m, "Error", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ConfigurationError& e) {
      py::set_error(config_error, e.what());
    } catch (const IoError& e) {
      PyErr_SetString(PyExc_OSError, e.what());
    } catch (const DomainError& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const Error& e) {
      py::set_error(edlab_error, e.what());
    }
  });

  m.def("list_scenarios", [] { return scenario_names(); });

  m.def(
      "evaluate",
      [](const std::string& config_text) {
        const SnapshotSet set = run_scenario(parse_config(config_text));
        py::list snaps;
        for (const auto& s : set.snapshots) {
          py::dict d = fields_dict(s.fields);
          d["time"] = s.time;
          d["label"] = s.label;
          d["x"] = py::array_t<double>(py::cast(s.fields.grid.axis_coords(0)));
          if (s.fields.grid.dim == 2) d["y"] = py::array_t<double>(py::cast(s.fields.grid.axis_coords(1)));
          snaps.append(d);
        }
        py::dict report;
        for (const auto& [k, v] : set.report) report[k.c_str()] = v;
        return py::dict(py::arg("scenario") = set.scenario, py::arg("time_unit") = set.time_unit,
                        py::arg("snapshots") = snaps, py::arg("checks") = checks_list(set.checks),
                        py::arg("report") = report);
      },
      py::arg("config_text"), "Evaluate a scenario from config text without writing files.");

  m.def(
      "run",
      [](const std::string& config_text, std::optional<std::string> output_dir) {
        std::optional<std::filesystem::path> dir;
        if (output_dir) dir = *output_dir;
        return outcome_dict(execute_run(parse_config(config_text), dir));
      },
      py::arg("config_text"), py::arg("output_dir") = py::none(),
      "Evaluate a scenario and write CSV, SVG and manifest.json.");

  m.def(
      "sample",
      [](const std::string& config_text, std::optional<std::string> output_dir) {
        std::optional<std::filesystem::path> dir;
        if (output_dir) dir = *output_dir;
        return outcome_dict(execute_sample(parse_config(config_text), dir));
      },
      py::arg("config_text"), py::arg("output_dir") = py::none(),
      "Sample trajectories and write histograms, trajectories and manifest.json.");

  m.def(
      "velocities",
      [](double x_min, double x_max, py::array_t<std::complex<double>, py::array::c_style | py::array::forcecast> psi,
         double hbar, double mass, double eta) {
        if (psi.ndim() != 1) throw ShapeError("psi must be one-dimensional");
        const auto n = static_cast<std::size_t>(psi.shape(0));
        const GridSpec grid = GridSpec::line(x_min, x_max, n);
        WaveField w{grid, std::vector<cplx>(psi.data(), psi.data() + n), 0.0};
        const UnitsConfig units{hbar, mass, eta};
        units.validate();
        py::dict d = fields_dict(velocities_from_wavefield(w, units));
        return d;
      },
      py::arg("x_min"), py::arg("x_max"), py::arg("psi"), py::arg("hbar") = 1.0, py::arg("mass") = 1.0,
      py::arg("eta") = 1.0, "Osmotic, drift and current velocities of a sampled 1D wave function.");

  m.def(
      "bayes_update",
      [](std::vector<double> prior, std::vector<std::vector<double>> likelihood, std::size_t observed) {
        const auto r = inference::bayes_update(inference::Distribution(std::move(prior)),
                                               inference::ConditionalTable(std::move(likelihood)), observed);
        return py::make_tuple(r.posterior.weights(), r.evidence_probability);
      },
      py::arg("prior"), py::arg("likelihood"), py::arg("observed"),
      "Posterior and evidence probability; likelihood[j][i] = P(evidence j | hypothesis i).");

  m.def(
      "maxent_solve",
      [](std::vector<std::vector<double>> features, std::vector<double> targets,
         std::optional<std::vector<double>> prior) {
        if (features.size() != targets.size()) throw DomainError("one target per feature row");
        const std::size_t n = prior ? prior->size() : (features.empty() ? 0 : features.front().size());
        const auto q = prior ? inference::Distribution(*prior) : inference::Distribution::uniform(n);
        std::vector<inference::MomentConstraint> cs;
        for (std::size_t k = 0; k < features.size(); ++k) cs.push_back({features[k], targets[k]});
        const auto r = inference::maxent_solve(q, cs);
        return py::dict(py::arg("distribution") = r.distribution.weights(), py::arg("multipliers") = r.multipliers,
                        py::arg("iterations") = r.iterations, py::arg("residual") = r.residual);
      },
      py::arg("features"), py::arg("targets"), py::arg("prior") = py::none());

  m.def(
      "shannon_entropy",
      [](std::vector<double> p, double k) { return inference::shannon_entropy(inference::Distribution(std::move(p)), k); },
      py::arg("p"), py::arg("k") = 1.0);

  m.def(
      "acceptance_criterion",
      [](int id) {
        const auto r = acceptance::run_criterion(id);
        return py::dict(py::arg("id") = r.id, py::arg("name") = r.name, py::arg("passed") = r.passed,
                        py::arg("detail") = r.detail, py::arg("seconds") = r.seconds);
      },
      py::arg("id"), "Run one acceptance criterion (1-12).");
}
