#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "epsl/artifact.hpp"
#include "epsl/cli.hpp"
#include "epsl/metrics.hpp"
#include "epsl/moead.hpp"
#include "epsl/problems.hpp"
#include "epsl/runner.hpp"

namespace py = pybind11;
using namespace epsl;

PYBIND11_MODULE(_epsl, m) {
  m.doc() = "Evolutionary Pareto set learning core";

  py::register_exception<Error>(m, "EpslError", PyExc_RuntimeError);

  m.def("problem_names", &problem_names);

  m.def(
      "problem_info",
      [](const std::string& name) {
        auto p = make_problem(name);
        const auto& s = p->spec();
        py::dict d;
        d["name"] = s.name;
        d["n"] = s.n;
        d["m"] = s.m;
        d["lower"] = s.bounds.lower();
        d["upper"] = s.bounds.upper();
        if (s.has_hints()) {
          d["ideal"] = *s.ideal_hint;
          d["nadir"] = *s.nadir_hint;
        }
        return d;
      },
      py::arg("name"));

  m.def(
      "evaluate",
      [](const std::string& name, const std::vector<Vector>& xs) {
        auto p = make_problem(name);
        return evaluate_batch(*p, xs);
      },
      py::arg("problem"), py::arg("xs"), "Objective vectors of a batch of decision vectors.");

  m.def("nondominated", &nondominated_filter, py::arg("points"),
        "Indices of the points no other point dominates.");
  m.def("hypervolume", &hypervolume_exact, py::arg("points"), py::arg("reference"),
        "Exact hypervolume for 2 or 3 objectives.");
  m.def(
      "igd_plus",
      [](const std::vector<ObjectiveVector>& pts, const std::vector<ObjectiveVector>& ref) {
        return igd_plus(pts, ref);
      },
      py::arg("points"), py::arg("reference_front"));
  m.def(
      "das_dennis",
      [](std::size_t objectives, std::size_t divisions) {
        std::vector<Vector> out;
        for (const auto& w : das_dennis(objectives, divisions)) out.push_back(w.weights());
        return out;
      },
      py::arg("objectives"), py::arg("divisions"));

  m.def(
      "run_json",
      [](const std::string& config) {
        const RunConfig cfg = run_config_from_json(Json::parse(config));
        std::string out;
        {
          py::gil_scoped_release release;
          auto problem = problem_for(cfg);
          out = to_json(run(cfg, *problem)).dump();
        }
        return out;
      },
      py::arg("config"), "Run from a JSON config; returns the run artifact as JSON text.");

  m.def(
      "default_config_json", [] { return to_json(RunConfig{}).dump(); },
      "Default run config as JSON text.");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line entry point; returns (exit code, stdout, stderr).");
}
