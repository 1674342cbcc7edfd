#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "dcl/analysis.hpp"
#include "dcl/dynamics.hpp"
#include "dcl/error.hpp"
#include "dcl/io.hpp"
#include "dcl/qep.hpp"
#include "dcl/scenario.hpp"
#include "dcl/server.hpp"
#include "dcl/spectra.hpp"

namespace py = pybind11;
using namespace dcl;

namespace {

// Graph arguments arrive either as a family spec / file path or as JSON text of a graph document.
GraphSource source_from(const std::string& graph, bool is_json) {
  if (!is_json) return resolve_graph(graph);
  Json doc;
  try {
    doc = Json::parse(graph);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("graph document is not JSON: ") + e.what());
  }
  return graph_from_json(doc);
}

std::string analyze_json(const std::string& graph, bool is_json, const std::string& method) {
  return report_to_json(analyze(source_from(graph, is_json), analysis_method_from_string(method))).dump();
}

std::string family_spectrum_json(const std::string& spec, double s) {
  return spectrum_to_json(family_spectrum(GraphFamily::parse(spec), s)).dump();
}

Json limit_to_json(const LimitPrediction& p) {
  Json out{{"kind", to_string(p.kind)}};
  if (p.limit) out["limit"] = std::vector<double>(p.limit->begin(), p.limit->end());
  if (p.oscillation) {
    const auto& o = *p.oscillation;
    out["oscillation"] = {{"frequency", o.frequency},
                          {"offset", std::vector<double>(o.offset.begin(), o.offset.end())},
                          {"amplitudes", o.amplitudes},
                          {"phases", o.phases}};
  }
  return out;
}

py::dict run_scenario_py(const std::string& scenario_json_or_name, bool is_json) {
  Scenario sc;
  if (is_json) {
    Json doc;
    try {
      doc = Json::parse(scenario_json_or_name);
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::ParseError, std::string("scenario is not JSON: ") + e.what());
    }
    sc = scenario_from_json(doc);
  } else {
    sc = builtin_scenario(scenario_json_or_name);
  }
  ScenarioResult result;
  {
    py::gil_scoped_release release;
    result = run_scenario(sc);
  }
  const auto& traj = result.trajectory;
  const Eigen::Index dim = traj.states.empty() ? 0 : traj.states.front().size();
  Matrix states(static_cast<Eigen::Index>(traj.states.size()), dim);
  for (std::size_t i = 0; i < traj.states.size(); ++i) states.row(static_cast<Eigen::Index>(i)) = traj.states[i];
  py::dict out;
  out["times"] = Vector(Eigen::Map<const Vector>(traj.times.data(), static_cast<Eigen::Index>(traj.times.size())));
  out["s_values"] =
      Vector(Eigen::Map<const Vector>(traj.s_values.data(), static_cast<Eigen::Index>(traj.s_values.size())));
  out["states"] = states;
  out["planar"] = traj.planar;
  out["status"] = to_string(traj.status);
  out["summary"] = result.summary.dump();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Stability analysis and simulation of deformed Laplacian consensus";

  // The module attribute keeps the exception type alive for the translator.
  static PyObject* error_type = py::exception<Error>(m, "DclError", PyExc_ValueError).ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type, instance.ptr());
    }
  });

  m.def("analyze_json", &analyze_json, py::arg("graph"), py::arg("is_json"), py::arg("method") = "auto",
        py::call_guard<py::gil_scoped_release>());
  m.def("format_report_json", [](const std::string& report) {
    return format_report(report_from_json(Json::parse(report)));
  });
  m.def("graph_json", [](const std::string& graph, bool is_json) {
    return graph_to_json(source_from(graph, is_json).graph).dump();
  });
  m.def("q_poly", [](const std::string& graph, bool is_json) { return q_poly(source_from(graph, is_json).graph); });
  m.def("classify_at", [](const std::string& graph, bool is_json, double s) {
    return to_string(classify_at(source_from(graph, is_json).graph, s));
  });
  m.def("system_matrix", [](const std::string& graph, bool is_json, double s) -> Matrix {
    return -deformed_laplacian(source_from(graph, is_json).graph, s);
  });
  m.def("spectrum", [](const std::string& graph, bool is_json, double s) -> ComplexVector {
    return eigenvalues(-deformed_laplacian(source_from(graph, is_json).graph, s));
  });
  m.def("family_spectrum_json", &family_spectrum_json);
  m.def("sweep_threshold", [](const std::string& graph, bool is_json, double lo, double hi, double step) {
    const Graph g = source_from(graph, is_json).graph;
    py::gil_scoped_release release;
    return sweep_threshold(g, lo, hi, step);
  });
  m.def("qep_eigenvalues", [](const std::string& graph, bool is_json) {
    const QepResult r = qep_solve(source_from(graph, is_json).graph);
    return py::make_tuple(r.finite_eigenvalues, r.infinite_count);
  });
  m.def("predicted_limit_json", [](const std::string& graph, bool is_json, double s, const Vector& x0) {
    return limit_to_json(predicted_limit(source_from(graph, is_json).graph, s, x0)).dump();
  });
  m.def("run_scenario", &run_scenario_py, py::arg("scenario"), py::arg("is_json"));
  m.def("builtin_scenario_names", &builtin_scenario_names);
  m.def("builtin_scenario_json", [](const std::string& name) { return scenario_to_json(builtin_scenario(name)).dump(); });

  py::class_<Server>(m, "Server")
      .def(py::init([](const std::string& address, std::uint16_t port, int threads, std::size_t max_sessions) {
             return std::make_unique<Server>(ServerOptions{address, port, threads, max_sessions});
           }),
           py::arg("address") = "127.0.0.1", py::arg("port") = 0, py::arg("threads") = 2,
           py::arg("max_sessions") = 64)
      .def("start", &Server::start, py::call_guard<py::gil_scoped_release>())
      .def("stop", &Server::stop, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("port", &Server::port);
}
