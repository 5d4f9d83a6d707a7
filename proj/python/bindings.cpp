#include "imexest/experiment.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace imexest;
using nlohmann::json;

namespace {

std::string dump_tableau(const std::string& name) { return pair_to_json(builtin(name)).dump(); }

py::dict validate_tableau(const std::string& text) {
  const auto report = validate(pair_from_json(json::parse(text)));
  py::dict out;
  out["ok"] = report.ok();
  out["violations"] = report.violations;
  out["warnings"] = report.warnings;
  return out;
}

std::string run_config(const std::string& text) {
  const auto cfg = RunConfig::from_json(json::parse(text));
  ReportRow row;
  {
    py::gil_scoped_release release;
    row = run(cfg);
  }
  return row.to_json().dump();
}

std::string table_rows(int id, int threads) {
  std::vector<ReportRow> rows;
  {
    py::gil_scoped_release release;
    rows = reproduce_table(id, threads);
  }
  json out = json::array();
  for (const auto& r : rows) out.push_back(r.to_json());
  return out.dump();
}

std::string table_csv(int id, int threads) {
  py::gil_scoped_release release;
  return render_csv(reproduce_table(id, threads));
}

std::vector<py::dict> converge(const std::string& text, int levels) {
  const auto cfg = RunConfig::from_json(json::parse(text));
  std::vector<ConvergenceLevel> result;
  {
    py::gil_scoped_release release;
    result = convergence_study(cfg, levels);
  }
  std::vector<py::dict> out;
  for (const auto& l : result) {
    py::dict d;
    d["k"] = l.k;
    d["error"] = l.error;
    d["order"] = l.order ? py::object(py::float_(*l.order)) : py::object(py::none());
    out.push_back(d);
  }
  return out;
}

py::dict forward(const std::string& text) {
  const auto cfg = RunConfig::from_json(json::parse(text));
  const auto pair = resolve_scheme(cfg);
  const auto problem = resolve_problem(cfg);
  const auto grid = resolve_grid(cfg);
  ForwardSolution sol;
  {
    py::gil_scoped_release release;
    sol = solve_forward(problem, pair, grid, cfg.newton);
  }
  Matrix states(static_cast<Eigen::Index>(sol.nodal.size()), static_cast<Eigen::Index>(problem.dim));
  for (std::size_t n = 0; n < sol.nodal.size(); ++n) {
    states.row(static_cast<Eigen::Index>(n)) = sol.nodal[n].transpose();
  }
  py::dict out;
  out["times"] = grid.nodes();
  out["states"] = states;
  out["newton_iterations"] = sol.newton_iterations;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "IMEX Runge-Kutta integration with adjoint-based error estimates";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<StageError>(m, "StageError", base.ptr());

  m.def("builtin_names", &builtin_names, "Names of the builtin tableau pairs.");
  m.def("dump_tableau", &dump_tableau, py::arg("name"), "Builtin tableau pair as JSON text.");
  m.def("validate_tableau", &validate_tableau, py::arg("text"),
        "Validate a tableau pair given as JSON text.");
  m.def("run", &run_config, py::arg("config"), "Run one experiment; returns the report as JSON text.");
  m.def("table_ids", &table_ids);
  m.def("reproduce_table", &table_rows, py::arg("id"), py::arg("threads") = 0,
        "Rows of a published table as JSON text.");
  m.def("table_csv", &table_csv, py::arg("id"), py::arg("threads") = 0);
  m.def("convergence_study", &converge, py::arg("config"), py::arg("levels"));
  m.def("solve_forward", &forward, py::arg("config"),
        "Nodal states of the IMEX solution for a run config.");
}
