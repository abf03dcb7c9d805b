#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "kvh/commands.hpp"

namespace py = pybind11;
using namespace kvh;

namespace {

py::dict axis_dict(const Axis& a) {
  py::dict d;
  d["name"] = a.name;
  d["role"] = to_string(a.role);
  d["min"] = a.min;
  d["extent"] = a.extent;
  d["points"] = a.points;
  return d;
}

py::dict result_dict(const CommandResult& r) {
  py::dict d;
  d["exit_code"] = r.exit_code;
  d["metrics"] = r.metrics;
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict row;
    row["metric"] = c.spec.metric;
    row["value"] = c.value;
    row["bound"] = c.spec.bound;
    row["upper"] = c.spec.upper;
    row["pass"] = c.pass;
    checks.append(row);
  }
  d["checks"] = checks;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kvh, m) {
  m.doc() = "Phase-space Koopman-von Neumann and Koopman-van Hove toolkit";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_ArithmeticError);

  m.def("version", [] { return std::string(version()); });
  m.def("set_thread_count", &set_thread_count, py::arg("n"));

  m.def(
      "check_algebra",
      [](const std::string& selection) {
        const auto report = verify_algebra(galilei_suite(parse_suite_selection(selection)));
        py::list rows;
        for (const auto& r : report.results) {
          py::dict row;
          row["id"] = r.id;
          row["label"] = r.label;
          row["expected"] = r.expected;
          row["holds"] = r.holds;
          row["expect_holds"] = r.expect_holds;
          row["ok"] = r.ok();
          row["residual"] = r.residual.str();
          rows.append(row);
        }
        return rows;
      },
      py::arg("formalism") = "all",
      "Verify a relation set (kvn, kvh, hybrid, all); one dict per relation.");

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("name", &Scenario::name)
      .def_readonly("source", &Scenario::source)
      .def_property_readonly("command", [](const Scenario& s) { return to_string(s.command); })
      .def_property_readonly("axes",
                             [](const Scenario& s) {
                               py::list out;
                               for (const auto& a : s.grid.axes()) out.append(axis_dict(a));
                               return out;
                             })
      .def_readonly("dt", &Scenario::dt)
      .def_readonly("t_final", &Scenario::t_final)
      .def("canonical", &Scenario::canonical)
      .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.name + " (" + to_string(s.command) + ")>"; });

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def(
      "parse_scenario",
      [](const std::string& text, const std::string& source) {
        std::istringstream is(text);
        return parse_scenario(is, source);
      },
      py::arg("text"), py::arg("source") = "<string>");

  m.def(
      "execute",
      [](const Scenario& sc, const std::string& out_dir) {
        std::ostringstream out;
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = execute(sc, out_dir, out);
        }
        auto d = result_dict(r);
        d["report"] = out.str();
        return d;
      },
      py::arg("scenario"), py::arg("out_dir"),
      "Run a scenario, writing its artifacts under out_dir.");

  m.def(
      "read_dump",
      [](const std::string& path) {
        auto w = read_dump_file(path);
        std::vector<py::ssize_t> shape;
        py::list axes;
        for (const auto& a : w.grid().axes()) {
          shape.push_back(static_cast<py::ssize_t>(a.points));
          axes.append(axis_dict(a));
        }
        py::array_t<std::complex<double>> values(shape);
        std::copy(w.values().begin(), w.values().end(), values.mutable_data());
        return py::make_tuple(values, axes);
      },
      py::arg("path"), "Load a KVHW dump as (complex array, axes).");
}
