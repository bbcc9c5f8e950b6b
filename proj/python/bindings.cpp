#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mcsynth/classifier.hpp"
#include "mcsynth/emitter.hpp"
#include "mcsynth/error.hpp"
#include "mcsynth/generator.hpp"
#include "mcsynth/report.hpp"
#include "mcsynth/validator.hpp"

namespace py = pybind11;
using namespace mcsynth;

namespace {

py::dict report_to_dict(const MetricReport& report) {
  py::dict out;
  for (const auto& s : report.sections) {
    py::dict values;
    for (const auto& [k, v] : s.values) {
      switch (v.kind) {
        case Scalar::Kind::Integer: values[py::str(k)] = v.integer; break;
        case Scalar::Kind::Real: values[py::str(k)] = v.real; break;
        case Scalar::Kind::Text: values[py::str(k)] = v.text; break;
      }
    }
    out[py::str(s.name)] = values;
  }
  return out;
}

CacheProfile profile_from(const std::optional<std::string>& text) {
  return text ? parse_profile(*text) : CacheProfile::defaults();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topology synthesis, validation, config emission and report extraction";

  static py::exception<Error> error_type(m, "McsynthError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object inst = py::reinterpret_borrow<py::object>(error_type.ptr())(e.what());
      inst.attr("code") = std::string(to_string(e.code()));
      PyErr_SetObject(error_type.ptr(), inst.ptr());
    }
  });

  m.def("canonical_name", [](const std::string& name) { return canonical_name(parse_topology(name)); });
  m.def("classify", [](const std::string& name) { return std::string(to_string(classify(parse_topology(name)))); });
  m.def("connection_quota", [](int nc, int mc) {
    const auto q = connection_quota(nc, mc);
    return py::make_tuple(q.base, q.remainder, q.total);
  });
  m.def("generate_edges", [](const std::string& name) { return dump_edges(generate(parse_topology(name))); },
        "Edge dump of the generated graph");
  m.def(
      "validate_edges",
      [](const std::string& text) {
        const auto graph = parse_edges(text);
        std::vector<std::tuple<std::string, std::string, std::string>> out;
        for (const auto& v : validate_graph(graph, graph.spec).violations) out.emplace_back(v.code, v.subject, v.message);
        return out;
      },
      "List of (code, subject, message); empty when the graph is valid");
  m.def(
      "emit",
      [](const std::string& name, const std::optional<std::string>& profile) {
        const auto bundle = emit_bundle(generate(parse_topology(name)), profile_from(profile));
        return py::make_tuple(bundle.mem_config, bundle.net_config);
      },
      py::arg("name"), py::arg("profile") = py::none());
  m.def(
      "loc_report",
      [](const std::string& name, const std::optional<std::string>& profile) {
        return emit_bundle(generate(parse_topology(name)), profile_from(profile)).loc_breakdown;
      },
      py::arg("name"), py::arg("profile") = py::none());
  m.def("parse_stats_report", [](const std::string& text) { return report_to_dict(parse_stats_report(text)); });
  m.def("fill_power_template", [](const std::string& report, const std::string& mapping, const std::string& templ) {
    return fill_power_template(parse_stats_report(report), parse_power_mapping(mapping), templ);
  });
  m.def("to_csv", [](const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
    return to_csv(Table{header, rows});
  });
  m.def("parse_csv", [](const std::string& text) {
    auto t = parse_csv(text);
    return py::make_tuple(t.header, t.rows);
  });
}
