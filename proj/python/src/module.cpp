#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fmab/harness.hpp"

namespace py = pybind11;
using namespace fmab;

namespace {

ExperimentConfig from_map(const std::map<std::string, std::string>& values) {
  ExperimentConfig c;
  for (const auto& [k, v] : values) c.set(k, v);
  return c;
}

std::string run(const std::map<std::string, std::string>& values) {
  const ExperimentResult r = run_experiment(from_map(values));
  nlohmann::json doc = r.summary.to_json();
  doc["manifest"] = r.manifest;
  nlohmann::json traces = nlohmann::json::array();
  for (const auto& t : r.traces) traces.push_back(t.to_csv());
  doc["traces"] = traces;
  return doc.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Functional multi-armed bandit allocators, rates and experiments";

  py::register_exception<Error>(m, "FmabError", PyExc_ValueError);

  py::enum_<RateKind>(m, "RateKind")
      .value("polynomial", RateKind::kPolynomial)
      .value("exponential", RateKind::kExponential)
      .value("accelerated_smooth", RateKind::kAcceleratedSmooth)
      .value("max_of", RateKind::kMaxOf)
      .value("heuristic", RateKind::kHeuristic);

  py::class_<RateFunction>(m, "RateFunction")
      .def_static("polynomial", [](double beta, double r) { return RateFunction::polynomial(beta, r); },
                  py::arg("beta"), py::arg("r"))
      .def_static("exponential", &RateFunction::exponential, py::arg("amp"), py::arg("tau"))
      .def_static("accelerated_smooth", &RateFunction::accelerated_smooth, py::arg("amp"))
      .def_property_readonly("kind", &RateFunction::kind)
      .def("__call__", &RateFunction::operator(), py::arg("k"))
      .def("inverse", [](const RateFunction& g, double eps) { return rate_inverse(g, eps); }, py::arg("eps"))
      .def("to_json", [](const RateFunction& g) { return g.to_json().dump(); });

  m.def("bfi_budget_bound",
        [](const std::vector<double>& gaps, const std::vector<RateFunction>& rates, double eps) {
          return bfi_budget_bound(gaps, rates, eps);
        },
        py::arg("gaps"), py::arg("rates"), py::arg("eps"));
  m.def("fmab_upper_bound",
        [](const std::vector<RateFunction>& rates, std::int64_t tau) { return fmab_upper_bound(rates, tau); },
        py::arg("rates"), py::arg("tau"));
  m.def("fmab_upper_bound_explicit",
        [](const std::vector<RateFunction>& rates, std::int64_t tau) { return fmab_upper_bound_explicit(rates, tau); },
        py::arg("rates"), py::arg("tau"));
  m.def("allocation_infimum",
        [](const std::vector<double>& G, std::int64_t T, std::int64_t K) { return allocation_infimum(G, T, K); },
        py::arg("G"), py::arg("T"), py::arg("K"));

  m.def("experiment_names", &experiment_names);
  m.def("run_experiment", &run, py::arg("config"), "Runs a config given as str -> str; returns JSON text.",
        py::call_guard<py::gil_scoped_release>());
  m.def("bounds_report", [](const std::map<std::string, std::string>& values) {
    return emit_bounds_report(from_map(values)).dump();
  }, py::arg("config"));
  m.def("compare_allocators", [](const std::map<std::string, std::string>& values) {
    return rank_table_json(compare_allocators(from_map(values))).dump();
  }, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("parse_config", [](const std::string& text) { return ExperimentConfig::parse(text).values(); },
        py::arg("text"));
  m.def("sha256_hex", [](const py::bytes& b) { return sha256_hex(std::string(b)); }, py::arg("data"));
}
