#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "algossip/baseline.hpp"
#include "algossip/errors.hpp"
#include "algossip/harness.hpp"

namespace py = pybind11;
using namespace algossip;

namespace {

RunConfig config_from_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is);
}

py::dict trace_dict(const MetricsLog& log) {
  std::vector<int> t;
  std::vector<long> k, tx;
  std::vector<double> flops, err, lag, gap;
  std::vector<bool> feasible;
  for (const auto& r : log) {
    t.push_back(r.t);
    k.push_back(r.k);
    tx.push_back(r.transmissions);
    flops.push_back(r.flops);
    err.push_back(r.err_f);
    lag.push_back(r.lagrangian);
    gap.push_back(r.max_dual_gap);
    feasible.push_back(r.feasible);
  }
  py::dict d;
  d["t"] = t;
  d["k"] = k;
  d["transmissions"] = tx;
  d["flops"] = flops;
  d["err_f"] = err;
  d["lagrangian"] = lag;
  d["max_dual_gap"] = gap;
  d["feasible"] = feasible;
  return d;
}

std::vector<std::vector<double>> rows_of(const std::vector<Vec>& xs) {
  std::vector<std::vector<double>> out;
  for (const auto& x : xs) out.emplace_back(x.data(), x.data() + x.size());
  return out;
}

py::dict run_text(const std::string& text, std::optional<std::uint64_t> seed) {
  RunConfig c = config_from_text(text);
  if (seed) c.seed = *seed;
  validate(c);
  Instance inst = build_instance(c);
  RunResult r = execute(c, inst, oracle_for(c, inst).f_star);
  py::dict d;
  d["trace"] = trace_dict(r.log);
  d["x"] = rows_of(r.x);
  d["f_star"] = r.f_star;
  d["alpha"] = r.alpha;
  d["instance_hash"] = inst.hash;
  d["config_hash"] = c.hash();
  return d;
}

py::dict oracle_text(const std::string& text) {
  RunConfig c = config_from_text(text);
  Instance inst = build_instance(c);
  OracleRecord o = oracle_for(c, inst);
  py::dict d;
  d["f_star"] = o.f_star;
  d["x"] = std::vector<double>(o.x.data(), o.x.data() + o.x.size());
  d["method"] = o.method;
  d["iterations"] = o.iterations;
  d["converged"] = o.converged;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Asynchronous augmented Lagrangian gossip simulator";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<MismatchError>(m, "MismatchError", base);
  py::register_exception<NumericFailure>(m, "NumericFailure", base);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ConnectivityFailure>(m, "ConnectivityFailure", base);
  py::register_exception<KindError>(m, "KindError", base);

  py::class_<Supergraph>(m, "Supergraph")
      .def_property_readonly("num_nodes", &Supergraph::num_nodes)
      .def_property_readonly("num_edges", &Supergraph::num_edges)
      .def_property_readonly("edges", &Supergraph::edges)
      .def("neighbors", &Supergraph::neighbors)
      .def("degree", &Supergraph::degree)
      .def("is_connected", &Supergraph::is_connected);

  m.def("make_ring", &make_ring, py::arg("n"));
  m.def("make_path", &make_path, py::arg("n"));
  m.def("make_complete", &make_complete, py::arg("n"));
  m.def("build_geometric", &build_geometric, py::arg("n"), py::arg("radius"), py::arg("seed"),
        py::arg("max_retries") = 1000);
  m.def("failure_prob", &failure_prob, py::arg("distance"), py::arg("radius"), py::arg("scale"));

  m.def(
      "metropolis_weights",
      [](const Supergraph& g, const std::vector<bool>& up) {
        std::vector<char> u(up.begin(), up.end());
        Eigen::MatrixXd w = metropolis_weights(g, u).dense();
        std::vector<std::vector<double>> out(w.rows(), std::vector<double>(w.cols()));
        for (int i = 0; i < w.rows(); ++i)
          for (int j = 0; j < w.cols(); ++j) out[i][j] = w(i, j);
        return out;
      },
      py::arg("graph"), py::arg("edge_up"), "Dense Metropolis weight matrix for the live edges.");

  m.def("run", &run_text, py::arg("config"), py::arg("seed") = py::none(),
        "Run an INI config given as text. Returns the trace, final estimates and f_star.");
  m.def("oracle", &oracle_text, py::arg("config"), "Centralized optimum for an INI config.");
  m.def(
      "config_hash", [](const std::string& text) { return config_from_text(text).hash(); },
      py::arg("config"));
  m.def(
      "transmissions_to",
      [](const std::string& text, double threshold) {
        RunConfig c = config_from_text(text);
        Instance inst = build_instance(c);
        RunResult r = execute(c, inst, oracle_for(c, inst).f_star);
        return transmissions_to(r.log, threshold);
      },
      py::arg("config"), py::arg("threshold"));
}
