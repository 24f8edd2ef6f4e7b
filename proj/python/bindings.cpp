#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <filesystem>
#include <sstream>

#include "cs/chernweil.hpp"
#include "cs/errors.hpp"
#include "cs/experiments.hpp"
#include "cs/liealg.hpp"
#include "cs/moduli.hpp"
#include "cs/prequantum.hpp"
#include "run_config.hpp"

namespace py = pybind11;

namespace {

cs::GroupId group(const std::string& name) { return cs::parse_group(name); }

cs::Point to_point(const std::vector<double>& v) { return Eigen::Map<const cs::Point>(v.data(), static_cast<Eigen::Index>(v.size())); }

py::dict row_dict(const cs::ReportRow& r) {
  py::dict values;
  for (const auto& [k, v] : r.values) values[py::str(k)] = v;
  py::dict d;
  d["id"] = r.id;
  d["kind"] = r.kind;
  d["seed"] = r.seed;
  d["values"] = values;
  d["residual"] = r.residual;
  d["tolerance"] = r.tolerance;
  d["passed"] = r.passed;
  d["error"] = r.error;
  d["seconds"] = r.seconds;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Chern-Simons invariants, flat connections and prequantum lines";

  static py::exception<cs::Error> error(m, "CsError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const cs::Error& e) {
      // args = (message, kind name)
      const auto args = py::make_tuple(e.what(), std::string(cs::to_string(e.kind())));
      PyErr_SetObject(error.ptr(), args.ptr());
    }
  });

  m.def(
      "structure_constants",
      [](const std::string& g) {
        std::vector<cs::Mat> out;
        for (const auto& x : cs::structure_constants(group(g)).basis) out.push_back(x.matrix());
        return out;
      },
      py::arg("group"), "Orthonormal basis of the Lie algebra as complex matrices.");

  m.def(
      "exp_map", [](const std::string& g, const cs::Mat& x) { return cs::exp_map(cs::AlgebraElement(group(g), x)).matrix(); },
      py::arg("group"), py::arg("x"));

  m.def(
      "cs_action",
      [](const std::vector<double>& s, double twist, int order) {
        const auto chart = cs::ModelChart::torus(static_cast<int>(s.size()));
        const std::vector<double> lo(s.size(), 0.0), hi(s.size(), 1.0);
        const auto g = cs::GroupId::su(2);
        const auto& basis = cs::structure_constants(g).basis;
        const auto fam = cs::commuting_family(chart.dim(), basis[2], basis[0], twist);
        cs::CSActionSpec spec{cs::InvariantPolynomial::standard(2), cs::zero_connection(chart, g), cs::ModZValue(0.0),
                              cs::box_chain(chart, lo, hi)};
        return cs::cs_action(spec, fam.at(to_point(s)), cs::QuadratureSpec{order}).value();
      },
      py::arg("s"), py::arg("twist") = 0.0, py::arg("order") = 8,
      "Degree-two action mod 1 of the flat SU(2) torus connection with parameters s.");

  m.def(
      "gauge_defect",
      [](int winding, int subdivisions, int order) {
        const auto chart = cs::ModelChart::cube_s3();
        const auto chain = cs::box_chain(chart, {0, 0, 0}, {1, 1, 1}, subdivisions);
        cs::CSActionSpec spec{cs::InvariantPolynomial::standard(2), cs::zero_connection(chart, cs::GroupId::su(2)),
                              cs::ModZValue(0.0), chain};
        return cs::cs_gauge_defect(spec, spec.background, cs::winding_map(winding), cs::QuadratureSpec{order});
      },
      py::arg("winding"), py::arg("subdivisions") = 2, py::arg("order") = 8,
      "Integer jump of the action of the trivial SU(2) connection under a winding gauge map.");

  m.def(
      "search_flat",
      [](int genus, const std::string& g, std::uint64_t seed, double tol) {
        cs::FlatSearchOptions opt;
        opt.tol = tol;
        const auto res = cs::search_flat(cs::SurfaceGroupRep::random(genus, group(g), seed), opt);
        std::vector<cs::Mat> gens;
        for (const auto& x : res.rep.generators) gens.push_back(x.matrix());
        py::dict d;
        d["generators"] = gens;
        d["residual"] = res.residual;
        d["iterations"] = res.iterations;
        d["converged"] = res.converged;
        return d;
      },
      py::arg("genus"), py::arg("group") = "SU2", py::arg("seed") = 0, py::arg("tol") = 1e-10,
      "Descends from a random representation to a flat one.");

  m.def(
      "heisenberg_alpha",
      [](const std::vector<int>& mv, const std::vector<double>& x, const std::vector<double>& reference) {
        const auto lift = cs::build_lift(cs::heisenberg_data(reference));
        return lift.alpha(mv, to_point(x)).value();
      },
      py::arg("m"), py::arg("x"), py::arg("reference") = std::vector<double>{0.0, 0.0},
      "alpha_m(x) mod 1 for lambda = x dy on the plane with lattice Z^2.");

  m.def(
      "heisenberg_holonomy",
      [](const std::vector<std::vector<double>>& path, const std::vector<double>& reference) {
        const auto lift = cs::build_lift(cs::heisenberg_data(reference));
        cs::Path p;
        for (const auto& v : path) p.push_back(to_point(v));
        return cs::prequantum_holonomy(lift, p).value();
      },
      py::arg("path"), py::arg("reference") = std::vector<double>{0.0, 0.0});

  m.def(
      "run_experiment",
      [](const std::string& kind, std::uint64_t seed, const std::map<std::string, double>& params,
         std::optional<double> tol, std::optional<int> order) {
        cs::ExperimentConfig c;
        c.kind = cs::parse_experiment_kind(kind);
        c.id = kind;
        c.params = params;
        c.tol = tol;
        if (order) c.q.order = *order;
        cs::validate(c);
        return row_dict(cs::run_experiment(c, seed));
      },
      py::arg("kind"), py::arg("seed") = 0, py::arg("params") = std::map<std::string, double>{},
      py::arg("tol") = py::none(), py::arg("order") = py::none());

  m.def(
      "run_config",
      [](const std::string& text, const std::string& out_dir, std::optional<std::uint64_t> seed) {
        cs::Overrides ov;
        ov.seed = seed;
        const auto config = cs::parse_config(text, ov);
        std::ostringstream log;
        const int code = cs::run_and_report(config, out_dir, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("text"), py::arg("out_dir"), py::arg("seed") = py::none(),
      "Runs a TOML config, writes report.json and CSVs; returns (exit_code, log).");

  m.def("catalog", [] {
    std::vector<std::tuple<std::string, std::string, std::string>> out;
    for (const auto& e : cs::builtin_catalog()) out.emplace_back(e.category, e.name, e.description);
    return out;
  });
}
