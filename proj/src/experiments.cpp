#include "cs/experiments.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <regex>
#include <sstream>

#include "cs/chernweil.hpp"
#include "cs/equivariant.hpp"
#include "cs/errors.hpp"
#include "cs/moduli.hpp"
#include "cs/prequantum.hpp"

namespace cs {

namespace {

constexpr double kPi = std::numbers::pi;

struct KindInfo {
  ExperimentKind kind;
  const char* name;
  const char* description;
};

constexpr KindInfo kKinds[] = {
    {ExperimentKind::CsAction, "cs-action", "local constancy of the action along a path in a flat torus family"},
    {ExperimentKind::GaugeDefect, "gauge-defect", "integer shift of the action under a winding map on the 3-sphere cube"},
    {ExperimentKind::FlatSearch, "flat-search", "success rate of the flat-representation search over random seeds"},
    {ExperimentKind::AbForm, "ab-form", "Atiyah-Bott form: direct quadrature against the (2,2) family component"},
    {ExperimentKind::MomentMap, "moment-map", "moment map on the flat torus family for random algebra elements"},
    {ExperimentKind::EquivariantCheck, "equivariant-check", "vanishing of the low-parameter-degree components on a flat family"},
    {ExperimentKind::Prequantum, "prequantum", "Heisenberg lift: cocycle identity and bounding-loop holonomy"},
    {ExperimentKind::Pillowcase, "pillowcase", "holonomy against symplectic area for a square loop in the pillowcase"},
    {ExperimentKind::HighDegreeFlatness, "high-degree-flatness", "degree-three prequantum holonomy on a flat SU(3) family"},
};

const KindInfo& info(ExperimentKind k) {
  for (const auto& i : kKinds) {
    if (i.kind == k) return i;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown experiment kind");
}

std::map<std::string, double> default_params(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::CsAction: return {{"twist", 0.8}, {"samples", 20}};
    case ExperimentKind::GaugeDefect: return {{"winding", 1}, {"subdivisions", 2}};
    case ExperimentKind::FlatSearch: return {{"genus", 1}, {"trials", 100}, {"min_success", 95}, {"search_tol", 1e-8}};
    case ExperimentKind::AbForm: return {{"s0", 0.3}, {"s1", -0.2}};
    case ExperimentKind::MomentMap: return {{"samples", 10}};
    case ExperimentKind::EquivariantCheck: return {{"torus_dim", 2}, {"samples", 200}, {"twist", 0.0}};
    case ExperimentKind::Prequantum: return {{"pairs", 50}, {"u0", 0.2}, {"v0", 0.1}, {"u1", 0.7}, {"v1", 0.84}};
    case ExperimentKind::Pillowcase:
      return {{"u0", 0.1}, {"v0", 0.1}, {"u1", 0.3}, {"v1", 0.3}, {"margin", 0.05}, {"twist", 0.0}, {"fiber_order", 20}};
    case ExperimentKind::HighDegreeFlatness: return {{"twist", 0.8}, {"fiber_order", 16}, {"loop_order", 6}};
  }
  return {};
}

int as_int(const ExperimentConfig& c, const std::string& key) {
  return static_cast<int>(std::lround(c.params.at(key)));
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AlgebraElement basis_element(const GroupId& g, int k) {
  return structure_constants(g).basis[static_cast<std::size_t>(k)];
}

// Cartan element of the commuting families: diag(i, -i) for SU(2), diag(i, i, -2i) for SU(3).
AlgebraElement cartan_element(const GroupId& g) {
  const int n = g.matrix_size();
  Mat h = Mat::Zero(n, n);
  if (g.kind == GroupKind::U1) {
    h(0, 0) = Complex(0, 1);
  } else {
    for (int i = 0; i + 1 < n; ++i) h(i, i) = Complex(0, 1);
    h(n - 1, n - 1) = Complex(0, -(n - 1));
  }
  return AlgebraElement(g, h);
}

Point make_point(std::initializer_list<double> v) {
  Point p(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

void fill_cs_action(const ExperimentConfig& c, std::mt19937_64& rng, ReportRow& row) {
  const auto chain = builtin_chain(*c.cycle);
  const int n = chain.chart.dim();
  const auto g = parse_group(*c.group);
  const auto fam = commuting_family(n, cartan_element(g), basis_element(g, 0), c.params.at("twist"));
  CSActionSpec spec{InvariantPolynomial::standard(*c.degree), zero_connection(chain.chart, g), ModZValue(0.0), chain};
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  Point a(n), b(n), w(n);
  for (int i = 0; i < n; ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
    w[i] = 0.2 * u(rng);
  }
  const int samples = as_int(c, "samples");
  std::vector<Point> path;
  for (int k = 0; k < samples; ++k) {
    const double t = samples > 1 ? static_cast<double>(k) / (samples - 1) : 0.0;
    path.push_back(a + t * (b - a) + std::sin(kPi * t) * w);
  }
  const double dev = locally_constant_check(spec, fam, path, c.q);
  row.values = {{"max_deviation", dev}};
  row.residual = dev;
}

void fill_gauge_defect(const ExperimentConfig& c, ReportRow& row) {
  const int d = as_int(c, "winding");
  const auto chain = builtin_chain(*c.cycle, as_int(c, "subdivisions"));
  CSActionSpec spec{InvariantPolynomial::standard(*c.degree), zero_connection(chain.chart, GroupId::su(2)),
                    ModZValue(0.0), chain};
  const auto phi = winding_map(d);
  const double degree = winding_degree_integral(phi, chain, c.q);
  const int defect = cs_gauge_defect(spec, spec.background, phi, c.q);
  row.values = {{"defect", defect}, {"degree_integral", degree}};
  row.residual = std::abs(degree - d);
  row.passed = std::abs(defect) == std::abs(d) && row.residual < row.tolerance;
}

void fill_flat_search(const ExperimentConfig& c, ReportRow& row) {
  const auto g = parse_group(*c.group);
  const int genus = as_int(c, "genus");
  const int trials = as_int(c, "trials");
  FlatSearchOptions opt;
  opt.tol = c.params.at("search_tol");
  int ok = 0;
  double worst = 0.0;
  for (int k = 0; k < trials; ++k) {
    const auto res = search_flat(SurfaceGroupRep::random(genus, g, row.seed + static_cast<std::uint64_t>(k)), opt);
    if (res.converged) {
      ++ok;
      worst = std::max(worst, res.residual);
    }
  }
  row.values = {{"successes", ok}, {"trials", trials}, {"worst_residual", worst}};
  // Residual is the failure fraction; the tolerance is the allowed fraction.
  row.residual = trials > 0 ? static_cast<double>(trials - ok) / trials : 0.0;
  row.tolerance = trials > 0 ? static_cast<double>(trials - as_int(c, "min_success")) / trials : 0.0;
  row.passed = ok >= as_int(c, "min_success");
}

void fill_ab_form(const ExperimentConfig& c, ReportRow& row) {
  const auto g = parse_group(*c.group);
  const auto fam = commuting_family(2, cartan_element(g), basis_element(g, 0), 0.0);
  const Point s = make_point({c.params.at("s0"), c.params.at("s1")});
  const double direct = atiyah_bott_form(fam, s, {1, 0}, {0, 1}, c.q);
  const double pairing = family_pairing_22(fam, builtin_chain(*c.cycle), s, {1, 0}, {0, 1}, c.q);
  row.values = {{"direct", direct}, {"pairing_22", pairing}, {"expected", -1.0 / (2 * kPi * kPi)}};
  row.residual = std::abs(direct - pairing);
}

void fill_moment_map(const ExperimentConfig& c, std::mt19937_64& rng, ReportRow& row) {
  const auto g = parse_group(*c.group);
  const auto fam = commuting_family(2, cartan_element(g), basis_element(g, 0), 0.0);
  const auto chain = builtin_chain(*c.cycle);
  const auto p = InvariantPolynomial::standard(*c.degree);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < as_int(c, "samples"); ++k) {
    const Mat x0 = random_algebra(g, rng).matrix();
    const Mat x1 = random_algebra(g, rng).matrix();
    const Point s = make_point({u(rng), u(rng)});
    const auto x = [x0, x1](const Point& pt) -> Mat { return x0 + std::cos(2 * kPi * pt[0]) * x1; };
    worst = std::max(worst, std::abs(moment_map(p, fam, chain, x, s, c.q)));
  }
  row.values = {{"max_abs", worst}};
  row.residual = worst;
}

void fill_equivariant(const ExperimentConfig& c, ReportRow& row) {
  const auto g = parse_group(*c.group);
  const int r = *c.degree;
  const auto fam = commuting_family(as_int(c, "torus_dim"), cartan_element(g), basis_element(g, 0), c.params.at("twist"));
  const auto table =
      flat_vanishing_check(InvariantPolynomial::standard(r), fam, family_samples(fam, as_int(c, "samples"), row.seed), c.q);
  double worst = 0.0;
  int tested = 0;
  for (const auto& e : table) {
    if (!e.tested) continue;
    ++tested;
    worst = std::max(worst, e.max_magnitude);
  }
  row.values = {{"max_low_component", worst}, {"components_tested", tested}};
  row.residual = worst;
}

void fill_prequantum(const ExperimentConfig& c, std::mt19937_64& rng, ReportRow& row) {
  const auto lift = build_lift(heisenberg_data());
  std::uniform_int_distribution<int> gi(-3, 3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double dev = 0.0;
  for (int k = 0; k < as_int(c, "pairs"); ++k) {
    const std::vector<int> phi{gi(rng), gi(rng)}, psi{gi(rng), gi(rng)};
    dev = std::max(dev, cocycle_check(lift, {{phi, psi}}, {make_point({u(rng), u(rng)})}));
  }
  const double u0 = c.params.at("u0"), v0 = c.params.at("v0"), u1 = c.params.at("u1"), v1 = c.params.at("v1");
  const auto hol = prequantum_holonomy(lift, rectangle_loop(make_point({u0, v0}), make_point({u1, v1})));
  const double area = (u1 - u0) * (v1 - v0);
  const double gap = hol.distance(ModZValue(area));
  row.values = {{"cocycle_deviation", dev}, {"holonomy", hol.value()}, {"area", area}};
  row.residual = std::max(dev, gap);
}

void fill_pillowcase(const ExperimentConfig& c, ReportRow& row) {
  const auto g = parse_group(*c.group);
  const auto fam = commuting_family(2, cartan_element(g), basis_element(g, 0), c.params.at("twist"));
  // The family depends on the first base coordinate only, so one node suffices along the second.
  const auto chain = box_chain(ModelChart::torus(2), {0.0, 0.0}, {1.0, 1.0}, 1, {as_int(c, "fiber_order"), 1});
  const auto lift = build_lift(family_prequantum_data(InvariantPolynomial::standard(*c.degree), fam, chain, c.q), 1e-7);
  const auto loop = rectangle_loop(make_point({c.params.at("u0"), c.params.at("v0")}),
                                   make_point({c.params.at("u1"), c.params.at("v1")}));
  const auto res = pillowcase_experiment(lift, loop, c.params.at("margin"));
  row.values = {{"holonomy", res.holonomy.value()}, {"area", res.area}};
  row.residual = res.holonomy.distance(ModZValue(res.area));
}

void fill_high_degree(const ExperimentConfig& c, ReportRow& row) {
  const auto g = parse_group(*c.group);
  const auto fam = commuting_family(4, cartan_element(g), basis_element(g, 0), c.params.at("twist"));
  const auto chain = box_chain(ModelChart::torus(4), {0, 0, 0, 0}, {1, 1, 1, 1}, 1, {as_int(c, "fiber_order"), 1, 1, 1});
  QuadratureSpec q = c.q;
  q.order = as_int(c, "loop_order");
  const auto data = family_prequantum_data(InvariantPolynomial::standard(*c.degree), fam, chain, q, 12, x0_background(g));
  const auto lift = build_lift(data, 1e-7, 4);
  // lambda lives in ds_2 here, so the loops move in the (s_2, s_3) plane.
  const auto at = [](double a, double b) { return make_point({0.1, 0.2, a, b}); };
  const Path rect{at(-0.3, 0.25), at(0.5, 0.25), at(0.5, 0.9), at(-0.3, 0.9), at(-0.3, 0.25)};
  const Point shift = 2 * kPi * Point::Unit(4, 2);
  const auto hol = high_degree_holonomies(
      lift, fam, {rect, {rect[0], rect[0] + shift}, {rect[0], at(1.0, 1.1), at(3.0, -0.4), rect[0] + shift}});
  const double bounding = ModZValue::circle_distance(hol[0].value(), 0.0);
  const double gap = hol[1].distance(hol[2]);
  row.values = {{"bounding_holonomy", bounding}, {"homotopic_gap", gap}, {"edge_integral", line_integral(data, {rect[0], rect[1]})}};
  row.residual = std::max(bounding, gap);
}

}  // namespace

std::string_view to_string(ExperimentKind k) { return info(k).name; }

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& i : kKinds) {
    if (name == i.name) return i.kind;
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown experiment kind '" + name + "'");
}

std::vector<ExperimentKind> all_experiment_kinds() {
  std::vector<ExperimentKind> out;
  for (const auto& i : kKinds) out.push_back(i.kind);
  return out;
}

ExperimentConfig defaults_for(ExperimentConfig c) {
  struct Defaults {
    const char* group;
    int degree;
    const char* cycle;
    double tol;
  };
  Defaults d{"SU2", 2, "", 1e-6};
  switch (c.kind) {
    case ExperimentKind::CsAction: d = {"SU2", 2, "torus3.fundamental", 1e-6}; break;
    case ExperimentKind::GaugeDefect: d = {"SU2", 2, "cubes3.fundamental", 1e-3}; break;
    case ExperimentKind::FlatSearch: d = {"SU2", 2, "", 0.05}; break;
    case ExperimentKind::AbForm: d = {"SU2", 2, "torus2.fundamental", 1e-6}; break;
    case ExperimentKind::MomentMap: d = {"SU2", 2, "torus2.fundamental", 1e-9}; break;
    case ExperimentKind::EquivariantCheck: d = {"SU2", 2, "", 1e-8}; break;
    case ExperimentKind::Prequantum: d = {"U1", 1, "", 1e-8}; break;
    case ExperimentKind::Pillowcase: d = {"SU2", 2, "", 1e-4}; break;
    case ExperimentKind::HighDegreeFlatness: d = {"SU3", 3, "", 1e-5}; break;
  }
  if (!c.group) c.group = d.group;
  if (!c.degree) c.degree = d.degree;
  if (!c.cycle && *d.cycle) c.cycle = d.cycle;
  if (!c.tol) c.tol = d.tol;
  for (const auto& [k, v] : default_params(c.kind)) c.params.try_emplace(k, v);
  return c;
}

void validate(const ExperimentConfig& raw) {
  const auto c = defaults_for(raw);
  const auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::ConfigInvalid, "experiment '" + c.id + "': " + msg);
  };
  if (c.id.empty()) fail("missing id");
  if (!(*c.tol > 0.0) || !std::isfinite(*c.tol)) fail("tolerance must be positive");
  try {
    c.q.validate();
  } catch (const Error& e) {
    fail(e.what());
  }
  const auto known = default_params(c.kind);
  for (const auto& [k, v] : c.params) {
    if (!known.count(k)) fail("unknown parameter '" + k + "' for " + std::string(to_string(c.kind)));
    if (!std::isfinite(v)) fail("parameter '" + k + "' is not finite");
  }
  GroupId g;
  try {
    g = parse_group(*c.group);
  } catch (const Error& e) {
    fail(e.what());
  }
  if (*c.degree < 1 || *c.degree > 4) fail("polynomial degree must be in 1..4");
  if (c.cycle && !resolves("cycle", *c.cycle)) fail("unknown cycle '" + *c.cycle + "'");

  const auto need_group = [&](std::initializer_list<const char*> ok) {
    for (const char* n : ok) {
      if (*c.group == n) return;
    }
    fail("group '" + *c.group + "' is not supported by " + std::string(to_string(c.kind)));
  };
  const auto positive = [&](const char* key) {
    if (c.params.at(key) < 1) fail(std::string(key) + " must be at least 1");
  };
  switch (c.kind) {
    case ExperimentKind::CsAction: {
      const auto chain = builtin_chain(*c.cycle);
      if (chain.chart.kind() != ChartKind::Torus) fail("cs-action needs a torus cycle");
      if (chain.dim() != 2 * *c.degree - 1) fail("cycle dimension must be 2r-1");
      if (g.kind == GroupKind::U1) fail("the commuting family needs SU(n)");
      positive("samples");
      break;
    }
    case ExperimentKind::GaugeDefect:
      need_group({"SU2"});
      if (builtin_chain(*c.cycle).chart.kind() != ChartKind::CubeS3) fail("winding maps live on cubes3");
      if (*c.degree != 2) fail("the winding defect uses r = 2");
      positive("subdivisions");
      break;
    case ExperimentKind::FlatSearch:
      if (g.kind == GroupKind::U1) fail("flat search needs SU(n)");
      if (as_int(c, "genus") < 1 || as_int(c, "genus") > 3) fail("genus must be in 1..3");
      if (c.params.at("min_success") > c.params.at("trials")) fail("min_success exceeds trials");
      if (!(c.params.at("search_tol") > 0.0)) fail("search_tol must be positive");
      break;
    case ExperimentKind::AbForm:
    case ExperimentKind::MomentMap:
      need_group({"SU2"});
      if (builtin_chain(*c.cycle).chart.dim() != 2 || builtin_chain(*c.cycle).dim() != 2) fail("needs a 2-cycle on torus2");
      if (*c.degree != 2) fail("needs r = 2");
      break;
    case ExperimentKind::EquivariantCheck:
      if (g.kind == GroupKind::U1) fail("the commuting family needs SU(n)");
      if (as_int(c, "torus_dim") < 2 || as_int(c, "torus_dim") > 4) fail("torus_dim must be in 2..4");
      if (2 * as_int(c, "torus_dim") < 2 * *c.degree) fail("product dimension too small for the polynomial");
      positive("samples");
      break;
    case ExperimentKind::Prequantum:
      positive("pairs");
      break;
    case ExperimentKind::Pillowcase:
      need_group({"SU2"});
      if (*c.degree != 2) fail("the pillowcase uses r = 2");
      if (!(c.params.at("margin") > 0.0)) fail("margin must be positive");
      if (c.params.at("fiber_order") < 2) fail("fiber_order must be at least 2");
      break;
    case ExperimentKind::HighDegreeFlatness:
      need_group({"SU3", "SU4"});
      if (*c.degree != 3) fail("needs r = 3");
      if (c.params.at("fiber_order") < 2 || c.params.at("loop_order") < 2) fail("orders must be at least 2");
      break;
  }
}

std::vector<std::string> value_names(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::CsAction: return {"max_deviation"};
    case ExperimentKind::GaugeDefect: return {"defect", "degree_integral"};
    case ExperimentKind::FlatSearch: return {"successes", "trials", "worst_residual"};
    case ExperimentKind::AbForm: return {"direct", "pairing_22", "expected"};
    case ExperimentKind::MomentMap: return {"max_abs"};
    case ExperimentKind::EquivariantCheck: return {"max_low_component", "components_tested"};
    case ExperimentKind::Prequantum: return {"cocycle_deviation", "holonomy", "area"};
    case ExperimentKind::Pillowcase: return {"holonomy", "area"};
    case ExperimentKind::HighDegreeFlatness: return {"bounding_holonomy", "homotopic_gap", "edge_integral"};
  }
  return {};
}

std::uint64_t substream_seed(std::uint64_t run_seed, const std::string& id) {
  // FNV-1a of the id mixed into the run seed, finished with splitmix64.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : id) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::uint64_t z = run_seed ^ h;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ReportRow run_experiment(const ExperimentConfig& raw, std::uint64_t run_seed) {
  validate(raw);
  const auto c = defaults_for(raw);
  const auto t0 = std::chrono::steady_clock::now();
  ReportRow row;
  row.id = c.id;
  row.kind = std::string(to_string(c.kind));
  row.seed = substream_seed(run_seed, c.id);
  row.tolerance = *c.tol;
  row.inputs = {{"group", *c.group}, {"degree", std::to_string(*c.degree)}};
  if (c.cycle) row.inputs.emplace_back("cycle", *c.cycle);
  row.inputs.emplace_back("quadrature_order", std::to_string(c.q.order));
  for (const auto& [k, v] : c.params) {
    std::ostringstream os;
    os << v;
    row.inputs.emplace_back(k, os.str());
  }

  std::mt19937_64 rng(row.seed);
  bool explicit_pass = false;
  try {
    switch (c.kind) {
      case ExperimentKind::CsAction: fill_cs_action(c, rng, row); break;
      case ExperimentKind::GaugeDefect: fill_gauge_defect(c, row); explicit_pass = true; break;
      case ExperimentKind::FlatSearch: fill_flat_search(c, row); explicit_pass = true; break;
      case ExperimentKind::AbForm: fill_ab_form(c, row); break;
      case ExperimentKind::MomentMap: fill_moment_map(c, rng, row); break;
      case ExperimentKind::EquivariantCheck: fill_equivariant(c, row); break;
      case ExperimentKind::Prequantum: fill_prequantum(c, rng, row); break;
      case ExperimentKind::Pillowcase: fill_pillowcase(c, row); break;
      case ExperimentKind::HighDegreeFlatness: fill_high_degree(c, row); break;
    }
    if (!explicit_pass) row.passed = row.residual < row.tolerance;
  } catch (const Error& e) {
    row.error = std::string(to_string(e.kind())) + ": " + e.what();
    row.values.clear();
    for (const auto& name : value_names(c.kind)) row.values.emplace_back(name, 0.0);
    row.residual = 0.0;
    row.passed = false;
  }
  row.seconds = elapsed(t0);
  return row;
}

std::vector<CatalogEntry> builtin_catalog() {
  std::vector<CatalogEntry> out;
  for (int n = 1; n <= 4; ++n) out.push_back({"chart", "torus" + std::to_string(n), "flat " + std::to_string(n) + "-torus [0,1]^n"});
  for (int g = 1; g <= 3; ++g) {
    out.push_back({"chart", "polygon(" + std::to_string(g) + ")", "genus-" + std::to_string(g) + " surface as a glued 4g-gon"});
  }
  out.push_back({"chart", "cubes3", "3-sphere as a cube with its boundary collapsed"});
  for (const auto& name : builtin_chain_names()) out.push_back({"cycle", name, "built-in chain"});
  out.push_back({"group", "U1", "U(1)"});
  for (int n = 2; n <= 4; ++n) out.push_back({"group", "SU" + std::to_string(n), "SU(" + std::to_string(n) + ")"});
  out.push_back({"polynomial", "standard(1)", "(i/2pi) tr"});
  out.push_back({"polynomial", "standard(2)", "(1/8pi^2) tr, second Chern form up to sign"});
  out.push_back({"polynomial", "standard(3)", "(i/2pi)^3 / 6 tr"});
  out.push_back({"polynomial", "standard(4)", "(i/2pi)^4 / 24 tr"});
  for (const auto& name : toy_bundle_names()) out.push_back({"toy-bundle", name, "principal circle bundle for the Cartan model"});
  out.push_back({"winding-map", "cubes3.winding(1)", "degree-1 map from cubes3 to SU(2)"});
  out.push_back({"winding-map", "cubes3.winding(2)", "degree-2 map from cubes3 to SU(2)"});
  for (const auto& i : kKinds) out.push_back({"experiment", i.name, i.description});
  return out;
}

bool resolves(const std::string& category, const std::string& name) {
  try {
    if (category == "chart") {
      builtin_chart(name);
    } else if (category == "cycle") {
      builtin_chain(name);
    } else if (category == "group") {
      parse_group(name);
    } else if (category == "polynomial") {
      static const std::regex re(R"(standard\(([1-4])\))");
      return std::regex_match(name, re);
    } else if (category == "toy-bundle") {
      toy_bundle(name);
    } else if (category == "winding-map") {
      static const std::regex re(R"(cubes3\.winding\((-?[0-9]+)\))");
      std::smatch m;
      if (!std::regex_match(name, m, re)) return false;
      winding_map(std::stoi(m[1]));
    } else if (category == "experiment") {
      parse_experiment_kind(name);
    } else {
      return false;
    }
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace cs
