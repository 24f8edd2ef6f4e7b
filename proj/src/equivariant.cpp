#include "cs/equivariant.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "cs/errors.hpp"

namespace cs {

namespace {

constexpr double kPi = std::numbers::pi;

Point unit(int n, int i) {
  Point e = Point::Zero(n);
  e(i) = 1.0;
  return e;
}

std::vector<Point> uniform_samples(const ModelChart& chart, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n));
  const auto& lo = chart.lower();
  const auto& hi = chart.upper();
  for (int k = 0; k < n; ++k) {
    Point p(chart.dim());
    for (int i = 0; i < chart.dim(); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      p(i) = lo[ui] + u(rng) * (hi[ui] - lo[ui]);
    }
    out.push_back(p);
  }
  return out;
}

// Masks of the given degree in n coordinates, increasing.
std::vector<Mask> masks_of_degree(int n, int degree) {
  std::vector<Mask> out;
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (popcount(m) == degree) out.push_back(m);
  }
  return out;
}

std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  for (; m; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

// Coordinates of exp(t ad_{X_a}) applied to x.
std::vector<double> adjoint_flow(const SymmetryAction& action, int a, double t, const std::vector<double>& x) {
  if (action.abelian()) return x;
  const int k = action.generators;
  Mat ad = Mat::Zero(k, k);
  for (int c = 0; c < k; ++c) {
    for (int b = 0; b < k; ++b) ad(c, b) = action.structure_constant(c, a, b);
  }
  const Mat e = expm(t * ad);
  std::vector<double> out(static_cast<std::size_t>(k), 0.0);
  for (int c = 0; c < k; ++c) {
    for (int b = 0; b < k; ++b) out[static_cast<std::size_t>(c)] += e(c, b).real() * x[static_cast<std::size_t>(b)];
  }
  return out;
}

Eigen::MatrixXd flow_jacobian(const SymmetryAction& action, int a, const Point& x, double t, int steps) {
  const int n = action.chart.dim();
  constexpr double h = 1e-5;
  Eigen::MatrixXd j(n, n);
  for (int i = 0; i < n; ++i) {
    const Point e = unit(n, i);
    j.col(i) = (flow(action, a, x + h * e, t, steps) - flow(action, a, x - h * e, t, steps)) / (2 * h);
  }
  return j;
}

double monomial_value(const std::vector<int>& m, const std::vector<double>& x) {
  double v = 1.0;
  for (std::size_t a = 0; a < m.size(); ++a) {
    for (int e = 0; e < m[a]; ++e) v *= x[a];
  }
  return v;
}

int monomial_order(const std::vector<int>& m) {
  int s = 0;
  for (int e : m) s += e;
  return s;
}

void require_supported(const EquivariantForm& alpha, const ToyBundle& bundle) {
  if (!(alpha.action.chart == bundle.total) || alpha.action.generators != bundle.action.generators) {
    throw Error(ErrorKind::UnsupportedBundle, "equivariant form does not live on the " + bundle.name + " bundle");
  }
  if (!bundle.action.abelian()) {
    throw Error(ErrorKind::UnsupportedBundle, "Chern-Weil map is implemented for abelian structure groups only");
  }
}

// Horizontal projection I - sum_a X_a theta^a^T at x.
Eigen::MatrixXd horizontal_projector(const ToyBundle& bundle, const Point& x) {
  const int n = bundle.total.dim();
  Eigen::MatrixXd pi = Eigen::MatrixXd::Identity(n, n);
  for (int a = 0; a < bundle.action.generators; ++a) {
    const Point xa = bundle.action.field(a, x);
    const auto& th = bundle.connection[static_cast<std::size_t>(a)];
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    const auto vals = th.eval(x);
    for (std::size_t k = 0; k < th.masks.size(); ++k) row(std::countr_zero(th.masks[k])) = vals[k](0, 0).real();
    pi -= xa * row.transpose();
  }
  return pi;
}

// All splittings (i, j) of the degree; those exceeding base_dim or param_dim are
// structurally zero and reported with magnitude 0.
std::vector<std::pair<int, int>> bidegrees(int degree) {
  std::vector<std::pair<int, int>> out;
  for (int j = 0; j <= degree; ++j) out.emplace_back(degree - j, j);
  return out;
}

void require_flat(const ConnectionFamily& fam, const std::vector<Point>& samples, const QuadratureSpec& q,
                  double flat_tol) {
  const int nb = fam.base.dim();
  std::vector<Point> seen;
  for (const auto& p : samples) {
    const Point s = p.tail(p.size() - nb);
    if (std::any_of(seen.begin(), seen.end(), [&](const Point& o) { return (o - s).norm() < 1e-12; })) continue;
    seen.push_back(s);
    const double curv = max_curvature(fam.at(s), q);
    if (curv > flat_tol) {
      throw Error(ErrorKind::NotFlat, "family curvature " + std::to_string(curv) + " exceeds the flatness tolerance");
    }
  }
}

std::vector<VanishingEntry> tabulate(const FormField& w, int base_dim, int tested_below,
                                     const std::vector<Point>& samples) {
  const auto bg = bigrade(w, base_dim);
  std::vector<VanishingEntry> out;
  for (const auto& [i, j] : bidegrees(w.degree)) {
    VanishingEntry e;
    e.base_degree = i;
    e.param_degree = j;
    e.tested = j < tested_below;
    e.max_magnitude = bg.populated(i, j) ? max_magnitude(bg.part(i, j), samples) : 0.0;
    out.push_back(e);
  }
  return out;
}

}  // namespace

bool SymmetryAction::abelian() const {
  return std::all_of(structure.begin(), structure.end(), [](double c) { return c == 0.0; });
}

double SymmetryAction::structure_constant(int c, int a, int b) const {
  if (structure.empty()) return 0.0;
  const int k = generators;
  return structure[static_cast<std::size_t>((c * k + a) * k + b)];
}

VectorField SymmetryAction::fundamental(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != generators) {
    throw Error(ErrorKind::DimensionMismatch, "generator coordinates have the wrong length");
  }
  return [f = field, x, n = chart.dim()](const Point& p) {
    Point v = Point::Zero(n);
    for (std::size_t a = 0; a < x.size(); ++a) {
      if (x[a] != 0.0) v += x[a] * f(static_cast<int>(a), p);
    }
    return v;
  };
}

VectorField SymmetryAction::generator_field(int a) const {
  return [f = field, a](const Point& p) { return f(a, p); };
}

SymmetryAction rotation_action() {
  SymmetryAction s;
  s.group = "U1";
  s.chart = ModelChart::box({-1.0, -1.0}, {1.0, 1.0}, "disk");
  s.generators = 1;
  s.field = [](int, const Point& x) {
    Point v(2);
    v << -x(1), x(0);
    return v;
  };
  return s;
}

SymmetryAction translation_action(const ModelChart& torus, int k) {
  if (torus.kind() != ChartKind::Torus || k < 1 || k > torus.dim()) {
    throw Error(ErrorKind::InvalidArgument, "translation action needs a torus and 1 <= k <= dim");
  }
  SymmetryAction s;
  s.group = k == 1 ? "U1" : "T" + std::to_string(k);
  s.chart = torus;
  s.generators = k;
  s.field = [n = torus.dim()](int a, const Point&) { return unit(n, a); };
  return s;
}

SymmetryAction adjoint_su2_action() {
  const auto sc = structure_constants(GroupId::su(2));
  SymmetryAction s;
  s.group = "SU2";
  s.chart = ModelChart::box({-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}, "su2");
  s.generators = 3;
  s.structure = sc.c;
  // X_N(v) = [X, v] in basis coordinates.
  s.field = [sc](int a, const Point& v) {
    Point out = Point::Zero(3);
    for (int c = 0; c < 3; ++c) {
      for (int b = 0; b < 3; ++b) out(c) += sc(c, a, b) * v(b);
    }
    return out;
  };
  return s;
}

Point flow(const SymmetryAction& action, int a, const Point& x, double t, int steps) {
  Point p = x;
  const double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    const Point k1 = action.field(a, p);
    const Point k2 = action.field(a, p + 0.5 * dt * k1);
    const Point k3 = action.field(a, p + 0.5 * dt * k2);
    const Point k4 = action.field(a, p + dt * k3);
    p += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return p;
}

double bracket_defect(const SymmetryAction& action, const std::vector<Point>& samples, double h) {
  const int n = action.chart.dim();
  const int k = action.generators;
  auto directional = [&](int a, const Point& x, const Point& dir) {
    return Point((action.field(a, x + h * dir) - action.field(a, x - h * dir)) / (2 * h));
  };
  double worst = 0.0;
  for (const auto& x : samples) {
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        // [V, W] = V(W) - W(V).
        const Point br = directional(b, x, action.field(a, x)) - directional(a, x, action.field(b, x));
        Point rhs = Point::Zero(n);
        for (int c = 0; c < k; ++c) rhs += action.structure_constant(c, a, b) * action.field(c, x);
        worst = std::max(worst, (br + rhs).norm());
      }
    }
  }
  return worst;
}

FormField pullback_linear(const FormField& w, const ModelChart& out_chart, std::function<Point(const Point&)> phi,
                          std::function<Eigen::MatrixXd(const Point&)> dphi) {
  const auto out_masks = masks_of_degree(out_chart.dim(), w.degree);
  std::vector<std::vector<int>> out_idx, in_idx;
  for (Mask m : out_masks) out_idx.push_back(mask_indices(m));
  for (Mask m : w.masks) in_idx.push_back(mask_indices(m));
  const Mat zero = w.zero_value();
  return make_bulk_form(out_chart, w.degree, w.kind, w.group, out_masks,
                        [w, phi, dphi, out_idx, in_idx, zero, deg = w.degree](const Point& y) {
                          const Point x = phi(y);
                          const Eigen::MatrixXd j = dphi(y);
                          const auto vals = w.eval(x);
                          std::vector<Mat> out(out_idx.size(), zero);
                          Eigen::MatrixXd sub(deg, deg);
                          for (std::size_t o = 0; o < out_idx.size(); ++o) {
                            for (std::size_t k = 0; k < in_idx.size(); ++k) {
                              double det = 1.0;
                              if (deg > 0) {
                                for (int r = 0; r < deg; ++r) {
                                  for (int c = 0; c < deg; ++c) sub(r, c) = j(in_idx[k][r], out_idx[o][c]);
                                }
                                det = sub.determinant();
                              }
                              if (det != 0.0) out[o] += det * vals[k];
                            }
                          }
                          return out;
                        });
}

EquivariantForm::EquivariantForm(SymmetryAction act, int degree, std::vector<Term> ts)
    : action(std::move(act)), total_degree(degree), terms(std::move(ts)) {
  for (const auto& t : terms) {
    if (static_cast<int>(t.monomial.size()) != action.generators) {
      throw Error(ErrorKind::DimensionMismatch, "monomial length differs from the number of generators");
    }
    if (t.form.kind != ValueKind::Scalar) throw Error(ErrorKind::KindMismatch, "equivariant form terms are scalar forms");
    if (!(t.form.chart == action.chart)) throw Error(ErrorKind::ChartMismatch, "term lives on a different chart");
    if (2 * monomial_order(t.monomial) + t.form.degree != total_degree) {
      throw Error(ErrorKind::DegreeMismatch, "term does not have total degree " + std::to_string(total_degree));
    }
  }
}

int EquivariantForm::polynomial_degree() const {
  int d = 0;
  for (const auto& t : terms) d = std::max(d, monomial_order(t.monomial));
  return d;
}

FormField EquivariantForm::evaluate(const std::vector<double>& x, int form_degree) const {
  if (static_cast<int>(x.size()) != action.generators) {
    throw Error(ErrorKind::DimensionMismatch, "generator coordinates have the wrong length");
  }
  FormField out = zero_form(action.chart, form_degree, ValueKind::Scalar, GroupId::u1());
  for (const auto& t : terms) {
    if (t.form.degree != form_degree) continue;
    const double c = monomial_value(t.monomial, x);
    if (c != 0.0) out = add(out, scale(t.form, c));
  }
  return out;
}

EquivariantForm cartan_differential(const EquivariantForm& alpha, const QuadratureSpec& q) {
  std::map<std::vector<int>, FormField> acc;
  auto accumulate = [&](const std::vector<int>& m, const FormField& f) {
    auto it = acc.find(m);
    if (it == acc.end()) {
      acc.emplace(m, f);
    } else {
      it->second = add(it->second, f);
    }
  };
  const int n = alpha.action.chart.dim();
  for (const auto& t : alpha.terms) {
    if (t.form.degree < n) accumulate(t.monomial, exterior_derivative(t.form, q));
    if (t.form.degree == 0) continue;
    for (int a = 0; a < alpha.action.generators; ++a) {
      auto m = t.monomial;
      ++m[static_cast<std::size_t>(a)];
      accumulate(m, scale(interior(alpha.action.generator_field(a), t.form), -1.0));
    }
  }
  std::vector<EquivariantForm::Term> terms;
  for (auto& [m, f] : acc) terms.push_back({m, f});
  return EquivariantForm(alpha.action, alpha.total_degree + 1, std::move(terms));
}

double invariance_defect(const EquivariantForm& alpha, const std::vector<Point>& samples,
                         const std::vector<std::vector<double>>& xs, double t, int steps) {
  const auto& act = alpha.action;
  std::vector<int> degrees;
  for (const auto& term : alpha.terms) {
    if (std::find(degrees.begin(), degrees.end(), term.form.degree) == degrees.end()) degrees.push_back(term.form.degree);
  }
  double worst = 0.0;
  for (int a = 0; a < act.generators; ++a) {
    for (const auto& x : xs) {
      const auto xg = adjoint_flow(act, a, t, x);
      for (int deg : degrees) {
        const auto base = alpha.evaluate(x, deg);
        const auto moved = pullback_linear(
            alpha.evaluate(xg, deg), act.chart, [&act, a, t, steps](const Point& p) { return flow(act, a, p, t, steps); },
            [&act, a, t, steps](const Point& p) { return flow_jacobian(act, a, p, t, steps); });
        for (const auto& p : samples) {
          const auto v = moved.eval(p);
          for (std::size_t k = 0; k < moved.masks.size(); ++k) {
            worst = std::max(worst, std::abs((v[k] - base.component(moved.masks[k], p))(0, 0)));
          }
        }
      }
    }
  }
  return worst;
}

ToyBundle toy_bundle(const std::string& name) {
  ToyBundle b;
  b.name = name;
  if (name == "hopf") {
    b.total = ModelChart::box({0.0, 0.0, 0.0}, {kPi, 2 * kPi, 4 * kPi}, "hopf_s3");
    b.base = ModelChart::box({0.0, 0.0}, {kPi, 2 * kPi}, "hopf_s2");
    b.action.group = "U1";
    b.action.chart = b.total;
    b.action.generators = 1;
    b.action.field = [](int, const Point&) -> Point { return 2.0 * unit(3, 2); };
    b.connection.push_back(scalar_form(b.total, 1,
                                       {{bit(1), [](const Point& x) { return 0.5 * std::cos(x(0)); }},
                                        {bit(2), [](const Point&) { return 0.5; }}}));
  } else if (name == "torus3") {
    b.total = ModelChart::torus(3);
    b.base = ModelChart::torus(2);
    b.action = translation_action(b.total, 1);
    // Translate z rather than x: the fiber is the last coordinate.
    b.action.field = [](int, const Point&) { return unit(3, 2); };
    b.connection.push_back(scalar_form(b.total, 1,
                                       {{bit(1), [](const Point& x) { return 0.3 * std::sin(2 * kPi * x(0)); }},
                                        {bit(2), [](const Point&) { return 1.0; }}}));
  } else {
    throw Error(ErrorKind::UnsupportedBundle, "unknown toy bundle '" + name + "'");
  }
  b.section = [](const Point& y) {
    Point x(3);
    x << y(0), y(1), 0.0;
    return x;
  };
  b.section_jacobian = [](const Point&) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 2);
    j(0, 0) = 1.0;
    j(1, 1) = 1.0;
    return j;
  };
  return b;
}

std::vector<std::string> toy_bundle_names() { return {"hopf", "torus3"}; }

FormField chern_weil_map_total(const EquivariantForm& alpha, const ToyBundle& bundle, const QuadratureSpec& q) {
  require_supported(alpha, bundle);
  const auto& chart = bundle.total;
  if (alpha.total_degree > chart.dim()) {
    throw Error(ErrorKind::DegreeOverflow, "Chern-Weil image exceeds the dimension of " + chart.id());
  }
  std::vector<FormField> curv;
  for (const auto& th : bundle.connection) curv.push_back(exterior_derivative(th, q));
  FormField out = zero_form(chart, alpha.total_degree, ValueKind::Scalar, GroupId::u1());
  for (const auto& t : alpha.terms) {
    FormField hor = pullback_linear(
        t.form, chart, [](const Point& x) { return x; },
        [bundle](const Point& x) { return horizontal_projector(bundle, x); });
    for (std::size_t a = 0; a < t.monomial.size(); ++a) {
      for (int e = 0; e < t.monomial[a]; ++e) hor = wedge(curv[a], hor);
    }
    out = add(out, hor);
  }
  return out;
}

FormField chern_weil_map(const EquivariantForm& alpha, const ToyBundle& bundle, const QuadratureSpec& q) {
  return pullback_linear(chern_weil_map_total(alpha, bundle, q), bundle.base, bundle.section,
                         bundle.section_jacobian);
}

double connection_invariance_defect(const Connection& a, const SymmetryAction& action,
                                    const std::vector<Point>& samples, double t, int steps) {
  if (!(a.chart() == action.chart)) throw Error(ErrorKind::ChartMismatch, "action lives on a different chart");
  double worst = 0.0;
  for (int g = 0; g < action.generators; ++g) {
    const auto moved = pullback_linear(
        a.form, action.chart, [&action, g, t, steps](const Point& p) { return flow(action, g, p, t, steps); },
        [&action, g, t, steps](const Point& p) { return flow_jacobian(action, g, p, t, steps); });
    for (const auto& p : samples) {
      const auto v = moved.eval(p);
      for (std::size_t k = 0; k < moved.masks.size(); ++k) {
        worst = std::max(worst, (v[k] - a.form.component(moved.masks[k], p)).norm());
      }
    }
  }
  return worst;
}

std::vector<FormField> equivariant_char_form(const InvariantPolynomial& p, const Connection& a,
                                             const SymmetryAction& action, const std::vector<double>& x,
                                             const QuadratureSpec& q, CharFormMethod method) {
  if (connection_invariance_defect(a, action, uniform_samples(action.chart, 16, 7)) > 1e-6) {
    throw Error(ErrorKind::NotInvariant, "connection is not invariant under the symmetry action");
  }
  const int r = p.degree;
  const int top = std::min(r, a.chart().dim() / 2);
  const FormField f = curvature(a, q);
  const FormField v = interior(action.fundamental(x), a.form);
  std::vector<FormField> out;
  for (int k = 0; k <= top; ++k) {
    FormField acc = zero_form(a.chart(), 2 * k, ValueKind::Scalar, GroupId::u1());
    if (method == CharFormMethod::Binomial) {
      std::vector<FormField> args(static_cast<std::size_t>(k), f);
      args.insert(args.end(), static_cast<std::size_t>(r - k), v);
      double binom = 1.0;
      for (int i = 1; i <= k; ++i) binom = binom * (r - k + i) / i;
      const double sign = (r - k) % 2 == 0 ? 1.0 : -1.0;
      acc = scale(polynomial_form(p, args), binom * sign);
    } else {
      for (int choice = 0; choice < (1 << r); ++choice) {
        if (std::popcount(static_cast<unsigned>(choice)) != k) continue;
        std::vector<FormField> args;
        for (int s = 0; s < r; ++s) args.push_back((choice >> s) & 1 ? f : scale(v, -1.0));
        acc = add(acc, polynomial_form(p, args));
      }
    }
    out.push_back(acc);
  }
  return out;
}

FormField BigradedForm::part(int i, int j) const {
  auto it = parts.find({i, j});
  if (it != parts.end()) return it->second;
  if (parts.empty()) throw Error(ErrorKind::InvalidArgument, "empty bigraded form");
  const auto& any = parts.begin()->second;
  return restrict_components(any, [](Mask) { return false; });
}

BigradedForm bigrade(const FormField& w, int base_dim) {
  if (w.chart.kind() != ChartKind::Product || w.chart.base().dim() != base_dim) {
    throw Error(ErrorKind::ChartMismatch, "bigrading needs a form on a product chart");
  }
  BigradedForm out;
  out.base_dim = base_dim;
  out.param_dim = w.chart.dim() - base_dim;
  out.degree = w.degree;
  const Mask base_bits = (Mask{1} << base_dim) - 1;
  std::map<int, bool> seen;
  for (Mask m : w.masks) seen[popcount(m & base_bits)] = true;
  for (const auto& [i, _] : seen) {
    out.parts.emplace(std::make_pair(i, w.degree - i),
                      restrict_components(w, [base_bits, i](Mask m) { return popcount(m & base_bits) == i; }));
  }
  // Keep a degree template for part() even when nothing is stored.
  if (out.parts.empty()) out.parts.emplace(std::make_pair(w.degree, 0), w);
  return out;
}

double max_magnitude(const FormField& w, const std::vector<Point>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    for (const auto& v : w.eval(p)) worst = std::max(worst, v.norm());
  }
  return worst;
}

BigradedForm family_curvature_bigrading(const ConnectionFamily& fam, const QuadratureSpec& q) {
  return bigrade(curvature(Connection(fam.total), q), fam.base.dim());
}

std::vector<Point> family_samples(const ConnectionFamily& fam, int n, std::uint64_t seed) {
  return uniform_samples(fam.product(), n, seed);
}

FormField vertical_form(const ConnectionFamily& fam,
                        std::function<std::vector<Mat>(const Point& x, const Point& s)> components) {
  const int nb = fam.base.dim();
  const int ns = fam.params.dim();
  std::vector<Mask> masks;
  for (int a = 0; a < ns; ++a) masks.push_back(bit(nb + a));
  return make_bulk_form(fam.product(), 1, ValueKind::Algebra, fam.group(), masks,
                        [components, nb, ns](const Point& p) {
                          auto out = components(p.head(nb), p.tail(ns));
                          if (static_cast<int>(out.size()) != ns) {
                            throw Error(ErrorKind::ArityMismatch, "vertical form needs one component per parameter");
                          }
                          return out;
                        });
}

std::vector<VanishingEntry> flat_vanishing_check(const InvariantPolynomial& p, const ConnectionFamily& fam,
                                                 const std::vector<Point>& samples, const QuadratureSpec& q,
                                                 double flat_tol) {
  require_flat(fam, samples, q, flat_tol);
  const auto f = curvature(Connection(fam.total), q);
  const auto pf = polynomial_form(p, std::vector<FormField>(static_cast<std::size_t>(p.degree), f));
  return tabulate(pf, fam.base.dim(), p.degree, samples);
}

std::vector<VanishingEntry> connection_independence_check(const InvariantPolynomial& p, const ConnectionFamily& fam,
                                                          const FormField& va, const FormField& vb,
                                                          const std::vector<Point>& samples,
                                                          const QuadratureSpec& q, double flat_tol, int t_nodes) {
  require_flat(fam, samples, q, flat_tol);
  const Connection a(fam.total + va);
  const Connection b(fam.total + vb);
  const auto tp = transgression(p, b, a, q, t_nodes);
  return tabulate(tp, fam.base.dim(), p.degree, samples);
}

}  // namespace cs
