#include <cmath>
#include <numbers>
#include <random>

#include "cs/equivariant.hpp"
#include "cs/errors.hpp"
#include "doctest.h"

using namespace cs;

namespace {

constexpr double kPi = std::numbers::pi;
const QuadratureSpec kQ{};

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

AlgebraElement su2(int k) { return structure_constants(GroupId::su(2)).basis[static_cast<std::size_t>(k)]; }

std::vector<Point> samples_in(const ModelChart& chart, int n, std::uint64_t seed, double margin = 0.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(margin, 1.0 - margin);
  std::vector<Point> out;
  for (int k = 0; k < n; ++k) {
    Point p(chart.dim());
    for (int i = 0; i < chart.dim(); ++i) {
      const auto ui = static_cast<std::size_t>(i);
      p(i) = chart.lower()[ui] + u(rng) * (chart.upper()[ui] - chart.lower()[ui]);
    }
    out.push_back(p);
  }
  return out;
}

double max_diff(const FormField& a, const FormField& b, const std::vector<Point>& xs) {
  std::vector<Mask> masks = a.masks;
  masks.insert(masks.end(), b.masks.begin(), b.masks.end());
  double worst = 0.0;
  for (const auto& x : xs) {
    for (Mask m : masks) worst = std::max(worst, (a.component(m, x) - b.component(m, x)).norm());
  }
  return worst;
}

double max_norm(const FormField& a, const std::vector<Point>& xs) {
  double worst = 0.0;
  for (const auto& x : xs) {
    for (const auto& v : a.eval(x)) worst = std::max(worst, v.norm());
  }
  return worst;
}

double max_entry(const std::vector<VanishingEntry>& t, int i, int j) {
  for (const auto& e : t) {
    if (e.base_degree == i && e.param_degree == j) return e.max_magnitude;
  }
  return -1.0;
}

// Largest magnitude over every component of d_c alpha.
double dc_size(const EquivariantForm& alpha, const std::vector<Point>& xs) {
  double worst = 0.0;
  for (const auto& t : alpha.terms) worst = std::max(worst, max_norm(t.form, xs));
  return worst;
}

}  // namespace

TEST_CASE("symmetry actions") {
  auto rot = rotation_action();
  CHECK(rot.abelian());
  CHECK(bracket_defect(rot, samples_in(rot.chart, 20, 1)) < 1e-8);
  // Rotation by 2 pi returns to the start.
  const Point p = pt({0.3, -0.4});
  CHECK((flow(rot, 0, p, 2 * kPi, 400) - p).norm() < 1e-8);

  auto t2 = translation_action(ModelChart::torus(2), 2);
  CHECK(t2.generators == 2);
  CHECK(bracket_defect(t2, samples_in(t2.chart, 20, 2)) == 0.0);

  auto su = adjoint_su2_action();
  CHECK_FALSE(su.abelian());
  CHECK(bracket_defect(su, samples_in(su.chart, 20, 3)) < 1e-8);
  // The flow of X_a is Ad_{exp(t X_a)}.
  const Point v = pt({0.2, -0.5, 0.4});
  const auto sc = structure_constants(GroupId::su(2));
  const Mat g = expm(0.7 * sc.basis[1].matrix());
  const auto expect = sc.coordinates(g * sc.from_coordinates(std::vector<double>{0.2, -0.5, 0.4}) * g.adjoint());
  const Point got = flow(su, 1, v, 0.7, 40);
  for (int c = 0; c < 3; ++c) CHECK(std::abs(got(c) - expect[static_cast<std::size_t>(c)]) < 1e-8);

  CHECK_THROWS_AS(translation_action(ModelChart::cube_s3(), 1), Error);
}

TEST_CASE("Cartan differential") {
  auto rot = rotation_action();
  const auto& disk = rot.chart;
  const auto xs = samples_in(disk, 200, 4);

  SUBCASE("function without polynomial part") {
    auto f = scalar_form(disk, 0, {{0u, [](const Point& x) { return x(0) * x(0) + x(1) * x(1); }}});
    EquivariantForm alpha(rot, 0, {{{0}, f}});
    auto dca = cartan_differential(alpha, kQ);
    CHECK(max_diff(dca.evaluate({0.8}, 1), exterior_derivative(f, kQ), xs) < 1e-9);
  }
  SUBCASE("closed extension of the area form") {
    auto area = scalar_form(disk, 2, {{3u, [](const Point&) { return 1.0; }}});
    auto mu = scalar_form(disk, 0, {{0u, [](const Point& x) { return -0.5 * (x(0) * x(0) + x(1) * x(1)); }}});
    EquivariantForm w(rot, 2, {{{0}, area}, {{1}, mu}});
    CHECK(invariance_defect(w, samples_in(disk, 10, 5, 0.3), {{1.0}}) < 1e-6);
    auto dcw = cartan_differential(w, kQ);
    CHECK(dcw.total_degree == 3);
    CHECK(dc_size(dcw, xs) < 1e-6);
    // With the opposite sign for mu the form is not closed.
    EquivariantForm bad(rot, 2, {{{0}, area}, {{1}, scale(mu, -1.0)}});
    CHECK(dc_size(cartan_differential(bad, kQ), xs) > 0.1);
  }
  SUBCASE("d_c squared vanishes on invariant forms") {
    auto t2 = ModelChart::torus(2);
    auto act = translation_action(t2, 1);
    const auto ys = samples_in(t2, 50, 6);
    auto f = scalar_form(t2, 2, {{3u, [](const Point& x) { return std::sin(2 * kPi * x(1)) + 0.3; }}});
    auto g = scalar_form(t2, 0, {{0u, [](const Point& x) { return std::cos(4 * kPi * x(1)); }}});
    auto u = scalar_form(t2, 1,
                         {{1u, [](const Point& x) { return std::exp(std::sin(2 * kPi * x(1))); }},
                          {2u, [](const Point& x) { return std::cos(2 * kPi * x(1)) * 0.7; }}});
    EquivariantForm a2(act, 2, {{{0}, f}, {{1}, g}});
    EquivariantForm a1(act, 1, {{{0}, u}});
    for (const auto* a : {&a2, &a1}) {
      CHECK(invariance_defect(*a, samples_in(t2, 10, 7), {{0.6}}) < 1e-6);
      CHECK(dc_size(cartan_differential(cartan_differential(*a, kQ), kQ), ys) < 1e-5);
    }
    // A non-invariant form: d_c^2 = -L_X is visible.
    auto h = scalar_form(t2, 1, {{2u, [](const Point& x) { return std::sin(2 * kPi * x(0)); }}});
    EquivariantForm na(act, 1, {{{0}, h}});
    CHECK(invariance_defect(na, samples_in(t2, 10, 8), {{0.6}}) > 0.1);
    CHECK(dc_size(cartan_differential(cartan_differential(na, kQ), kQ), ys) > 0.1);
  }
  SUBCASE("non-abelian invariance") {
    auto su = adjoint_su2_action();
    std::vector<EquivariantForm::Term> terms;
    for (int a = 0; a < 3; ++a) {
      std::vector<int> m(3, 0);
      m[static_cast<std::size_t>(a)] = 1;
      terms.push_back({m, scalar_form(su.chart, 0, {{0u, [a](const Point& v) { return v(a); }}})});
    }
    EquivariantForm pairing(su, 2, terms);  // X -> <X, v>
    const std::vector<std::vector<double>> gens{{0.3, -0.2, 0.5}, {1.0, 0.0, 0.0}};
    CHECK(invariance_defect(pairing, samples_in(su.chart, 10, 9, 0.3), gens) < 1e-6);
    CHECK(dc_size(cartan_differential(cartan_differential(pairing, kQ), kQ), samples_in(su.chart, 20, 10)) < 1e-5);
    EquivariantForm skew(su, 2, {{{1, 0, 0}, scalar_form(su.chart, 0, {{0u, [](const Point& v) { return v(1); }}})}});
    CHECK(invariance_defect(skew, samples_in(su.chart, 10, 9, 0.3), gens) > 1e-2);
  }
  SUBCASE("grading is validated") {
    auto f = scalar_form(disk, 1, {{1u, [](const Point&) { return 1.0; }}});
    CHECK_THROWS_AS(EquivariantForm(rot, 2, {{{0}, f}}), Error);
  }
}

TEST_CASE("Chern-Weil map on toy bundles") {
  SUBCASE("Hopf first Chern number") {
    auto hopf = toy_bundle("hopf");
    auto c = constant_function(hopf.total, -1.0 / (2 * kPi));
    EquivariantForm alpha(hopf.action, 2, {{{1}, c}});
    auto w = chern_weil_map(alpha, hopf, kQ);
    CHECK(w.chart == hopf.base);
    auto s2 = box_chain(hopf.base, {0.0, 0.0}, {kPi, 2 * kPi}, 2);
    CHECK(std::abs(integrate_scalar(w, s2, kQ) - Complex(1.0, 0.0)) < 1e-6);
  }
  SUBCASE("basic forms are fixed") {
    auto hopf = toy_bundle("hopf");
    auto beta = scalar_form(hopf.total, 2, {{3u, [](const Point& x) { return std::sin(x(0)) * std::cos(x(1)); }}});
    EquivariantForm alpha(hopf.action, 2, {{{0}, beta}});
    auto w = chern_weil_map(alpha, hopf, kQ);
    for (const auto& y : samples_in(hopf.base, 20, 11)) {
      CHECK(std::abs(w.component(3u, y)(0, 0).real() - std::sin(y(0)) * std::cos(y(1))) < 1e-12);
    }
  }
  SUBCASE("intertwines d_c with d") {
    for (const auto& name : toy_bundle_names()) {
      CAPTURE(name);
      auto b = toy_bundle(name);
      // Invariant 1-form: no dependence on the fiber coordinate.
      auto w = scalar_form(b.total, 1,
                           {{1u, [](const Point& x) { return std::sin(x(0)) * std::cos(2 * x(1)); }},
                            {2u, [](const Point& x) { return std::cos(x(0) + x(1)); }},
                            {4u, [](const Point& x) { return 0.5 + std::sin(x(1)) * x(0); }}});
      EquivariantForm alpha(b.action, 1, {{{0}, w}});
      const auto xs = samples_in(b.total, 30, 12, 0.05);
      auto lhs = chern_weil_map_total(cartan_differential(alpha, kQ), b, kQ);
      auto rhs = exterior_derivative(chern_weil_map_total(alpha, b, kQ), kQ);
      CHECK(max_diff(lhs, rhs, xs) < 1e-5);
      CHECK(max_norm(rhs, xs) > 1e-2);
    }
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(toy_bundle("klein"), Error);
    auto hopf = toy_bundle("hopf");
    auto rot = rotation_action();
    EquivariantForm alien(rot, 0, {{{0}, constant_function(rot.chart, 1.0)}});
    try {
      chern_weil_map(alien, hopf, kQ);
      FAIL("expected UnsupportedBundle");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::UnsupportedBundle);
    }
  }
}

TEST_CASE("equivariant characteristic forms") {
  auto t4 = ModelChart::torus(4);
  auto act = translation_action(t4, 1);
  // Invariant under translation of x_0: coefficients depend on x_1..x_3 only.
  Connection a(algebra_form(
      t4, 1,
      {{bit(0), [](const Point& x) { return 0.3 + 0.5 * std::sin(2 * kPi * x(1)); }, su2(0)},
       {bit(0), [](const Point&) { return 0.4; }, su2(2)},
       {bit(1), [](const Point& x) { return std::cos(2 * kPi * (x(2) + x(3))); }, su2(1)},
       {bit(2), [](const Point& x) { return 0.6 * std::sin(2 * kPi * x(3)); }, su2(2)},
       {bit(3), [](const Point& x) { return 0.2 * std::cos(2 * kPi * x(1)); }, su2(0)}}));
  const auto xs = samples_in(t4, 15, 13);
  const auto p2 = InvariantPolynomial::standard(2);

  auto zero = equivariant_char_form(p2, a, act, {0.0}, kQ);
  REQUIRE(zero.size() == 3);
  CHECK(max_norm(zero[0], xs) == 0.0);
  CHECK(max_diff(zero[2], polynomial_form(p2, {curvature(a, kQ), curvature(a, kQ)}), xs) < 1e-12);

  const std::vector<double> x{0.7};
  auto bin = equivariant_char_form(p2, a, act, x, kQ, CharFormMethod::Binomial);
  auto dir = equivariant_char_form(p2, a, act, x, kQ, CharFormMethod::Direct);
  for (std::size_t k = 0; k < bin.size(); ++k) CHECK(max_diff(bin[k], dir[k], xs) < 1e-12);
  CHECK(max_norm(bin[1], xs) > 1e-3);

  // Equivariant closedness: d(part k) = i_{X_N}(part k+1).
  const auto xn = act.fundamental(x);
  for (std::size_t k = 0; k + 1 < bin.size(); ++k) {
    CHECK(max_diff(exterior_derivative(bin[k], kQ), interior(xn, bin[k + 1]), xs) < 1e-5);
  }

  // Abelian r = 1: the 0-form part is -p(v_A(X)), linear in X.
  auto t2 = ModelChart::torus(2);
  auto u1 = structure_constants(GroupId::u1()).basis[0];
  Connection b(algebra_form(t2, 1,
                            {{bit(0), [](const Point& y) { return std::sin(2 * kPi * y(1)); }, u1},
                             {bit(1), [](const Point& y) { return 0.5 * std::cos(2 * kPi * y(1)); }, u1}}));
  auto act2 = translation_action(t2, 1);
  const auto p1 = InvariantPolynomial::standard(1);
  auto e1 = equivariant_char_form(p1, b, act2, {1.0}, kQ);
  auto e3 = equivariant_char_form(p1, b, act2, {3.0}, kQ);
  for (const auto& y : samples_in(t2, 10, 14)) {
    const Complex expect = -p1.normalization * b.form.component(1u, y)(0, 0);
    CHECK(std::abs(e1[0].component(0u, y)(0, 0) - expect) < 1e-14);
    CHECK(std::abs(e3[0].component(0u, y)(0, 0) - 3.0 * expect) < 1e-14);
  }

  Connection moving(algebra_form(t4, 1, {{bit(1), [](const Point& x) { return std::sin(2 * kPi * x(0)); }, su2(0)}}));
  try {
    equivariant_char_form(p2, moving, act, x, kQ);
    FAIL("expected NotInvariant");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotInvariant);
  }
}

TEST_CASE("family curvature bigrading") {
  auto t2 = ModelChart::torus(2);
  const Mat h = su2(2).matrix();

  SUBCASE("constant family") {
    auto a = Connection(algebra_form(t2, 1, {{bit(1), [](const Point& x) { return std::sin(2 * kPi * x(0)); }, su2(2)}}));
    auto fam = make_family(t2, ModelChart::box({0.0}, {1.0}, "s"), GroupId::su(2), [&](const Point& x, const Point&) {
      return std::vector<Mat>{a.form.component(1u, x), a.form.component(2u, x)};
    });
    auto bg = family_curvature_bigrading(fam, kQ);
    const auto ps = family_samples(fam, 20, 15);
    CHECK(max_norm(bg.part(1, 1), ps) < 1e-12);
    CHECK_FALSE(bg.populated(0, 2));
    const auto f = curvature(a, kQ);
    for (const auto& p : ps) CHECK((bg.part(2, 0).component(3u, p) - f.component(3u, p.head(2))).norm() < 1e-8);
  }
  SUBCASE("linear family") {
    auto fam = make_family(t2, ModelChart::box({-1.0}, {1.0}, "s"), GroupId::su(2), [h](const Point& x, const Point& s) {
      return std::vector<Mat>{Mat::Zero(2, 2), s(0) * std::sin(2 * kPi * x(0)) * h};
    });
    auto bg = family_curvature_bigrading(fam, kQ);
    // ds ^ dy has sorted mask dy ^ ds = bits {1, 2}, so the stored coefficient is -sin(2 pi x) H.
    for (const auto& p : family_samples(fam, 20, 16)) {
      CHECK((bg.part(1, 1).component(6u, p) + std::sin(2 * kPi * p(0)) * h).norm() < 1e-9);
    }
    CHECK_FALSE(bg.populated(0, 2));
  }
  SUBCASE("flat commuting family") {
    auto fam = commuting_family(2, su2(2), su2(0), 0.0);
    auto bg = family_curvature_bigrading(fam, kQ);
    CHECK(max_norm(bg.part(2, 0), family_samples(fam, 50, 17)) < 1e-10);
    CHECK_FALSE(bg.populated(0, 2));
  }
}

TEST_CASE("flat vanishing check") {
  const auto p2 = InvariantPolynomial::standard(2);
  auto fam2 = commuting_family(2, su2(2), su2(0), 0.0);
  auto table = flat_vanishing_check(p2, fam2, family_samples(fam2, 200, 18), kQ);
  CHECK(max_entry(table, 4, 0) < 1e-10);
  CHECK(max_entry(table, 3, 1) < 1e-10);
  for (const auto& e : table) CHECK(e.tested == (e.param_degree < 2));

  // On T^3 the (3,1) component is not structurally zero; flatness kills it.
  auto fam3 = commuting_family(3, su2(2), su2(0), 0.8);
  auto t3 = flat_vanishing_check(p2, fam3, family_samples(fam3, 40, 19), kQ);
  CHECK(max_entry(t3, 3, 1) < 1e-8);
  CHECK(max_entry(t3, 2, 2) > 1e-3);

  const Mat h = su2(2).matrix();
  auto curved = make_family(ModelChart::torus(2), ModelChart::box({-1.0, -1.0}, {1.0, 1.0}, "s"), GroupId::su(2),
                            [h](const Point& x, const Point& s) {
                              return std::vector<Mat>{s(0) * std::sin(2 * kPi * x(1)) * h, s(1) * h};
                            });
  try {
    flat_vanishing_check(p2, curved, family_samples(curved, 10, 20), kQ);
    FAIL("expected NotFlat");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotFlat);
  }
}

TEST_CASE("connection independence on the flat locus") {
  const auto p2 = InvariantPolynomial::standard(2);
  const Mat x = su2(0).matrix(), y = su2(1).matrix(), z = su2(2).matrix();
  for (int n : {2, 3}) {
    CAPTURE(n);
    auto fam = commuting_family(n, su2(2), su2(0), n == 3 ? 0.8 : 0.0);
    auto va = vertical_form(fam, [&](const Point& p, const Point& s) {
      std::vector<Mat> out;
      for (int a = 0; a < s.size(); ++a) out.push_back(std::sin(2 * kPi * p(0)) * s(a) * x + 0.2 * a * z);
      return out;
    });
    auto vb = vertical_form(fam, [&](const Point& p, const Point& s) {
      std::vector<Mat> out;
      for (int a = 0; a < s.size(); ++a) out.push_back(std::cos(2 * kPi * p(1)) * y + s(0) * s(a) * z);
      return out;
    });
    const auto ps = family_samples(fam, n == 2 ? 200 : 30, 21);
    auto same = connection_independence_check(p2, fam, va, va, ps, kQ);
    for (const auto& e : same) CHECK(e.max_magnitude == 0.0);
    auto diff = connection_independence_check(p2, fam, va, vb, ps, kQ);
    CHECK(max_entry(diff, 3, 0) < 1e-7);
    CHECK(max_entry(diff, 2, 1) < 1e-7);
    CHECK(max_entry(diff, 1, 2) > 1e-4);
  }
}
