#include <cmath>
#include <numbers>
#include <random>

#include "cs/errors.hpp"
#include "cs/forms.hpp"
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

double re(const Mat& m) { return m(0, 0).real(); }

// Random polynomial scalar 1-form on the 3-box with degree <= 3 coefficients.
FormField random_poly_one_form(const ModelChart& chart, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<std::pair<Mask, ScalarCoefficient>> comps;
  for (int i = 0; i < chart.dim(); ++i) {
    std::array<double, 6> c{};
    for (auto& v : c) v = coef(rng);
    comps.emplace_back(bit(i), [c](const Point& x) {
      return c[0] + c[1] * x(0) + c[2] * x(1) * x(1) + c[3] * x(0) * x(1) * x(2) + c[4] * x(2) * x(2) * x(2) +
             c[5] * std::sin(x(0) + 2.0 * x(1));
    });
  }
  return scalar_form(chart, 1, comps);
}

ModelChart box3() { return ModelChart::box({0, 0, 0}, {1, 1, 1}, "cube"); }

std::vector<Point> samples(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<Point> out;
  for (int k = 0; k < n; ++k) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p(i) = u(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST_CASE("mask signs") {
  CHECK(wedge_sign(bit(0), bit(1)) == 1);
  CHECK(wedge_sign(bit(1), bit(0)) == -1);
  CHECK(wedge_sign(bit(0) | bit(2), bit(1)) == -1);
  CHECK(wedge_sign(bit(1), bit(1)) == 0);
  CHECK(wedge_sign(0u, bit(3)) == 1);
}

TEST_CASE("d of a constant vanishes and d(x dy) = dx^dy") {
  auto t2 = ModelChart::torus(2);
  auto dc = exterior_derivative(constant_function(t2, 3.0), kQ);
  CHECK(dc.degree == 1);
  for (auto& v : dc.values(pt({0.3, 0.4}))) CHECK(v.norm() < 1e-9);
  auto xdy = scalar_form(t2, 1, {{bit(1), [](const Point& x) { return x(0); }}});
  auto d = exterior_derivative(xdy, kQ);
  CHECK(std::abs(re(d.component(bit(0) | bit(1), pt({0.4, 0.7}))) - 1.0) < 1e-8);
  CHECK_THROWS_AS(exterior_derivative(d, kQ), Error);
}

TEST_CASE("d squared vanishes at random points") {
  std::mt19937_64 rng(1);
  auto chart = box3();
  for (int trial = 0; trial < 3; ++trial) {
    auto w = random_poly_one_form(chart, rng);
    auto ddw = exterior_derivative(exterior_derivative(w, kQ), kQ);
    double worst = 0.0;
    for (const auto& x : samples(100, 3, 9)) {
      for (auto& v : ddw.values(x)) worst = std::max(worst, v.norm());
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("wedge is graded antisymmetric and unital") {
  auto t2 = ModelChart::torus(2);
  auto dx = scalar_form(t2, 1, {{bit(0), [](const Point&) { return 1.0; }}});
  auto dy = scalar_form(t2, 1, {{bit(1), [](const Point&) { return 1.0; }}});
  const Point x = pt({0.2, 0.3});
  CHECK(re(wedge(dx, dy).component(3u, x)) == doctest::Approx(1.0));
  CHECK(re(wedge(dy, dx).component(3u, x)) == doctest::Approx(-1.0));
  auto w = wedge(dx, constant_function(t2, 1.0));
  CHECK(re(w.component(bit(0), x)) == doctest::Approx(1.0));
  CHECK_THROWS_AS(wedge(dx, constant_function(ModelChart::torus(3), 1.0)), Error);
  CHECK_THROWS_AS(wedge(dx, dy, WedgeMode::LieBracket), Error);
}

TEST_CASE("[A^A] = 2 f g dx^dy [X,Y]") {
  auto t2 = ModelChart::torus(2);
  const Complex i{0.0, 1.0};
  Mat mx(2, 2), my(2, 2);
  mx << 0.0, i, i, 0.0;
  my << 0.0, 1.0, -1.0, 0.0;
  AlgebraElement X(GroupId::su(2), mx), Y(GroupId::su(2), my);
  auto f = [](const Point& p) { return std::sin(2 * kPi * p(0)) + 0.3; };
  auto g = [](const Point& p) { return std::cos(2 * kPi * p(1)) * p(0); };
  auto a = algebra_form(t2, 1, {{bit(0), f, X}, {bit(1), g, Y}});
  auto aa = wedge(a, a, WedgeMode::LieBracket);
  CHECK(aa.kind == ValueKind::Algebra);
  for (const auto& x : samples(20, 2, 4)) {
    Mat expect = 2.0 * f(x) * g(x) * bracket(X, Y).matrix();
    CHECK((aa.component(3u, x) - expect).norm() < 1e-10);
  }
}

TEST_CASE("basic integrals") {
  auto t2 = builtin_chain("torus2.fundamental");
  auto area = scalar_form(t2.chart, 2, {{3u, [](const Point&) { return 1.0; }}});
  CHECK(std::abs(integrate_scalar(area, t2, kQ).real() - 1.0) < 1e-12);
  auto s1 = builtin_chain("torus1.x_cycle");
  auto w = scalar_form(s1.chart, 1, {{bit(0), [](const Point& x) { return 1.0 + std::cos(2 * kPi * x(0)); }}});
  CHECK(std::abs(integrate_scalar(w, s1, kQ).real() - 1.0) < 1e-10);
  CHECK_THROWS_AS(integrate(w, builtin_chain("torus2.x_cycle"), kQ), Error);
  CHECK_THROWS_AS(integrate(area, builtin_chain("torus2.x_cycle"), kQ), Error);
}

TEST_CASE("Stokes on a square and on random cells") {
  auto chart = ModelChart::box({0, 0}, {1, 1}, "plane");
  auto sq = box_chain(chart, {0.2, 0.1}, {0.9, 0.6});
  auto xdy = scalar_form(chart, 1, {{bit(1), [](const Point& x) { return x(0); }}});
  const double lhs = integrate_scalar(xdy, boundary(sq), kQ).real();
  const double rhs = integrate_scalar(exterior_derivative(xdy, kQ), sq, kQ).real();
  CHECK(std::abs(lhs - 0.35) < 1e-12);
  CHECK(std::abs(lhs - rhs) < 1e-8);

  // Curved 3-cell in the box.
  std::mt19937_64 rng(2);
  auto c3 = box3();
  Cell cell;
  cell.dim = 3;
  cell.map = [](const Point& u) -> Point {
    return pt({0.1 + 0.6 * u(0) + 0.05 * std::sin(u(1)), 0.2 + 0.5 * u(1) + 0.1 * u(0) * u(2), 0.1 + 0.7 * u(2)});
  };
  Chain ch{c3, {cell}};
  for (int t = 0; t < 3; ++t) {
    auto w1 = random_poly_one_form(c3, rng);
    auto w2 = wedge(w1, random_poly_one_form(c3, rng));
    const double l = integrate_scalar(w2, boundary(ch), kQ).real();
    const double r = integrate_scalar(exterior_derivative(w2, kQ), ch, kQ).real();
    CHECK(std::abs(l - r) < 1e-6);
  }
}

TEST_CASE("boundary of boundary integrates to zero") {
  CHECK(boundary(Chain{ModelChart::torus(2), {point_cell(pt({0.1, 0.2}))}}).cells.empty());
  auto sq = box_chain(ModelChart::box({0, 0}, {1, 1}, "plane"), {0, 0}, {1, 1});
  CHECK(boundary(sq).cells.size() == 4);
  auto exact = exterior_derivative(scalar_form(sq.chart, 0, {{0u, [](const Point& x) { return std::exp(x(0)) * x(1); }}}), kQ);
  CHECK(std::abs(integrate_scalar(exact, boundary(sq), kQ)) < 1e-9);

  std::mt19937_64 rng(3);
  auto cube = box_chain(box3(), {0, 0, 0}, {1, 1, 1});
  auto w = random_poly_one_form(box3(), rng);
  CHECK(std::abs(integrate_scalar(w, boundary(boundary(cube)), kQ)) < 1e-10);
}

TEST_CASE("Leibniz rule") {
  std::mt19937_64 rng(4);
  auto chart = box3();
  auto f = scalar_form(chart, 0, {{0u, [](const Point& x) { return std::sin(x(0)) * x(1) + x(2) * x(2); }}});
  auto w = random_poly_one_form(chart, rng);
  for (auto [a, b] : {std::pair{f, w}, std::pair{w, random_poly_one_form(chart, rng)}}) {
    auto lhs = exterior_derivative(wedge(a, b), kQ);
    const double sgn = a.degree % 2 == 0 ? 1.0 : -1.0;
    auto rhs = wedge(exterior_derivative(a, kQ), b) + scale(wedge(a, exterior_derivative(b, kQ)), sgn);
    for (const auto& x : samples(20, 3, 5)) {
      for (Mask m : rhs.masks) CHECK((lhs.component(m, x) - rhs.component(m, x)).norm() < 1e-6);
    }
  }
}

TEST_CASE("orientation flips negate integrals") {
  std::mt19937_64 rng(6);
  auto c = box_chain(box3(), {0, 0, 0}, {1, 1, 1});
  auto w = wedge(random_poly_one_form(box3(), rng), random_poly_one_form(box3(), rng));
  auto bd = boundary(c);
  CHECK(integrate_scalar(w, bd, kQ) == -integrate_scalar(w, bd.negated(), kQ));
}

TEST_CASE("interior product") {
  auto chart = ModelChart::box({0, 0}, {1, 1}, "plane");
  auto area = scalar_form(chart, 2, {{3u, [](const Point&) { return 1.0; }}});
  // i_V (dx^dy) = V^x dy - V^y dx.
  auto iv = interior([](const Point& x) { return pt({-x(1), x(0)}); }, area);
  const Point x = pt({0.3, 0.5});
  CHECK(re(iv.component(bit(0), x)) == doctest::Approx(-0.3));
  CHECK(re(iv.component(bit(1), x)) == doctest::Approx(-0.5));
}

TEST_CASE("polynomial of forms") {
  auto t2 = ModelChart::torus(2);
  const Complex i{0.0, 1.0};
  Mat h(2, 2);
  h << i, 0.0, 0.0, -i;
  AlgebraElement H(GroupId::su(2), h);
  auto a = algebra_form(t2, 1, {{bit(0), [](const Point&) { return 1.0; }, H}});
  auto b = algebra_form(t2, 1, {{bit(1), [](const Point&) { return 1.0; }, H}});
  auto p = wedge(a, b, WedgeMode::PolynomialSlot);
  // p(H,H) = tr(H^2)/(8 pi^2) = -1/(4 pi^2).
  CHECK(std::abs(p.component(3u, pt({0.1, 0.1})) (0, 0) - Complex(-1.0 / (4 * kPi * kPi), 0.0)) < 1e-15);
  CHECK_THROWS_AS(polynomial_form(InvariantPolynomial::standard(3), {a, b}), Error);
}

TEST_CASE("identification checks") {
  auto t2 = ModelChart::torus(2);
  auto periodic = scalar_form(t2, 1, {{bit(1), [](const Point& x) { return std::sin(2 * kPi * x(0)); }}});
  auto aperiodic = scalar_form(t2, 1, {{bit(1), [](const Point& x) { return x(0); }}});
  CHECK(identification_defect(periodic) < 1e-10);
  CHECK(identification_defect(aperiodic) > 0.5);

  auto p2 = ModelChart::polygon(2);
  CHECK(p2.same_point(p2.polygon_vertex(0), p2.polygon_vertex(5)));
  // A rotation-invariant radial 1-form vanishing near the rim passes; dx alone does not.
  auto dxf = scalar_form(p2, 1, {{bit(0), [](const Point&) { return 1.0; }}});
  CHECK(identification_defect(dxf) > 0.1);
  auto bump = scalar_form(p2, 0, {{0u, [](const Point& x) { return x.squaredNorm(); }}});
  CHECK(identification_defect(bump) < 1e-10);
  auto s3 = ModelChart::cube_s3();
  CHECK(s3.same_point(pt({0.0, 0.3, 0.5}), pt({0.2, 1.0, 0.9})));
  CHECK_FALSE(s3.same_point(pt({0.5, 0.3, 0.5}), pt({0.2, 1.0, 0.9})));
}

TEST_CASE("built-in cycles") {
  for (const auto& name : builtin_chain_names()) {
    auto c = builtin_chain(name);
    CHECK_NOTHROW(validate_immersion(c, kQ));
    if (c.dim() == 1) CHECK(is_cycle(c));
  }
  CHECK_THROWS_AS(builtin_chain("torus2.z_cycle"), Error);
  CHECK_THROWS_AS(builtin_chain("polygon(2).a_3"), Error);
  // The polygon fan triangulation covers the polygon's area.
  auto p3 = builtin_chain("polygon(3).fundamental", 3);
  auto area = scalar_form(p3.chart, 2, {{3u, [](const Point&) { return 1.0; }}});
  const double n = 12.0;
  CHECK(std::abs(integrate_scalar(area, p3, kQ).real() - 0.5 * n * std::sin(2 * kPi / n)) < 1e-12);
  // Open path is not a cycle.
  auto plane = ModelChart::box({0, 0}, {1, 1}, "plane");
  CHECK_FALSE(is_cycle(Chain{plane, {affine_cell(pt({0, 0}), {pt({0.5, 0})})}}));
}

TEST_CASE("fiber integration") {
  auto base = ModelChart::torus(1);
  auto fib = ModelChart::box({0, 0}, {1, 1}, "param");
  auto prod = ModelChart::product(base, fib);
  // w = s0 * x dx ^ ds1 + cos(2 pi x) dx ^ ds0 + x ds0^ds1 (dropped).
  auto w = scalar_form(prod, 2, {{bit(0) | bit(2), [](const Point& p) { return p(1) * p(0); }},
                                 {bit(0) | bit(1), [](const Point& p) { return std::cos(2 * kPi * p(0)); }},
                                 {bit(1) | bit(2), [](const Point& p) { return p(0); }}});
  auto f = fiber_integrate(w, builtin_chain("torus1.x_cycle"), kQ);
  CHECK(f.chart == fib);
  CHECK(f.degree == 1);
  const Point s = pt({0.6, 0.2});
  CHECK(std::abs(re(f.component(bit(1), s)) - 0.3) < 1e-12);
  CHECK(std::abs(re(f.component(bit(0), s))) < 1e-12);
}
