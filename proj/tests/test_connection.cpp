#include <cmath>
#include <numbers>
#include <random>

#include "cs/connection.hpp"
#include "cs/errors.hpp"
#include "doctest.h"

using namespace cs;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I1{0.0, 1.0};
const QuadratureSpec kQ{};

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

AlgebraElement su2(int k) { return structure_constants(GroupId::su(2)).basis[static_cast<std::size_t>(k)]; }
AlgebraElement h_elem() { return su2(2); }  // diag(i, -i)

std::vector<Point> samples(int n, int dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> out;
  for (int k = 0; k < n; ++k) {
    Point p(dim);
    for (int i = 0; i < dim; ++i) p(i) = u(rng);
    out.push_back(p);
  }
  return out;
}

// A periodic non-abelian connection on T^2.
Connection wavy_connection() {
  auto t2 = ModelChart::torus(2);
  return Connection(algebra_form(t2, 1,
                                 {{bit(0), [](const Point& x) { return 0.7 * std::sin(2 * kPi * x(1)); }, su2(0)},
                                  {bit(0), [](const Point& x) { return 0.3; }, su2(2)},
                                  {bit(1), [](const Point& x) { return std::cos(2 * kPi * (x(0) + x(1))); }, su2(1)},
                                  {bit(1), [](const Point& x) { return 0.4 * std::sin(2 * kPi * x(0)); }, su2(2)}}));
}

// A periodic SU(2)-valued map on T^2 (derivatives by finite differences).
GaugeTransformation wavy_gauge(double phase) {
  auto t2 = ModelChart::torus(2);
  const Mat x = su2(0).matrix(), y = su2(1).matrix(), z = su2(2).matrix();
  return GaugeTransformation::from_map(t2, GroupId::su(2), [=](const Point& p) {
    return expm(std::sin(2 * kPi * p(0) + phase) * x + 0.7 * std::cos(2 * kPi * p(1)) * y +
                0.4 * std::sin(2 * kPi * (p(0) + p(1))) * z);
  });
}

double max_component_diff(const FormField& a, const FormField& b, const std::vector<Point>& xs) {
  double worst = 0.0;
  std::vector<Mask> masks = a.masks;
  masks.insert(masks.end(), b.masks.begin(), b.masks.end());
  for (const auto& x : xs) {
    for (Mask m : masks) worst = std::max(worst, (a.component(m, x) - b.component(m, x)).norm());
  }
  return worst;
}

Chain square_loop(const ModelChart& chart, double x0, double y0, double side) {
  Chain c{chart, {}};
  c.cells.push_back(affine_cell(pt({x0, y0}), {pt({side, 0})}));
  c.cells.push_back(affine_cell(pt({x0 + side, y0}), {pt({0, side})}));
  c.cells.push_back(affine_cell(pt({x0 + side, y0 + side}), {pt({-side, 0})}));
  c.cells.push_back(affine_cell(pt({x0, y0 + side}), {pt({0, -side})}));
  return c;
}

}  // namespace

TEST_CASE("curvature examples") {
  auto t2 = ModelChart::torus(2);
  auto f0 = curvature(zero_connection(t2, GroupId::su(2)), kQ);
  for (const auto& x : samples(10, 2, 1)) CHECK(f0.component(3u, x).norm() == 0.0);
  auto fc = curvature(constant_connection(t2, {0.3, -1.2}, h_elem()), kQ);
  for (const auto& x : samples(10, 2, 1)) CHECK(fc.component(3u, x).norm() < 1e-9);
  Connection s(algebra_form(t2, 1, {{bit(1), [](const Point& x) { return std::sin(2 * kPi * x(0)); }, h_elem()}}));
  auto fs = curvature(s, kQ);
  for (const auto& x : samples(20, 2, 2)) {
    const Mat expect = 2 * kPi * std::cos(2 * kPi * x(0)) * h_elem().matrix();
    CHECK((fs.component(3u, x) - expect).norm() < 1e-7);
  }
}

TEST_CASE("gauge transformations") {
  auto t2 = ModelChart::torus(2);
  std::mt19937_64 rng(3);
  auto a = wavy_connection();
  const auto xs = samples(50, 2, 4);

  SUBCASE("constant gauge is the adjoint action") {
    auto g = random_group(GroupId::su(2), rng);
    auto ag = gauge_transform(a, GaugeTransformation::constant(t2, g), kQ);
    for (const auto& x : xs) {
      for (Mask m : a.form.masks) {
        const Mat expect = g.matrix().adjoint() * a.form.component(m, x) * g.matrix();
        CHECK((ag.form.component(m, x) - expect).norm() < 1e-14);
      }
    }
  }
  SUBCASE("pure gauge is flat") {
    auto pg = gauge_transform(zero_connection(t2, GroupId::su(2)), wavy_gauge(0.3), kQ);
    auto f = curvature(pg, kQ);
    double worst = 0.0;
    for (const auto& x : xs) worst = std::max(worst, f.component(3u, x).norm());
    CHECK(worst < 1e-6);
  }
  SUBCASE("composition") {
    auto phi = wavy_gauge(0.1), psi = wavy_gauge(1.7);
    auto lhs = gauge_transform(gauge_transform(a, phi, kQ), psi, kQ);
    auto rhs = gauge_transform(a, compose(phi, psi), kQ);
    CHECK(max_component_diff(lhs.form, rhs.form, xs) < 1e-8);
  }
  SUBCASE("curvature covariance") {
    auto phi = wavy_gauge(0.5);
    auto lhs = curvature(gauge_transform(a, phi, kQ), kQ);
    auto f = curvature(a, kQ);
    double worst = 0.0;
    for (const auto& x : samples(100, 2, 5)) {
      const Mat g = phi.g(x);
      worst = std::max(worst, (lhs.component(3u, x) - g.adjoint() * f.component(3u, x) * g).norm());
    }
    CHECK(worst < 1e-6);
  }
  SUBCASE("chart mismatch") {
    CHECK_THROWS_AS(gauge_transform(a, GaugeTransformation::constant(ModelChart::torus(3), GroupElement::identity(GroupId::su(2))), kQ), Error);
  }
}

TEST_CASE("holonomy") {
  auto t1 = ModelChart::torus(1);
  auto loop = builtin_chain("torus1.x_cycle");
  CHECK((holonomy(zero_connection(t1, GroupId::su(2)), loop, 10).matrix() - identity(GroupId::su(2))).norm() == 0.0);
  const double theta = 1.3;
  auto a = constant_connection(t1, {theta}, h_elem());
  const Mat expect = expm(-theta * h_elem().matrix());
  CHECK((holonomy(a, loop, 2000).matrix() - expect).norm() < 1e-8);
  CHECK((holonomy(a, loop.negated(), 2000).matrix() - expect.adjoint()).norm() < 1e-8);

  auto t2 = ModelChart::torus(2);
  auto pg = gauge_transform(zero_connection(t2, GroupId::su(2)), wavy_gauge(0.2), kQ);
  auto sq = square_loop(t2, 0.2, 0.3, 0.4);
  CHECK((holonomy(pg, sq, 1000).matrix() - identity(GroupId::su(2))).norm() < 1e-6);

  // Open path.
  Chain open{t2, {affine_cell(pt({0.1, 0.1}), {pt({0.5, 0.0})})}};
  try {
    holonomy(pg, open, 10);
    FAIL("expected OpenLoop");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OpenLoop);
  }
}

TEST_CASE("holonomy gauge covariance and convergence") {
  auto t2 = ModelChart::torus(2);
  auto a = wavy_connection();
  auto phi = wavy_gauge(0.9);
  // Diagonal loop so that the integrand does not commute along the path.
  Chain shifted{t2, {affine_cell(pt({0.0, 0.35}), {pt({1.0, 1.0})})}};
  const Mat g0 = phi.g(pt({0.0, 0.35}));
  const Mat lhs = holonomy(gauge_transform(a, phi, kQ), shifted, 8000).matrix();
  const Mat rhs = g0.adjoint() * holonomy(a, shifted, 8000).matrix() * g0;
  CHECK((lhs - rhs).norm() < 1e-6);

  auto diag = [&](int n) {
    return (holonomy(a, shifted, n).matrix() - holonomy(a, shifted, 2 * n).matrix()).norm();
  };
  CHECK(diag(500) / diag(1000) >= 3.0);
}

TEST_CASE("curvature coordinates") {
  auto t2 = ModelChart::torus(2);
  ConnectionCoordinates zero;
  zero.basis = structure_constants(GroupId::su(2));
  zero.dim = 2;
  zero.a.assign(6, 0.0);
  zero.da.assign(12, 0.0);
  for (auto& f : curvature_components(zero)) CHECK(f.norm() == 0.0);

  ConnectionCoordinates ab;
  ab.basis = structure_constants(GroupId::u1());
  ab.dim = 2;
  ab.a = {0.5, -0.25};
  ab.da = {0.0, 2.0, -3.0, 0.0};  // d_1 A_0 = 2, d_0 A_1 = -3
  auto f = curvature_components(ab);
  CHECK(f[0](0, 1) == doctest::Approx(-5.0));
  CHECK(f[0](1, 0) == doctest::Approx(5.0));

  Connection s(algebra_form(t2, 1, {{bit(1), [](const Point& x) { return std::sin(2 * kPi * x(0)); }, h_elem()}}));
  const Point x = pt({0.2, 0.6});
  auto comps = curvature_components(sample_coordinates(s, x, kQ));
  auto sc = structure_constants(GroupId::su(2));
  auto fx = sc.coordinates(curvature(s, kQ).component(3u, x));
  for (int alpha = 0; alpha < 3; ++alpha) CHECK(std::abs(comps[alpha](0, 1) - fx[alpha]) < 1e-7);

  // Non-abelian cross-check pins kappa = 1/2.
  auto a = wavy_connection();
  for (const auto& p : samples(10, 2, 8)) {
    auto c = curvature_components(sample_coordinates(a, p, kQ));
    auto ref = sc.coordinates(curvature(a, kQ).component(3u, p));
    for (int alpha = 0; alpha < 3; ++alpha) CHECK(std::abs(c[alpha](0, 1) - ref[alpha]) < 1e-7);
  }
}

TEST_CASE("connection families") {
  auto t2 = ModelChart::torus(2);
  auto params = ModelChart::box({0.0}, {1.0}, "s");
  const Mat h = h_elem().matrix();
  auto fam = make_family(t2, params, GroupId::su(2), [h](const Point& x, const Point& s) {
    return std::vector<Mat>{Mat::Zero(2, 2), s(0) * std::sin(2 * kPi * x(0)) * h};
  });
  auto a = fam.at(pt({0.5}));
  CHECK((a.form.component(bit(1), pt({0.25, 0.1})) - 0.5 * h).norm() < 1e-14);
  CHECK_THROWS_AS(fam.at(pt({0.1, 0.2})), Error);
}
