#include <cmath>
#include <numbers>
#include <random>

#include "cs/equivariant.hpp"
#include "cs/errors.hpp"
#include "cs/moduli.hpp"
#include "doctest.h"

using namespace cs;

namespace {

constexpr double kPi = std::numbers::pi;
const QuadratureSpec kQ{};
const GroupId kSU2 = GroupId::su(2);

AlgebraElement su2(int k) { return structure_constants(kSU2).basis[static_cast<std::size_t>(k)]; }

Point pt(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

// Holonomies of the commuting family (u dx + v dy) H around the two cycles.
SurfaceGroupRep torus_rep(double u, double v) {
  return SurfaceGroupRep(1, kSU2, {exp_map(-u * su2(2)), exp_map(-v * su2(2))});
}

TangentCocycle scaled(const TangentCocycle& u, double s) {
  TangentCocycle out{u.rep, {}};
  for (const auto& c : u.components) out.components.push_back(s * c);
  return out;
}

TangentCocycle sum(const TangentCocycle& u, const TangentCocycle& v) {
  TangentCocycle out{u.rep, {}};
  for (std::size_t k = 0; k < u.components.size(); ++k) out.components.push_back(u.components[k] + v.components[k]);
  return out;
}

}  // namespace

TEST_CASE("relator residual") {
  CHECK(relator_residual(SurfaceGroupRep::trivial(2, kSU2)) == 0.0);
  CHECK(relator_residual(torus_rep(0.7, -1.9)) < 1e-14);

  // For X = i sigma-type basis elements X^2 = -I, so exp(tX) = cos t + sin t X.
  const Mat id = Mat::Identity(2, 2);
  const Mat a = std::cos(0.3) * id + std::sin(0.3) * su2(0).matrix();
  const Mat b = std::cos(0.4) * id + std::sin(0.4) * su2(1).matrix();
  const double expect = (a * b * a.adjoint() * b.adjoint() - id).norm();
  SurfaceGroupRep rho(1, kSU2, {exp_map(0.3 * su2(0)), exp_map(0.4 * su2(1))});
  CHECK(expect > 0.1);
  CHECK(relator_residual(rho) == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(SurfaceGroupRep(2, kSU2, {GroupElement::identity(kSU2)}), Error);
}

TEST_CASE("relator gradient matches finite differences") {
  for (int genus : {1, 2, 3}) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto rho = SurfaceGroupRep::random(genus, kSU2, 77 + seed);
      const auto g = relator_gradient(rho);
      const auto fd = relator_gradient_fd(rho);
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        num += (g[i] - fd[i]) * (g[i] - fd[i]);
        den += g[i] * g[i];
      }
      CHECK(std::sqrt(num / den) < 1e-5);
    }
  }
}

TEST_CASE("flat search") {
  SUBCASE("already flat seeds are returned unchanged") {
    auto rho = torus_rep(0.2, 0.5);
    auto res = search_flat(rho);
    CHECK(res.converged);
    CHECK(res.iterations == 0);
    CHECK((res.rep.a(0).matrix() - rho.a(0).matrix()).norm() == 0.0);
  }
  SUBCASE("success rates") {
    for (int genus : {1, 2}) {
      int ok = 0;
      for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto seed_rep = SurfaceGroupRep::random(genus, kSU2, seed);
        auto res = search_flat(seed_rep);
        CHECK(res.residual <= relator_residual(seed_rep));
        ok += res.converged && relator_residual(res.rep) < 1e-8;
      }
      CHECK(ok >= (genus == 1 ? 95 : 90));
    }
  }
  SUBCASE("deterministic") {
    auto a = search_flat(SurfaceGroupRep::random(2, kSU2, 5));
    auto b = search_flat(SurfaceGroupRep::random(2, kSU2, 5));
    CHECK(a.iterations == b.iterations);
    CHECK(a.residual == b.residual);
  }
  SUBCASE("iteration budget") {
    FlatSearchOptions opt;
    opt.max_iters = 1;
    try {
      find_flat(SurfaceGroupRep::random(2, kSU2, 9), opt);
      FAIL("expected NoConvergence");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NoConvergence);
    }
  }
}

TEST_CASE("tangent cocycles") {
  SUBCASE("trivial representation") {
    auto cs = tangent_cocycles(SurfaceGroupRep::trivial(1, kSU2));
    CHECK(cs.cocycle_dim == 6);
    CHECK(cs.coboundary_dim == 0);
    CHECK(cs.basis.size() == 6);
  }
  SUBCASE("generic commuting pair") {
    auto rho = torus_rep(0.4, 1.1);
    auto cs = tangent_cocycles(rho);
    CHECK(cs.cocycle_dim == 4);
    CHECK(cs.coboundary_dim == 2);
    REQUIRE(cs.basis.size() == 2);
    for (const auto& u : cs.basis) {
      for (double r : linearized_relator(u)) CHECK(std::abs(r) < 1e-8);
      for (int b = 0; b < 3; ++b) CHECK(std::abs(coordinate_pairing(u, coboundary(rho, su2(b)))) < 1e-10);
    }
  }
  SUBCASE("genus two irreducible") {
    auto rho = find_flat(SurfaceGroupRep::random(2, kSU2, 3));
    auto cs = tangent_cocycles(rho);
    CHECK(cs.coboundary_dim == 3);
    CHECK(cs.basis.size() == 6);
    // The pairing is nondegenerate on the quotient.
    Eigen::MatrixXd w(6, 6);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 6; ++j) w(i, j) = atiyah_bott_form(cs.basis[static_cast<std::size_t>(i)], cs.basis[static_cast<std::size_t>(j)]);
    }
    CHECK((w + w.transpose()).norm() < 1e-12);
    CHECK(std::abs(w.determinant()) > 1e-14);
  }
  SUBCASE("needs a flat representation") {
    try {
      tangent_cocycles(SurfaceGroupRep::random(1, kSU2, 4));
      FAIL("expected NotFlat");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotFlat);
    }
  }
}

TEST_CASE("Atiyah-Bott form") {
  const double expect = -1.0 / (2 * kPi * kPi);
  auto fam = commuting_family(2, su2(2), su2(0), 0.0);
  const Point s = pt({0.3, -0.2});

  SUBCASE("direct quadrature on the torus family") {
    CHECK(std::abs(atiyah_bott_form(fam, s, {1, 0}, {0, 1}, kQ) - expect) < 1e-9);
    CHECK(std::abs(atiyah_bott_form(fam, s, {0, 1}, {1, 0}, kQ) + expect) < 1e-9);
    CHECK(std::abs(atiyah_bott_form(fam, s, {1, 0}, {1, 0}, kQ)) < 1e-12);
  }
  SUBCASE("cup product agrees with the direct value") {
    // d/du exp(-u H) = exp(-u H)(-H): the right-trivialized tangent is -H on a.
    auto rho = torus_rep(0.3, -0.2);
    const auto zero = AlgebraElement::zero(kSU2);
    TangentCocycle du{rho, {-1.0 * su2(2), zero}};
    TangentCocycle dv{rho, {zero, -1.0 * su2(2)}};
    CHECK(std::abs(atiyah_bott_form(du, dv) - expect) < 1e-12);
    CHECK(atiyah_bott_form(du, du) == 0.0);
    CHECK(atiyah_bott_form(scaled(du, 2.0), dv) == doctest::Approx(2.0 * atiyah_bott_form(du, dv)).epsilon(1e-14));
  }
  SUBCASE("bilinear, antisymmetric and conjugation invariant") {
    auto rho = find_flat(SurfaceGroupRep::random(2, kSU2, 12));
    auto cs = tangent_cocycles(rho);
    REQUIRE(cs.basis.size() == 6);
    const auto& u = cs.basis[0];
    const auto& v = cs.basis[1];
    const auto& w = cs.basis[2];
    CHECK(std::abs(atiyah_bott_form(u, v) + atiyah_bott_form(v, u)) < 1e-12);
    CHECK(std::abs(atiyah_bott_form(sum(u, w), v) - atiyah_bott_form(u, v) - atiyah_bott_form(w, v)) < 1e-12);
    std::mt19937_64 rng(8);
    const auto g = random_group(kSU2, rng);
    CHECK(relator_residual(rho.conjugated(g)) < 1e-8);
    CHECK(std::abs(atiyah_bott_form(conjugated(u, g), conjugated(v, g)) - atiyah_bott_form(u, v)) < 1e-10);
    for (std::size_t k = 0; k < 3; ++k) {
      const auto tr0 = trace_coordinates(rho)[k];
      CHECK(std::abs(trace_coordinates(rho.conjugated(g))[k] - tr0) < 1e-12);
    }
    try {
      atiyah_bott_form(u, conjugated(v, g));
      FAIL("expected PointMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::PointMismatch);
    }
  }
  SUBCASE("equivariant (2,2) component") {
    // Same magnitude as the direct value; the orientation of the product
    // bigrading gives the opposite sign.
    const double pair = family_pairing_22(fam, builtin_chain("torus2.fundamental"), s, {1, 0}, {0, 1}, kQ);
    CHECK(std::abs(std::abs(pair) - std::abs(expect)) < 1e-9);
    CHECK(std::abs(pair + expect) < 1e-9);
  }
}

TEST_CASE("moment map") {
  const auto p2 = InvariantPolynomial::standard(2);
  auto fund = builtin_chain("torus2.fundamental");
  const Mat h = su2(2).matrix();
  auto flat = commuting_family(2, su2(2), su2(0), 0.0);
  std::mt19937_64 rng(21);

  CHECK(moment_map(p2, flat, fund, [](const Point&) { return Mat(Mat::Zero(2, 2)); }, pt({0.2, 0.4}), kQ) == 0.0);
  for (int k = 0; k < 10; ++k) {
    const Mat x = random_algebra(kSU2, rng).matrix();
    const Point s = pt({std::uniform_real_distribution<double>(-1, 1)(rng), std::uniform_real_distribution<double>(-1, 1)(rng)});
    CHECK(std::abs(moment_map(p2, flat, fund, [x](const Point&) { return x; }, s, kQ)) < 1e-9);
  }

  auto curved = make_family(ModelChart::torus(2), ModelChart::box({-1.0}, {1.0}, "s"), kSU2, [h](const Point& x, const Point& s) {
    return std::vector<Mat>{Mat::Zero(2, 2), s(0) * std::sin(2 * kPi * x(0)) * h};
  });
  auto xfield = [h](const Point& x) { return Mat(std::cos(2 * kPi * x(0)) * h); };
  for (double s : {0.5, -0.8}) {
    // Independent oracle: F = 2 pi s cos(2 pi x) dx^dy H, so -2 p(X, F) integrates by
    // the midpoint rule to -2 (1/8 pi^2) tr(H^2) 2 pi s <cos^2>.
    double mid = 0.0;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      mid += std::cos(2 * kPi * x) * 2 * kPi * s * std::cos(2 * kPi * x) / n;
    }
    const double oracle = -2.0 * (h * h).trace().real() / (8 * kPi * kPi) * mid;
    const double mu = moment_map(p2, curved, fund, xfield, pt({s}), kQ);
    CHECK(std::abs(mu) > 1e-2);
    CHECK(std::abs(mu - oracle) < 1e-6);
    CHECK(std::abs(mu - s / (2 * kPi)) < 1e-6);
  }

  try {
    moment_map(p2, flat, builtin_chain("torus2.x_cycle"), xfield, pt({0.1, 0.1}), kQ);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}
