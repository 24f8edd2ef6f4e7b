#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "cs/errors.hpp"
#include "cs/liealg.hpp"
#include "doctest.h"

using namespace cs;

namespace {

constexpr double kPi = std::numbers::pi;
const Complex I1{0.0, 1.0};

Mat pauli_x() {
  Mat m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}
Mat pauli_y() {
  Mat m(2, 2);
  m << 0.0, -I1, I1, 0.0;
  return m;
}
Mat pauli_z() {
  Mat m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

// Rodrigues: exp(i t n.sigma) = cos t + i sin t n.sigma.
Mat rodrigues(double t, double nx, double ny, double nz) {
  Mat ns = nx * pauli_x() + ny * pauli_y() + nz * pauli_z();
  return std::cos(t) * Mat::Identity(2, 2) + I1 * std::sin(t) * ns;
}

}  // namespace

TEST_CASE("exp matches Rodrigues formula on su(2)") {
  const double n = std::sqrt(1.0 + 4.0 + 9.0);
  for (double t : {0.1, 1.0, 2.5, 3.0}) {
    Mat x = I1 * t * (pauli_x() + 2.0 * pauli_y() + 3.0 * pauli_z()) / n;
    auto g = exp_map(AlgebraElement(GroupId::su(2), x));
    CHECK((g.matrix() - rodrigues(t, 1.0 / n, 2.0 / n, 3.0 / n)).norm() < 1e-13);
  }
}

TEST_CASE("expm agrees with Eigen's Pade exponential") {
  std::mt19937_64 rng(7);
  for (int n : {2, 3, 4}) {
    for (int k = 0; k < 5; ++k) {
      auto x = random_algebra(GroupId::su(n), rng, 2.0);
      Eigen::MatrixXcd dense = x.matrix();
      Eigen::MatrixXcd ref = dense.exp();
      CHECK((Eigen::MatrixXcd(expm(x.matrix())) - ref).norm() < 1e-12);
    }
  }
}

TEST_CASE("log inverts exp inside the injectivity radius") {
  std::mt19937_64 rng(11);
  for (int n : {2, 3}) {
    for (int k = 0; k < 10; ++k) {
      auto x = random_algebra(GroupId::su(n), rng, 0.5);
      auto back = log_map(exp_map(x));
      CHECK((back.matrix() - x.matrix()).norm() < 1e-10);
    }
  }
  auto u = AlgebraElement(GroupId::u1(), Mat::Constant(1, 1, I1 * 2.0));
  CHECK(std::abs(log_map(exp_map(u)).matrix()(0, 0) - I1 * 2.0) < 1e-12);
}

TEST_CASE("log at -I is a cut-locus error") {
  Mat m = -Mat::Identity(2, 2);
  GroupElement g(GroupId::su(2), m);
  try {
    log_map(g);
    FAIL("expected CutLocus");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CutLocus);
  }
}

TEST_CASE("validation rejects non-algebra and non-group matrices") {
  Mat herm = pauli_x();
  CHECK_THROWS_AS(AlgebraElement(GroupId::su(2), herm), Error);
  Mat scaled = 2.0 * Mat::Identity(2, 2);
  CHECK_THROWS_AS(GroupElement(GroupId::su(2), scaled), Error);
  CHECK_THROWS_AS(parse_group("SO3"), Error);
  CHECK(parse_group("SU3") == GroupId::su(3));
}

TEST_CASE("quadratic polynomial value on diag(i,-i)") {
  auto p = InvariantPolynomial::standard(2);
  AlgebraElement h(GroupId::su(2), I1 * pauli_z());
  std::vector<AlgebraElement> args{h, h};
  // tr(H^2) = -2, times 1/(8 pi^2).
  CHECK(std::abs(eval_polynomial(p, args) - Complex(-1.0 / (4.0 * kPi * kPi), 0.0)) < 1e-15);
  std::vector<AlgebraElement> one{h};
  CHECK_THROWS_AS(eval_polynomial(p, one), Error);
}

TEST_CASE("polynomial is Ad-invariant and symmetric") {
  std::mt19937_64 rng(3);
  for (int r : {1, 2, 3}) {
    auto p = InvariantPolynomial::standard(r);
    auto grp = GroupId::su(3);
    std::vector<AlgebraElement> xs;
    for (int i = 0; i < r; ++i) xs.push_back(random_algebra(grp, rng));
    auto g = random_group(grp, rng);
    std::vector<AlgebraElement> ys;
    for (auto& x : xs) ys.push_back(adjoint_action(g, x));
    CHECK(std::abs(eval_polynomial(p, xs) - eval_polynomial(p, ys)) < 1e-12);
    std::vector<AlgebraElement> rev(xs.rbegin(), xs.rend());
    CHECK(std::abs(eval_polynomial(p, xs) - eval_polynomial(p, rev)) < 1e-12);
  }
}

TEST_CASE("structure constants reproduce brackets and are antisymmetric") {
  for (auto g : {GroupId::su(2), GroupId::su(3), GroupId::u1()}) {
    auto sc = structure_constants(g);
    REQUIRE(sc.dim() == g.algebra_dim());
    for (int b = 0; b < sc.dim(); ++b) {
      for (int c = 0; c < sc.dim(); ++c) {
        Mat br = bracket(sc.basis[b], sc.basis[c]).matrix();
        std::vector<double> coeff(sc.dim());
        for (int a = 0; a < sc.dim(); ++a) coeff[a] = sc(a, b, c);
        CHECK((sc.from_coordinates(coeff) - br).norm() < 1e-12);
        for (int a = 0; a < sc.dim(); ++a) CHECK(std::abs(sc(a, b, c) + sc(a, c, b)) < 1e-12);
      }
    }
  }
  // su(2) with basis i*sigma: [i s_x, i s_y] = -2 i s_z.
  auto sc = structure_constants(GroupId::su(2));
  auto coords = sc.coordinates(I1 * pauli_z());
  CHECK(std::abs(coords[2] - 1.0) + std::abs(coords[0]) + std::abs(coords[1]) < 1e-12);
  CHECK(std::abs(sc(2, 0, 1) + 2.0) < 1e-12);
}

TEST_CASE("Haar samples are in the group") {
  std::mt19937_64 rng(5);
  for (int n : {2, 3, 4}) {
    for (int k = 0; k < 5; ++k) {
      auto g = random_group(GroupId::su(n), rng);
      CHECK(std::abs(g.matrix().determinant() - Complex(1.0, 0.0)) < 1e-12);
    }
  }
}
