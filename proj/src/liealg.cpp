#include "cs/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "cs/errors.hpp"

namespace cs {

namespace {

constexpr double kAlgebraTol = 1e-12;
constexpr double kGroupTol = 1e-10;

// Validation scale: relative for large matrices, absolute near zero.
double scaled(double tol, const Mat& m) { return tol * std::max(1.0, m.norm()); }

}  // namespace

GroupId GroupId::su(int n) {
  if (n < 2 || n > 4) throw Error(ErrorKind::InvalidArgument, "SU(n) supported for 2 <= n <= 4");
  return {GroupKind::SU, n};
}

std::string GroupId::name() const {
  return kind == GroupKind::U1 ? std::string("U1") : "SU" + std::to_string(n);
}

GroupId parse_group(const std::string& name) {
  if (name == "U1") return GroupId::u1();
  if (name.size() == 3 && name.starts_with("SU") && name[2] >= '2' && name[2] <= '4') {
    return GroupId::su(name[2] - '0');
  }
  throw Error(ErrorKind::InvalidArgument, "unknown group '" + name + "'");
}

Mat identity(const GroupId& g) { return Mat::Identity(g.matrix_size(), g.matrix_size()); }
Mat zero_matrix(const GroupId& g) { return Mat::Zero(g.matrix_size(), g.matrix_size()); }

Mat project_to_algebra(const GroupId& g, const Mat& m) {
  Mat a = 0.5 * (m - m.adjoint());
  if (g.kind == GroupKind::SU) {
    const Complex tr = a.trace() / static_cast<double>(g.n);
    a.diagonal().array() -= tr;
  }
  return a;
}

AlgebraElement::AlgebraElement(GroupId group, Mat m) : group_(group), m_(std::move(m)) {
  const int n = group_.matrix_size();
  if (m_.rows() != n || m_.cols() != n) {
    throw Error(ErrorKind::InvalidArgument, "algebra matrix has wrong size for " + group_.name());
  }
  if ((m_ + m_.adjoint()).norm() > scaled(kAlgebraTol, m_)) {
    throw Error(ErrorKind::InvalidArgument, "algebra element is not anti-Hermitian");
  }
  if (group_.kind == GroupKind::SU && std::abs(m_.trace()) > scaled(kAlgebraTol, m_)) {
    throw Error(ErrorKind::InvalidArgument, "su(n) element is not traceless");
  }
}

AlgebraElement AlgebraElement::zero(const GroupId& g) { return {g, zero_matrix(g), Unchecked{}}; }

AlgebraElement AlgebraElement::projected(const GroupId& g, const Mat& m) {
  return {g, project_to_algebra(g, m), Unchecked{}};
}

AlgebraElement AlgebraElement::operator+(const AlgebraElement& o) const {
  return {group_, m_ + o.m_, Unchecked{}};
}
AlgebraElement AlgebraElement::operator-(const AlgebraElement& o) const {
  return {group_, m_ - o.m_, Unchecked{}};
}
AlgebraElement AlgebraElement::operator-() const { return {group_, -m_, Unchecked{}}; }
AlgebraElement AlgebraElement::operator*(double s) const { return {group_, s * m_, Unchecked{}}; }

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  return AlgebraElement::projected(a.group(), a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

GroupElement::GroupElement(GroupId group, Mat m) : group_(group), m_(std::move(m)) {
  const int n = group_.matrix_size();
  if (m_.rows() != n || m_.cols() != n) {
    throw Error(ErrorKind::InvalidArgument, "group matrix has wrong size for " + group_.name());
  }
  if ((m_.adjoint() * m_ - Mat::Identity(n, n)).norm() > kGroupTol) {
    throw Error(ErrorKind::InvalidArgument, "group element is not unitary");
  }
  if (group_.kind == GroupKind::SU && std::abs(m_.determinant() - 1.0) > kGroupTol) {
    throw Error(ErrorKind::InvalidArgument, "SU(n) element does not have unit determinant");
  }
}

GroupElement GroupElement::identity(const GroupId& g) { return {g, cs::identity(g)}; }

GroupElement GroupElement::inverse() const { return {group_, m_.adjoint()}; }

GroupElement GroupElement::operator*(const GroupElement& o) const { return {group_, m_ * o.m_}; }

InvariantPolynomial InvariantPolynomial::standard(int degree) {
  using std::numbers::pi;
  const Complex i_over_2pi{0.0, 1.0 / (2.0 * pi)};
  switch (degree) {
    case 1: return {1, i_over_2pi};
    case 2: return {2, Complex(1.0 / (8.0 * pi * pi), 0.0)};
    case 3: return {3, i_over_2pi * i_over_2pi * i_over_2pi / 6.0};
    default: break;
  }
  if (degree < 1) throw Error(ErrorKind::InvalidArgument, "polynomial degree must be positive");
  // Higher degrees follow the Chern-character pattern (i/2pi)^r / r!.
  Complex n{1.0, 0.0};
  for (int k = 1; k <= degree; ++k) n *= i_over_2pi / static_cast<double>(k);
  return {degree, n};
}

Complex symmetrized_trace(Complex normalization, std::span<const Mat> args) {
  const int r = static_cast<int>(args.size());
  std::vector<int> perm(static_cast<std::size_t>(r));
  std::iota(perm.begin(), perm.end(), 0);
  Complex sum{0.0, 0.0};
  int count = 0;
  do {
    Mat prod = args[static_cast<std::size_t>(perm[0])];
    for (int k = 1; k < r; ++k) prod = prod * args[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
    sum += prod.trace();
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return normalization * sum / static_cast<double>(count);
}

Complex eval_polynomial(const InvariantPolynomial& p, std::span<const AlgebraElement> args) {
  if (static_cast<int>(args.size()) != p.degree) {
    throw Error(ErrorKind::ArityMismatch, "expected " + std::to_string(p.degree) + " arguments, got " +
                                              std::to_string(args.size()));
  }
  std::vector<Mat> mats;
  mats.reserve(args.size());
  for (const auto& a : args) {
    if (!(a.group() == args[0].group())) throw Error(ErrorKind::InvalidArgument, "mixed groups in polynomial");
    mats.push_back(a.matrix());
  }
  return symmetrized_trace(p.normalization, mats);
}

AlgebraElement adjoint_action(const GroupElement& g, const AlgebraElement& x) {
  if (!(g.group() == x.group())) throw Error(ErrorKind::InvalidArgument, "group mismatch in Ad");
  return AlgebraElement::projected(x.group(), g.matrix() * x.matrix() * g.matrix().adjoint());
}

std::vector<double> StructureConstants::coordinates(const Mat& x) const {
  std::vector<double> out;
  out.reserve(basis.size());
  for (const auto& b : basis) {
    const Mat& bm = b.matrix();
    out.push_back((bm.adjoint() * x).trace().real() / (bm.adjoint() * bm).trace().real());
  }
  return out;
}

Mat StructureConstants::from_coordinates(std::span<const double> x) const {
  Mat out = zero_matrix(group);
  for (std::size_t a = 0; a < basis.size(); ++a) out += x[a] * basis[a].matrix();
  return out;
}

StructureConstants structure_constants(const GroupId& g) {
  StructureConstants sc;
  sc.group = g;
  const Complex i{0.0, 1.0};
  if (g.kind == GroupKind::U1) {
    Mat b(1, 1);
    b(0, 0) = i;
    sc.basis.emplace_back(g, b);
  } else {
    const int n = g.n;
    for (int j = 0; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        Mat s = Mat::Zero(n, n);
        s(j, k) = i;
        s(k, j) = i;
        sc.basis.emplace_back(g, s);
        Mat a = Mat::Zero(n, n);
        a(j, k) = 1.0;
        a(k, j) = -1.0;
        sc.basis.emplace_back(g, a);
      }
    }
    for (int l = 1; l < n; ++l) {
      Mat d = Mat::Zero(n, n);
      const double f = std::sqrt(2.0 / (l * (l + 1.0)));
      for (int j = 0; j < l; ++j) d(j, j) = i * f;
      d(l, l) = -i * f * static_cast<double>(l);
      sc.basis.emplace_back(g, d);
    }
  }
  const int m = sc.dim();
  sc.c.assign(static_cast<std::size_t>(m * m * m), 0.0);
  for (int b = 0; b < m; ++b) {
    for (int c = 0; c < m; ++c) {
      const Mat& x = sc.basis[static_cast<std::size_t>(b)].matrix();
      const Mat& y = sc.basis[static_cast<std::size_t>(c)].matrix();
      const auto coords = sc.coordinates(x * y - y * x);
      for (int a = 0; a < m; ++a) sc.c[static_cast<std::size_t>((a * m + b) * m + c)] = coords[static_cast<std::size_t>(a)];
    }
  }
  return sc;
}

Mat expm(const Mat& x) {
  const double norm1 = x.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.25) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.25)));
  const Mat y = x / std::ldexp(1.0, squarings);
  // ||y|| <= 1/4, so 18 Taylor terms are far below double precision.
  Mat term = Mat::Identity(x.rows(), x.cols());
  Mat sum = term;
  for (int k = 1; k <= 18; ++k) {
    term = term * y / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

GroupElement exp_map(const AlgebraElement& x) {
  Mat e = expm(x.matrix());
  return {x.group(), std::move(e)};
}

namespace {

// Denman-Beavers iteration for the principal square root.
Mat sqrtm(const Mat& a) {
  Mat y = a;
  Mat z = Mat::Identity(a.rows(), a.cols());
  for (int it = 0; it < 100; ++it) {
    const Mat yi = y.inverse();
    const Mat zi = z.inverse();
    const Mat y_next = 0.5 * (y + zi);
    z = 0.5 * (z + yi);
    const double delta = (y_next - y).norm();
    y = y_next;
    if (delta < 1e-15 * std::max(1.0, y.norm())) break;
  }
  return y;
}

}  // namespace

AlgebraElement log_map(const GroupElement& g) {
  const Mat& m = g.matrix();
  const int n = static_cast<int>(m.rows());
  Eigen::ComplexEigenSolver<Mat> es(m, false);
  std::vector<double> angles;
  for (int k = 0; k < n; ++k) angles.push_back(std::arg(es.eigenvalues()(k)));

  constexpr double kCut = 1e-8;
  for (double a : angles) {
    if (std::numbers::pi - std::abs(a) < kCut) {
      throw Error(ErrorKind::CutLocus, "eigenvalue at -1; principal logarithm undefined");
    }
  }
  // Smallest singular value of dexp at log g: min over eigen-angle gaps of
  // |sin(d/2)/(d/2)|.
  double smin = 1.0;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const double d = angles[static_cast<std::size_t>(j)] - angles[static_cast<std::size_t>(k)];
      if (std::abs(d) > 1e-12) smin = std::min(smin, std::abs(std::sin(d / 2) / (d / 2)));
    }
  }
  if (smin < kCut) throw Error(ErrorKind::CutLocus, "dexp is singular at this point");
  if (g.group().kind == GroupKind::SU) {
    const double total = std::accumulate(angles.begin(), angles.end(), 0.0);
    if (std::abs(total) > kCut) throw Error(ErrorKind::CutLocus, "principal logarithm is not traceless");
  }

  Mat y = m;
  int roots = 0;
  const Mat id = Mat::Identity(n, n);
  while ((y - id).norm() > 0.05 && roots < 60) {
    y = sqrtm(y);
    ++roots;
  }
  const Mat e = y - id;
  Mat power = e;
  Mat sum = e;
  for (int k = 2; k < 60; ++k) {
    power = power * e;
    const Mat term = power * ((k % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(k));
    sum += term;
    if (term.norm() < 1e-18) break;
  }
  sum *= std::ldexp(1.0, roots);
  return AlgebraElement::projected(g.group(), sum);
}

AlgebraElement random_algebra(const GroupId& g, std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = g.matrix_size();
  Mat z(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) z(r, c) = Complex(normal(rng), normal(rng));
  Mat a = project_to_algebra(g, z);
  if (a.norm() > 0) a *= scale / a.norm();
  return AlgebraElement::projected(g, a);
}

GroupElement random_group(const GroupId& g, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = g.matrix_size();
  Mat z(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) z(r, c) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Mat> qr(z);
  Mat q = qr.householderQ();
  const Mat rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const Complex d = rmat(k, k);
    q.col(k) *= d / std::abs(d);
  }
  if (g.kind == GroupKind::SU) {
    const Complex det = q.determinant();
    q.col(0) /= det;
  }
  return {g, q};
}

}  // namespace cs
