#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cs {

using Complex = std::complex<double>;

// All matrix groups handled here are at most 4x4, so the storage never hits
// the heap.
using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::AutoAlign, 4, 4>;

enum class GroupKind { U1, SU };

struct GroupId {
  GroupKind kind = GroupKind::SU;
  int n = 2;

  static GroupId u1() { return {GroupKind::U1, 1}; }
  static GroupId su(int n);

  int matrix_size() const { return kind == GroupKind::U1 ? 1 : n; }
  int algebra_dim() const { return kind == GroupKind::U1 ? 1 : n * n - 1; }
  std::string name() const;

  friend bool operator==(const GroupId&, const GroupId&) = default;
};

// Parses "U1", "SU2", "SU3", "SU4".
GroupId parse_group(const std::string& name);

Mat identity(const GroupId& g);
Mat zero_matrix(const GroupId& g);

// Anti-Hermitian (and for SU traceless) part of an arbitrary matrix.
Mat project_to_algebra(const GroupId& g, const Mat& m);

class AlgebraElement {
 public:
  AlgebraElement(GroupId group, Mat m);  // validates within 1e-12

  static AlgebraElement zero(const GroupId& g);
  // Skips validation but projects onto the algebra; for noisy numerical input.
  static AlgebraElement projected(const GroupId& g, const Mat& m);

  const GroupId& group() const { return group_; }
  const Mat& matrix() const { return m_; }
  double norm() const { return m_.norm(); }

  AlgebraElement operator+(const AlgebraElement& o) const;
  AlgebraElement operator-(const AlgebraElement& o) const;
  AlgebraElement operator-() const;
  AlgebraElement operator*(double s) const;

 private:
  struct Unchecked {};
  AlgebraElement(GroupId group, Mat m, Unchecked) : group_(group), m_(std::move(m)) {}

  GroupId group_;
  Mat m_;
};

inline AlgebraElement operator*(double s, const AlgebraElement& x) { return x * s; }

AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b);

class GroupElement {
 public:
  GroupElement(GroupId group, Mat m);  // validates unitarity (1e-10) and det (SU)

  static GroupElement identity(const GroupId& g);

  const GroupId& group() const { return group_; }
  const Mat& matrix() const { return m_; }
  GroupElement inverse() const;
  GroupElement operator*(const GroupElement& o) const;

 private:
  GroupId group_;
  Mat m_;
};

struct InvariantPolynomial {
  int degree = 2;
  Complex normalization{1.0, 0.0};

  // Chern-type defaults: r=1 (i/2pi) tr, r=2 1/(8 pi^2) tr, r=3 (i/2pi)^3/3! tr.
  static InvariantPolynomial standard(int degree);
};

// p(X_1..X_r) = N_r * (1/r!) sum over permutations of tr(X_s1 ... X_sr).
Complex eval_polynomial(const InvariantPolynomial& p, std::span<const AlgebraElement> args);

// Raw-matrix form of the symmetrized trace, shared with the form calculus.
Complex symmetrized_trace(Complex normalization, std::span<const Mat> args);

AlgebraElement adjoint_action(const GroupElement& g, const AlgebraElement& x);

struct StructureConstants {
  GroupId group;
  std::vector<AlgebraElement> basis;
  std::vector<double> c;  // c[alpha*m*m + beta*m + gamma]

  int dim() const { return static_cast<int>(basis.size()); }
  double operator()(int alpha, int beta, int gamma) const {
    const int m = dim();
    return c[static_cast<std::size_t>((alpha * m + beta) * m + gamma)];
  }
  std::vector<double> coordinates(const Mat& x) const;
  Mat from_coordinates(std::span<const double> x) const;
};

// Orthogonal basis (generalized Gell-Mann times i; i for u(1)) and its
// structure constants [B_b, B_c] = sum_a c^a_bc B_a.
StructureConstants structure_constants(const GroupId& g);

// Scaling-and-squaring exponential of an arbitrary small matrix.
Mat expm(const Mat& x);

GroupElement exp_map(const AlgebraElement& x);

// Principal logarithm by inverse scaling-and-squaring. Throws CutLocus when an
// eigenvalue sits at -1, when dexp is numerically singular, or when the
// principal branch leaves su(n).
AlgebraElement log_map(const GroupElement& g);

AlgebraElement random_algebra(const GroupId& g, std::mt19937_64& rng, double scale = 1.0);
// Haar-distributed element (Ginibre QR with phase correction).
GroupElement random_group(const GroupId& g, std::mt19937_64& rng);

}  // namespace cs
