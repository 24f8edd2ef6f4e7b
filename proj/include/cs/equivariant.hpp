#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cs/chernweil.hpp"
#include "cs/connection.hpp"
#include "cs/forms.hpp"

namespace cs {

// A finite-dimensional Lie group acting on a chart from the left, through the
// fundamental vector fields of a basis X_1..X_k of its Lie algebra.
// Convention: [X_N, Y_N] = -[X, Y]_N.
struct SymmetryAction {
  std::string group;  // "U1", "SU2", "T2", ...
  ModelChart chart;
  int generators = 0;
  // [X_a, X_b] = sum_c structure[(c * k + a) * k + b] X_c; empty means abelian.
  std::vector<double> structure;
  std::function<Point(int, const Point&)> field;  // X_{a,N}(x)

  bool abelian() const;
  double structure_constant(int c, int a, int b) const;
  // X_N for X = sum_a x_a X_a.
  VectorField fundamental(const std::vector<double>& x) const;
  VectorField generator_field(int a) const;
};

// U(1) rotating the disk chart [-1,1]^2 about the origin: X_N = (-y, x).
SymmetryAction rotation_action();
// T^k translating the first k coordinates of a torus chart.
SymmetryAction translation_action(const ModelChart& torus, int k);
// SU(2) acting on R^3 = su(2) by the adjoint action, on the box [-1,1]^3.
SymmetryAction adjoint_su2_action();

// Flow of X_{a,N} for time t by RK4 with `steps` steps. Equals the action of exp(t X_a).
Point flow(const SymmetryAction& action, int a, const Point& x, double t, int steps = 20);
// Largest |[X_a N, X_b N] + [X_a, X_b]_N| over samples (vector field bracket by finite differences).
double bracket_defect(const SymmetryAction& action, const std::vector<Point>& samples, double h = 1e-5);

// Pull-back of w along y -> phi(y) given Dphi(y) (rows: w's coordinates, columns: out_chart's).
FormField pullback_linear(const FormField& w, const ModelChart& out_chart, std::function<Point(const Point&)> phi,
                          std::function<Eigen::MatrixXd(const Point&)> dphi);

// Element of the Cartan model: alpha(X) = sum over terms of X^monomial * form,
// with 2 |monomial| + form degree = total_degree for every term.
struct EquivariantForm {
  struct Term {
    std::vector<int> monomial;  // exponent per generator
    FormField form;             // scalar-valued
  };

  SymmetryAction action;
  int total_degree = 0;
  std::vector<Term> terms;

  EquivariantForm(SymmetryAction action, int total_degree, std::vector<Term> terms);  // validates grading

  int polynomial_degree() const;
  // Form-degree part of alpha(X); zero form when no term has that degree.
  FormField evaluate(const std::vector<double>& x, int form_degree) const;
};

// (d_c alpha)(X) = d(alpha(X)) - i_{X_N} alpha(X).
EquivariantForm cartan_differential(const EquivariantForm& alpha, const QuadratureSpec& q);

// Largest |phi_g^* alpha(Ad_g X) - alpha(X)| with g = exp(t X_a), over generators,
// sample points and the given X values. Zero for invariant forms.
double invariance_defect(const EquivariantForm& alpha, const std::vector<Point>& samples,
                         const std::vector<std::vector<double>>& xs, double t = 0.3, int steps = 20);

// Principal bundle P -> B with an abelian structure group acting on P and a
// connection given by real 1-forms theta^a with theta^a(X_{b,N}) = delta_ab.
struct ToyBundle {
  std::string name;
  ModelChart total;
  ModelChart base;
  SymmetryAction action;
  std::vector<FormField> connection;
  std::function<Point(const Point&)> section;  // base -> total
  std::function<Eigen::MatrixXd(const Point&)> section_jacobian;
};

// "hopf": S^3 -> S^2 in Euler angles (theta, phi, psi), X_N = 2 d/dpsi,
//         connection (dpsi + cos(theta) dphi) / 2, section psi = 0.
// "torus3": T^3 -> T^2 translating z, connection dz + 0.3 sin(2 pi x) dy.
ToyBundle toy_bundle(const std::string& name);
std::vector<std::string> toy_bundle_names();

// C_A(alpha) on P: generators replaced by the curvature 2-forms d theta^a and the
// form part horizontalized. Throws UnsupportedBundle for non-abelian actions or
// when alpha's action is not the bundle's.
FormField chern_weil_map_total(const EquivariantForm& alpha, const ToyBundle& bundle, const QuadratureSpec& q);
// Same, pulled back to the base along the section.
FormField chern_weil_map(const EquivariantForm& alpha, const ToyBundle& bundle, const QuadratureSpec& q);

enum class CharFormMethod { Binomial, Direct };
// Components of p(F_A - v_A(X), ..., F_A - v_A(X)), v_A(X) = A(X_N), indexed by
// half the form degree: entry k has form degree 2k. Binomial uses
// C(r,k) (-1)^(r-k) p(F^k, v^(r-k)); Direct sums all 2^r slot assignments.
// Throws NotInvariant when A is not invariant under the action's flows.
std::vector<FormField> equivariant_char_form(const InvariantPolynomial& p, const Connection& a,
                                             const SymmetryAction& action, const std::vector<double>& x,
                                             const QuadratureSpec& q,
                                             CharFormMethod method = CharFormMethod::Binomial);
// Largest flow pull-back discrepancy of A's components (tolerance in the check above is 1e-6).
double connection_invariance_defect(const Connection& a, const SymmetryAction& action,
                                    const std::vector<Point>& samples, double t = 0.3, int steps = 20);

// Components of a form on base x params split by (base degree, parameter degree).
struct BigradedForm {
  int base_dim = 0;
  int param_dim = 0;
  int degree = 0;
  std::map<std::pair<int, int>, FormField> parts;

  bool populated(int i, int j) const { return parts.count({i, j}) > 0; }
  // Zero form of the right degree when the component has no stored masks.
  FormField part(int i, int j) const;
};

BigradedForm bigrade(const FormField& w, int base_dim);
double max_magnitude(const FormField& w, const std::vector<Point>& samples);

// Bigraded curvature of the family's total connection on base x params.
BigradedForm family_curvature_bigrading(const ConnectionFamily& fam, const QuadratureSpec& q);

// Uniform samples of base x params.
std::vector<Point> family_samples(const ConnectionFamily& fam, int n, std::uint64_t seed);

// Algebra-valued 1-form on base x params with parameter components only:
// sum_a B_a(x, s) ds^a.
FormField vertical_form(const ConnectionFamily& fam,
                        std::function<std::vector<Mat>(const Point& x, const Point& s)> components);

struct VanishingEntry {
  int base_degree = 0;
  int param_degree = 0;
  double max_magnitude = 0.0;
  bool tested = false;  // false for components that are allowed to be nonzero
};

// Max magnitudes of p(F_fam)^{2r-j, j}; entries with j < r are tested.
// Throws NotFlat when some sampled A_s has curvature above flat_tol.
std::vector<VanishingEntry> flat_vanishing_check(const InvariantPolynomial& p, const ConnectionFamily& fam,
                                                 const std::vector<Point>& samples, const QuadratureSpec& q,
                                                 double flat_tol = 1e-8);

// Max magnitudes of Tp(A_fam + vb, A_fam + va)^{2r-1-k, k}; entries with k < r are tested.
std::vector<VanishingEntry> connection_independence_check(const InvariantPolynomial& p, const ConnectionFamily& fam,
                                                          const FormField& va, const FormField& vb,
                                                          const std::vector<Point>& samples,
                                                          const QuadratureSpec& q, double flat_tol = 1e-8,
                                                          int t_nodes = 12);

}  // namespace cs
