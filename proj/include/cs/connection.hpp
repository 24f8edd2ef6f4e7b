#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "cs/forms.hpp"
#include "cs/liealg.hpp"

namespace cs {

// Connection 1-form on a trivialized principal bundle.
struct Connection {
  FormField form;  // algebra-valued, degree 1

  explicit Connection(FormField a);  // validates kind and degree

  const ModelChart& chart() const { return form.chart; }
  const GroupId& group() const { return form.group; }
};

Connection zero_connection(const ModelChart& chart, const GroupId& g);
// sum_i c_i dx^i * X.
Connection constant_connection(const ModelChart& chart, const std::vector<double>& c, const AlgebraElement& x);

using GroupMap = std::function<Mat(const Point&)>;
// Partial derivatives d_i g, one per coordinate.
using GroupMapDerivative = std::function<std::vector<Mat>(const Point&)>;

struct GaugeTransformation {
  ModelChart chart;
  GroupId group;
  GroupMap g;
  GroupMapDerivative dg;  // optional; finite differences otherwise
  int active_dims = -1;   // g depends only on the leading coordinates (-1: all)

  static GaugeTransformation constant(const ModelChart& chart, const GroupElement& g);
  static GaugeTransformation from_map(const ModelChart& chart, const GroupId& group, GroupMap g,
                                      GroupMapDerivative dg = nullptr);
};

// (phi psi)(x) = phi(x) psi(x); gauge_transform(gauge_transform(A, phi), psi) = gauge_transform(A, compose(phi, psi)).
GaugeTransformation compose(const GaugeTransformation& phi, const GaugeTransformation& psi);
// Pulls phi back along the projection base x fiber -> base.
GaugeTransformation lift_to_product(const GaugeTransformation& phi, const ModelChart& product);

// Partial derivatives of g at x (analytic if available).
std::vector<Mat> gauge_derivatives(const GaugeTransformation& phi, const Point& x, double h);

// F = dA + 1/2 [A ^ A].
FormField curvature(const Connection& a, const QuadratureSpec& q);

// A^phi = Ad_{g^-1} A + g^-1 dg.
Connection gauge_transform(const Connection& a, const GaugeTransformation& phi, const QuadratureSpec& q);

// Path-ordered product of exp(-A(gamma') dt) over midpoint steps on each cell;
// later steps multiply on the left, so the result transports the fiber at the
// start point to the fiber at the end point.
GroupElement holonomy(const Connection& a, const Chain& loop, int steps, const QuadratureSpec& q = {});

// Coordinates A = A^alpha_j dx^j B_alpha and their first derivatives at a point.
struct ConnectionCoordinates {
  StructureConstants basis;
  int dim = 0;
  std::vector<double> a;   // a[alpha * dim + j]
  std::vector<double> da;  // da[(alpha * dim + j) * dim + i] = d_i A^alpha_j

  double value(int alpha, int j) const { return a[static_cast<std::size_t>(alpha * dim + j)]; }
  double deriv(int alpha, int j, int i) const { return da[static_cast<std::size_t>((alpha * dim + j) * dim + i)]; }
};

ConnectionCoordinates sample_coordinates(const Connection& a, const Point& x, const QuadratureSpec& q);

// Weight of the structure-constant term. With F_ij = d_i A_j - d_j A_i + [A_i, A_j]
// and the antisymmetrized product summed over all i, j, the bracket term carries 1/2.
constexpr double kCurvatureKappa = 0.5;

// F^alpha_ij = A^alpha_{j,i} - A^alpha_{i,j} + kappa c^alpha_{beta gamma}(A^beta_i A^gamma_j - A^beta_j A^gamma_i),
// one dim x dim matrix per alpha.
std::vector<Eigen::MatrixXd> curvature_components(const ConnectionCoordinates& c, double kappa = kCurvatureKappa);

// A smooth family s -> A_s of connections on `base`, stored as a single
// algebra-valued 1-form on base x params that has only base components.
struct ConnectionFamily {
  ModelChart base;
  ModelChart params;
  FormField total;

  ConnectionFamily(const ModelChart& base, const ModelChart& params, FormField total);

  const ModelChart& product() const { return total.chart; }
  const GroupId& group() const { return total.group; }
  Connection at(const Point& s) const;
};

// Builds a family from A(x, s) given per base direction.
ConnectionFamily make_family(const ModelChart& base, const ModelChart& params, const GroupId& g,
                             std::function<std::vector<Mat>(const Point& x, const Point& s)> components);

// Flat family on Torus(n) with parameters s in [-1,1]^n:
// A_s = g^-1 (sum_i s_i dx^i H) g + g^-1 dg with g(x) = exp(twist sin(2 pi x_0) X).
// twist = 0 gives the plain commuting family sum_i s_i dx^i H.
ConnectionFamily commuting_family(int torus_dim, const AlgebraElement& h, const AlgebraElement& x, double twist);

}  // namespace cs
