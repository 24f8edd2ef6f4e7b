#pragma once

#include <vector>

#include "cs/connection.hpp"
#include "cs/forms.hpp"
#include "cs/liealg.hpp"

namespace cs {

// A real number modulo 1 with a comparison tolerance.
class ModZValue {
 public:
  explicit ModZValue(double v = 0.0, double tol = 1e-6);

  double value() const { return rep_; }  // in [0, 1)
  double tolerance() const { return tol_; }

  // Distance on the circle R/Z, in [0, 1/2].
  static double circle_distance(double a, double b);
  double distance(const ModZValue& o) const { return circle_distance(rep_, o.rep_); }
  bool approx_equal(const ModZValue& o) const { return distance(o) <= tol_; }

  ModZValue operator+(const ModZValue& o) const { return ModZValue(rep_ + o.rep_, tol_); }
  ModZValue operator-(const ModZValue& o) const { return ModZValue(rep_ - o.rep_, tol_); }

 private:
  double rep_;
  double tol_;
};

struct CSActionSpec {
  InvariantPolynomial p;
  Connection background;
  ModZValue offset;
  Chain cycle;
  int t_nodes = 12;
};

// p(F, ..., F).
// `keep` optionally limits the computed components.
FormField chern_weil_form(const InvariantPolynomial& p, const Connection& a, const QuadratureSpec& q,
                          const std::function<bool(Mask)>& keep = {});

// Tp(A', A) = r int_0^1 p(A' - A, F_t, ..., F_t) dt with A_t = (1-t) A' + t A,
// by Gauss-Legendre in t. dTp(A', A) = p(F_A') - p(F_A).
FormField transgression(const InvariantPolynomial& p, const Connection& a_prime, const Connection& a,
                        const QuadratureSpec& q, int t_nodes = 12, const std::function<bool(Mask)>& keep = {});

// offset + int_c Tp(A, A0) as a real number (no reduction).
double cs_action_real(const CSActionSpec& spec, const Connection& a, const QuadratureSpec& q);
ModZValue cs_action(const CSActionSpec& spec, const Connection& a, const QuadratureSpec& q);

// round(CS(A^phi) - CS(A)); throws NonIntegerDefect if the residual is >= 0.05.
int cs_gauge_defect(const CSActionSpec& spec, const Connection& a, const GaugeTransformation& phi,
                    const QuadratureSpec& q);

// Largest circle distance of cs_action along `path` from its value at path[0].
// Throws NotFlat when some A_s has curvature above flat_tol at the sample grid.
double locally_constant_check(const CSActionSpec& spec, const ConnectionFamily& family,
                              const std::vector<Point>& path, const QuadratureSpec& q,
                              double flat_tol = 1e-8);

// Largest curvature component magnitude of `a` on a regular grid of the chart.
double max_curvature(const Connection& a, const QuadratureSpec& q, int grid = 5);

// Degree-d map CubeS3 -> SU(2): exp(-i d f(|y|) (y/|y|).sigma) with y = x - centre,
// f running smoothly from pi at the centre to 0 at radius 1/2; identity near the boundary.
GaugeTransformation winding_map(int degree);

// (1/24 pi^2) int_c tr((g^-1 dg)^3).
double winding_degree_integral(const GaugeTransformation& phi, const Chain& c, const QuadratureSpec& q);

}  // namespace cs
