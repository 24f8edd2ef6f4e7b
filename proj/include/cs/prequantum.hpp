#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cs/chernweil.hpp"
#include "cs/connection.hpp"
#include "cs/forms.hpp"

namespace cs {

// A polyline in N given by its vertices.
using Path = std::vector<Point>;

// A simply connected chart N with a lattice of translations acting on it, a
// potential lambda and the curvature omega of a character chi on N / lattice.
// chi is fixed by omega and its values on the straight loops
// base -> base + lattice[i].
struct PrequantumData {
  ModelChart chart;
  FormField lambda;  // degree 1
  FormField omega;   // degree 2, pulled back to N
  std::vector<Point> lattice;
  std::vector<double> reference;  // one value per lattice vector
  Point base;
  QuadratureSpec q;
};

// Integer coordinates m with end - start = sum_i m_i lattice[i]; throws NonLiftable otherwise.
std::vector<int> deck_element(const PrequantumData& data, const Point& start, const Point& end);
Point translate(const PrequantumData& data, const std::vector<int>& m, const Point& x);

// int over the polyline of lambda.
double line_integral(const PrequantumData& data, const Path& path);
// int of omega over the fan of triangles from `apex` over the closed polygon.
double fan_integral(const PrequantumData& data, const Path& closed, const Point& apex);

// chi of the loop in N / lattice traced by a path from p to a translate of p:
// sum_i m_i reference_i + int_u omega, where u spans the path, the reference
// loops at `base` and the two connecting segments.
double character_value(const PrequantumData& data, const Path& path);

using Character = std::function<double(const Path&)>;

struct LiftedAction {
  PrequantumData data;
  Character chi;  // the reference character; replaceable for fault injection

  // alpha_m(x) = int_gamma lambda - chi(pi o gamma), gamma the segment x -> m.x.
  ModZValue alpha(const std::vector<int>& m, const Point& x) const;
  // Same with an explicit connecting path from x to m.x.
  ModZValue alpha_along(const Path& gamma) const;
};

// Throws HypothesisViolated when |d lambda - omega| exceeds tol at sampled points.
LiftedAction build_lift(const PrequantumData& data, double tol = 1e-8, int samples = 16);

// Max circle distance between alpha_{m+n}(x) and alpha_m(n.x) + alpha_n(x).
double cocycle_check(const LiftedAction& lift, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs,
                     const std::vector<Point>& points);

// Holonomy of Theta along the loop in N / lattice lifted to `path`:
// int_path lambda - alpha_m(start) mod 1.
ModZValue prequantum_holonomy(const LiftedAction& lift, const Path& path);

// N = R^2 (box [-4,4]^2), lattice Z^2, lambda = x dy, omega = dx ^ dy.
PrequantumData heisenberg_data(std::vector<double> reference = {0.0, 0.0});

// Data on the parameter space of a family: lambda = int_c Tp(A_fam, pr* A0)^{2r-2,1},
// omega = int_c p(F_fam)^{2r-2,2}, lattice 2 pi Z^n, reference values 0. The
// background A0 on the base defaults to the zero connection.
PrequantumData family_prequantum_data(const InvariantPolynomial& p, const ConnectionFamily& fam, const Chain& c,
                                      const QuadratureSpec& q, int t_nodes = 12,
                                      const std::optional<Connection>& background = std::nullopt);

// Non-flat background on T^4 depending only on x_0 (needs dim g >= 7). With the
// zero background the degree-three potential of a torus family vanishes
// identically; this one makes it nonzero while keeping it closed.
Connection x0_background(const GroupId& g);

// Closed rectangle loop lo -> (hi_x, lo_y) -> hi -> (lo_x, hi_y) -> lo in the first two
// coordinates of a point in R^n (others fixed at lo).
Path rectangle_loop(const Point& lo, const Point& hi);

struct PillowcaseResult {
  ModZValue holonomy;
  double area = 0.0;  // int of omega over the fan spanning the loop
};

// Corners of the pillowcase for the SU(2) torus family: (u, v) in (pi Z)^2.
// Throws CornerTooClose when the loop comes within `margin` of one.
PillowcaseResult pillowcase_experiment(const LiftedAction& lift, const Path& loop, double margin = 0.05);

// Holonomies for r >= 3 on a flat family; throws NotFlat if some vertex of a
// loop has curvature above flat_tol.
std::vector<ModZValue> high_degree_holonomies(const LiftedAction& lift, const ConnectionFamily& fam,
                                              const std::vector<Path>& loops, double flat_tol = 1e-8);

}  // namespace cs
