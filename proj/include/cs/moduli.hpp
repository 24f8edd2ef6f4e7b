#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "cs/connection.hpp"
#include "cs/forms.hpp"
#include "cs/liealg.hpp"

namespace cs {

// Holonomy data a_1, b_1, ..., a_g, b_g of a flat connection on a genus-g surface.
struct SurfaceGroupRep {
  int genus = 1;
  GroupId group = GroupId::su(2);
  std::vector<GroupElement> generators;

  SurfaceGroupRep(int genus, GroupId group, std::vector<GroupElement> generators);  // validates count and group

  static SurfaceGroupRep trivial(int genus, const GroupId& group);
  static SurfaceGroupRep random(int genus, const GroupId& group, std::uint64_t seed);

  const GroupElement& a(int i) const { return generators[static_cast<std::size_t>(2 * i)]; }
  const GroupElement& b(int i) const { return generators[static_cast<std::size_t>(2 * i + 1)]; }
  SurfaceGroupRep conjugated(const GroupElement& g) const;  // g x g^-1 for every generator
};

// Product of the commutators a b a^-1 b^-1, left to right.
Mat relator(const SurfaceGroupRep& rho);
// ||relator - I||_F.
double relator_residual(const SurfaceGroupRep& rho);
constexpr double kFlatTolerance = 1e-8;
inline bool is_flat(const SurfaceGroupRep& rho) { return relator_residual(rho) < kFlatTolerance; }

// Objective ||relator - I||_F^2 and its gradient in the coordinates xi of the
// right perturbations x_k -> x_k exp(sum_alpha xi_{k,alpha} B_alpha), flattened as k * dim + alpha.
double relator_objective(const SurfaceGroupRep& rho);
std::vector<double> relator_gradient(const SurfaceGroupRep& rho);
// Same gradient by central differences, for validation.
std::vector<double> relator_gradient_fd(const SurfaceGroupRep& rho, double h = 1e-6);

// x_k -> x_k exp(sum_alpha step_{k,alpha} B_alpha).
SurfaceGroupRep retract(const SurfaceGroupRep& rho, const std::vector<double>& step);

struct FlatSearchOptions {
  double tol = kFlatTolerance;
  int max_iters = 5000;
  double armijo = 1e-4;  // sufficient-decrease constant
  double shrink = 0.5;   // backtracking factor
};

struct FlatSearchResult {
  SurfaceGroupRep rep;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Riemannian gradient descent on the objective with Armijo backtracking from a
// Barzilai-Borwein trial step. Never accepts a step that raises the objective.
FlatSearchResult search_flat(const SurfaceGroupRep& seed, const FlatSearchOptions& options = {});
// As above, throwing NoConvergence (with the best residual) on failure.
SurfaceGroupRep find_flat(const SurfaceGroupRep& seed, const FlatSearchOptions& options = {});

// tr a_i, tr b_i, tr a_i b_i per handle (real parts); conjugation invariant.
std::vector<double> trace_coordinates(const SurfaceGroupRep& rho);

// Tangent vector at rho: right-trivialized components xi_k, one per generator.
struct TangentCocycle {
  SurfaceGroupRep rep;
  std::vector<AlgebraElement> components;
};

struct CocycleSpace {
  int cocycle_dim = 0;    // kernel of the linearized relator
  int coboundary_dim = 0; // image of infinitesimal conjugation
  std::vector<TangentCocycle> basis;  // orthonormal complement of coboundaries inside cocycles
};

// Throws NotFlat unless relator_residual(rho) < 1e-8.
CocycleSpace tangent_cocycles(const SurfaceGroupRep& rho, double threshold = 1e-6);
// Linearized relator applied to a tangent vector, in algebra coordinates.
std::vector<double> linearized_relator(const TangentCocycle& u);
// Infinitesimal conjugation by eta: xi_k = Ad_{x_k^-1} eta - eta.
TangentCocycle coboundary(const SurfaceGroupRep& rho, const AlgebraElement& eta);
// Transport of u under conjugation of the representation by g.
TangentCocycle conjugated(const TangentCocycle& u, const GroupElement& g);
// Euclidean pairing of the flattened coordinates.
double coordinate_pairing(const TangentCocycle& u, const TangentCocycle& v);

// sigma(u, v) = (1/4 pi^2) <u cup v, [relator]> with the trace pairing on group
// cochains of the 4g-gon, antisymmetrized. Throws PointMismatch for different base points.
double atiyah_bott_form(const TangentCocycle& u, const TangentCocycle& v);
// (1/4 pi^2) int_{T^2} tr(a ^ b) where a, b are the derivatives of the family at s
// along the parameter directions du and dv (central differences in s).
double atiyah_bott_form(const ConnectionFamily& fam, const Point& s, const std::vector<double>& du,
                        const std::vector<double>& dv, const QuadratureSpec& q);

// int_c p(F_fam)^{2,2} as a 2-form on the parameters, evaluated on (du, dv) at s.
double family_pairing_22(const ConnectionFamily& fam, const Chain& c, const Point& s, const std::vector<double>& du,
                         const std::vector<double>& dv, const QuadratureSpec& q);

// mu_c(X)(s) = -r int_c p(X, F, ..., F) with F the (2r-2, 0) part of the family
// curvature and X an algebra-valued function on the base. Throws DimensionMismatch
// unless dim c = 2r - 2.
double moment_map(const InvariantPolynomial& p, const ConnectionFamily& fam, const Chain& c,
                  const std::function<Mat(const Point&)>& x, const Point& s, const QuadratureSpec& q);

}  // namespace cs
