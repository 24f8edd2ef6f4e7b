#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cs/liealg.hpp"
#include "cs/quadrature.hpp"

namespace cs {

constexpr int kMaxChartDim = 8;

using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::AutoAlign, kMaxChartDim, 1>;
// Bit i set <=> dx^i appears; components are always stored in increasing index order.
using Mask = std::uint32_t;

inline Mask bit(int i) { return Mask{1} << i; }
int popcount(Mask m);
// Sign of dx^I ^ dx^J relative to the sorted multi-index I|J (0 if they overlap).
int wedge_sign(Mask a, Mask b);
std::string mask_to_string(Mask m);

enum class ChartKind { Torus, Polygon, CubeS3, Box, Product };

class ModelChart {
 public:
  static ModelChart torus(int n);        // [0,1]^n, opposite faces glued; n in 1..4
  static ModelChart polygon(int genus);  // regular 4g-gon inscribed in the unit circle, g in 1..3
  static ModelChart cube_s3();           // [0,1]^3, whole boundary collapsed to a point
  // Open coordinate patch with no identifications; lo/hi are nominal bounds.
  static ModelChart box(std::vector<double> lo, std::vector<double> hi, std::string label = "box");
  // base x fiber with base coordinates first.
  static ModelChart product(const ModelChart& base, const ModelChart& fiber);

  ChartKind kind() const { return kind_; }
  int dim() const { return dim_; }
  int genus() const { return genus_; }
  const std::string& id() const { return id_; }
  const std::vector<double>& lower() const { return lo_; }
  const std::vector<double>& upper() const { return hi_; }

  // Product charts only.
  const ModelChart& base() const;
  const ModelChart& fiber() const;

  // Polygon vertex k (indices taken mod 4g). Edge k runs from vertex k to k+1.
  Point polygon_vertex(int k) const;

  // True when a and b represent the same point after identification.
  bool same_point(const Point& a, const Point& b, double tol = 1e-9) const;

  // Deterministic sample of identified boundary point pairs (a, b), a != b.
  std::vector<std::pair<Point, Point>> identified_pairs(int samples, std::uint64_t seed) const;

  friend bool operator==(const ModelChart& a, const ModelChart& b) { return a.id_ == b.id_; }

 private:
  ChartKind kind_ = ChartKind::Box;
  int dim_ = 0;
  int genus_ = 0;
  std::string id_;
  std::vector<double> lo_, hi_;
  std::shared_ptr<const ModelChart> base_, fiber_;
};

enum class ValueKind { Scalar, Algebra, Matrix };
std::string_view to_string(ValueKind k);

using Coefficient = std::function<Mat(const Point&)>;
using ScalarCoefficient = std::function<double(const Point&)>;
// Evaluates every stored component at once, aligned with FormField::masks.
using Evaluator = std::function<std::vector<Mat>(const Point&)>;

struct FormField {
  ModelChart chart;
  int degree = 0;
  ValueKind kind = ValueKind::Scalar;
  GroupId group = GroupId::u1();  // ignored for scalar forms
  std::vector<Mask> masks;        // strictly increasing
  Evaluator eval;

  int matrix_size() const { return kind == ValueKind::Scalar ? 1 : group.matrix_size(); }
  std::vector<Mat> values(const Point& x) const { return eval(x); }
  // Zero matrix when the component is not stored.
  Mat component(Mask m, const Point& x) const;
  Mat zero_value() const { return Mat::Zero(matrix_size(), matrix_size()); }
};

FormField make_form(const ModelChart& chart, int degree, ValueKind kind, GroupId group,
                    std::vector<std::pair<Mask, Coefficient>> components);
FormField make_bulk_form(const ModelChart& chart, int degree, ValueKind kind, GroupId group,
                         std::vector<Mask> masks, Evaluator eval);
FormField scalar_form(const ModelChart& chart, int degree,
                      std::vector<std::pair<Mask, ScalarCoefficient>> components);
// f(x) * X for a fixed algebra element, one term per mask.
FormField algebra_form(const ModelChart& chart, int degree,
                       std::vector<std::tuple<Mask, ScalarCoefficient, AlgebraElement>> terms);
FormField zero_form(const ModelChart& chart, int degree, ValueKind kind, GroupId group);
FormField constant_function(const ModelChart& chart, double c);

FormField add(const FormField& a, const FormField& b);
FormField subtract(const FormField& a, const FormField& b);
FormField scale(const FormField& a, Complex s);
FormField operator+(const FormField& a, const FormField& b);
FormField operator-(const FormField& a, const FormField& b);
FormField operator*(Complex s, const FormField& a);

// Keeps only components whose mask satisfies pred; degree is unchanged.
FormField restrict_components(const FormField& a, const std::function<bool(Mask)>& pred);
// Pointwise rewrite of all values; the callback may change the value kind.
FormField transform_values(const FormField& a, ValueKind kind,
                           std::function<void(const Point&, std::vector<Mat>&)> fn);
// Re-labels a form on chart a as living on an identical-coordinate chart b.
FormField rebase(const FormField& a, const ModelChart& chart);

FormField exterior_derivative(const FormField& w, const QuadratureSpec& q);

enum class WedgeMode { Plain, LieBracket, PolynomialSlot };
// Plain: matrix product (scalar factors scale). LieBracket: [a ^ b] with
// algebra commutators. PolynomialSlot: p(a, b) with the standard quadratic
// invariant polynomial.
FormField wedge(const FormField& a, const FormField& b, WedgeMode mode = WedgeMode::Plain);

// p(w_1, ..., w_r) for algebra-valued forms, a scalar form of total degree.
// `keep`, when set, limits the output to the accepted components.
FormField polynomial_form(const InvariantPolynomial& p, const std::vector<FormField>& args,
                          const std::function<bool(Mask)>& keep = {});

// Pointwise version: which component tuples feed which output component.
struct PolynomialPlan {
  struct Term {
    std::size_t out;
    std::vector<std::size_t> slots;  // component index in each factor
    double sign;
  };
  std::vector<Mask> masks;  // output components
  std::vector<Term> terms;
};
PolynomialPlan plan_products(const std::vector<std::vector<Mask>>& factor_masks);
// Drops output components rejected by keep.
PolynomialPlan restrict_plan(const PolynomialPlan& plan, const std::function<bool(Mask)>& keep);
// out[k] = sum over terms of sign * symmetrized trace, aligned with plan.masks.
std::vector<Complex> evaluate_plan(const PolynomialPlan& plan, Complex normalization,
                                   const std::vector<const std::vector<Mat>*>& factor_values);

using VectorField = std::function<Point(const Point&)>;
FormField interior(const VectorField& v, const FormField& w);

// Largest discrepancy of any component across identified boundary pairs.
double identification_defect(const FormField& w, int samples = 64, std::uint64_t seed = 1);
// Largest distance of algebra-valued components from the Lie algebra.
double algebra_defect(const FormField& w, const std::vector<Point>& samples);

using CellMap = std::function<Point(const Point&)>;
using CellJacobian = std::function<Eigen::MatrixXd(const Point&)>;

struct Cell {
  int dim = 0;
  CellMap map;            // [0,1]^dim -> chart coordinates
  CellJacobian jacobian;  // optional analytic derivative; finite differences otherwise
  double sign = 1.0;
  std::vector<int> orders;  // per-axis quadrature order; empty or <= 0 uses the spec
};

struct Chain {
  ModelChart chart;
  std::vector<Cell> cells;

  int dim() const;  // -1 for the empty chain
  Chain negated() const;
};

Chain operator+(const Chain& a, const Chain& b);

Cell point_cell(const Point& p, double sign = 1.0);
Cell affine_cell(const Point& origin, const std::vector<Point>& edges, double sign = 1.0);
// Axis-aligned box [lo, hi] split into per_axis^k affine cells.
Chain box_chain(const ModelChart& chart, const std::vector<double>& lo, const std::vector<double>& hi,
                int per_axis = 1, std::vector<int> orders = {});

Chain boundary(const Chain& c);

Eigen::MatrixXd cell_jacobian(const Cell& cell, const Point& u, double h);
// Throws InvalidArgument when some cell loses rank at a quadrature node.
void validate_immersion(const Chain& c, const QuadratureSpec& q);
// 1-chains: true when boundary points cancel in pairs after identification.
bool is_cycle(const Chain& c, double tol = 1e-9);

Mat integrate(const FormField& w, const Chain& c, const QuadratureSpec& q);
Complex integrate_scalar(const FormField& w, const Chain& c, const QuadratureSpec& q);

// Integrates a form on base x fiber over a chain in the base, giving a form on
// the fiber: the component dx^I ^ ds^J contributes (int_c f dx^I) ds^J.
FormField fiber_integrate(const FormField& w, const Chain& c, const QuadratureSpec& q);

// Built-in manifolds and cycles by name.
ModelChart builtin_chart(const std::string& name);
Chain builtin_chain(const std::string& name, int subdivisions = 1);
std::vector<std::string> builtin_chain_names();

}  // namespace cs
