#include "cs/prequantum.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cs/equivariant.hpp"
#include "cs/errors.hpp"

namespace cs {

namespace {

constexpr double kLatticeTol = 1e-7;

Eigen::MatrixXd lattice_matrix(const PrequantumData& data) {
  const int n = data.chart.dim();
  Eigen::MatrixXd l(n, static_cast<int>(data.lattice.size()));
  for (std::size_t i = 0; i < data.lattice.size(); ++i) l.col(static_cast<int>(i)) = data.lattice[i];
  return l;
}

bool is_zero(const std::vector<int>& m) {
  for (int v : m) {
    if (v != 0) return false;
  }
  return true;
}

// Triangle (apex, a, b) as a 2-cell, oriented by (a - apex) x (b - a).
Cell triangle_cell(const Point& apex, const Point& a, const Point& b) {
  const Point da = a - apex;
  const Point e = b - a;
  Cell cell;
  cell.dim = 2;
  cell.map = [apex, da, e](const Point& u) -> Point { return apex + u[0] * (da + u[1] * e); };
  cell.jacobian = [da, e](const Point& u) -> Eigen::MatrixXd {
    Eigen::MatrixXd j(da.size(), 2);
    j.col(0) = da + u[1] * e;
    j.col(1) = u[0] * e;
    return j;
  };
  return cell;
}

}  // namespace

std::vector<int> deck_element(const PrequantumData& data, const Point& start, const Point& end) {
  const Point d = end - start;
  const std::size_t k = data.lattice.size();
  std::vector<int> m(k, 0);
  if (k > 0) {
    const Eigen::MatrixXd l = lattice_matrix(data);
    const Eigen::VectorXd coeffs = l.colPivHouseholderQr().solve(d);
    for (std::size_t i = 0; i < k; ++i) m[i] = static_cast<int>(std::lround(coeffs[static_cast<int>(i)]));
  }
  const double residual = (translate(data, m, start) - end).norm();
  if (residual > kLatticeTol * (1.0 + d.norm())) {
    throw Error(ErrorKind::NonLiftable, "path endpoints do not differ by a deck translation (residual " +
                                            std::to_string(residual) + ")");
  }
  return m;
}

Point translate(const PrequantumData& data, const std::vector<int>& m, const Point& x) {
  if (m.size() != data.lattice.size()) {
    throw Error(ErrorKind::DimensionMismatch, "one integer per lattice vector expected");
  }
  Point y = x;
  for (std::size_t i = 0; i < m.size(); ++i) y += m[i] * data.lattice[i];
  return y;
}

double line_integral(const PrequantumData& data, const Path& path) {
  Chain chain{data.chart, {}};
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const Point e = path[i + 1] - path[i];
    if (e.norm() == 0.0) continue;
    chain.cells.push_back(affine_cell(path[i], {e}));
  }
  if (chain.cells.empty()) return 0.0;
  return integrate_scalar(data.lambda, chain, data.q).real();
}

double fan_integral(const PrequantumData& data, const Path& closed, const Point& apex) {
  Chain chain{data.chart, {}};
  for (std::size_t i = 0; i < closed.size(); ++i) {
    const Point& a = closed[i];
    const Point& b = closed[(i + 1) % closed.size()];
    if ((b - a).norm() == 0.0) continue;
    chain.cells.push_back(triangle_cell(apex, a, b));
  }
  if (chain.cells.empty()) return 0.0;
  return integrate_scalar(data.omega, chain, data.q).real();
}

double character_value(const PrequantumData& data, const Path& path) {
  if (path.empty()) return 0.0;
  const Point& p = path.front();
  const Point& end = path.back();
  const auto m = deck_element(data, p, end);

  // Closed polygon: base -> p -> path -> end -> base + d -> reference path reversed -> base.
  Path polygon{data.base};
  polygon.insert(polygon.end(), path.begin(), path.end());
  std::vector<Point> partial{data.base};
  for (std::size_t i = 0; i < m.size(); ++i) partial.push_back(partial.back() + m[i] * data.lattice[i]);
  for (auto it = partial.rbegin(); it != partial.rend(); ++it) polygon.push_back(*it);

  double value = fan_integral(data, polygon, data.base);
  for (std::size_t i = 0; i < m.size(); ++i) value += m[i] * data.reference[i];
  return value;
}

ModZValue LiftedAction::alpha(const std::vector<int>& m, const Point& x) const {
  if (is_zero(m)) return ModZValue(0.0);
  return alpha_along({x, translate(data, m, x)});
}

ModZValue LiftedAction::alpha_along(const Path& gamma) const {
  if (gamma.empty()) return ModZValue(0.0);
  return ModZValue(line_integral(data, gamma) - chi(gamma));
}

LiftedAction build_lift(const PrequantumData& data, double tol, int samples) {
  const int n = data.chart.dim();
  if (data.lambda.degree != 1 || data.omega.degree != 2) {
    throw Error(ErrorKind::DegreeMismatch, "lambda must be a 1-form and omega a 2-form");
  }
  if (!(data.lambda.chart == data.chart) || !(data.omega.chart == data.chart)) {
    throw Error(ErrorKind::ChartMismatch, "lambda and omega must live on the total space");
  }
  if (data.reference.size() != data.lattice.size() || data.base.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "one reference value per lattice vector and a base point in N");
  }
  for (const auto& l : data.lattice) {
    if (l.size() != n) throw Error(ErrorKind::DimensionMismatch, "lattice vectors must live in N");
  }

  const auto dl = exterior_derivative(data.lambda, data.q);
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Point x(n);
    for (int i = 0; i < n; ++i) {
      std::uniform_real_distribution<double> u(data.chart.lower()[static_cast<std::size_t>(i)],
                                               data.chart.upper()[static_cast<std::size_t>(i)]);
      x[i] = u(rng);
    }
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const Mask m = bit(i) | bit(j);
        worst = std::max(worst, std::abs(dl.component(m, x)(0, 0) - data.omega.component(m, x)(0, 0)));
      }
    }
  }
  if (worst > tol) {
    throw Error(ErrorKind::HypothesisViolated,
                "d lambda differs from the curvature by " + std::to_string(worst));
  }
  LiftedAction lift{data, {}};
  lift.chi = [data](const Path& path) { return character_value(data, path); };
  return lift;
}

double cocycle_check(const LiftedAction& lift, const std::vector<std::pair<std::vector<int>, std::vector<int>>>& pairs,
                     const std::vector<Point>& points) {
  double worst = 0.0;
  for (const auto& [phi, psi] : pairs) {
    if (phi.size() != psi.size()) throw Error(ErrorKind::DimensionMismatch, "group elements of different rank");
    std::vector<int> prod(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) prod[i] = phi[i] + psi[i];
    for (const auto& x : points) {
      const ModZValue lhs = lift.alpha(prod, x);
      const ModZValue rhs = lift.alpha(phi, translate(lift.data, psi, x)) + lift.alpha(psi, x);
      worst = std::max(worst, lhs.distance(rhs));
    }
  }
  return worst;
}

ModZValue prequantum_holonomy(const LiftedAction& lift, const Path& path) {
  if (path.empty()) return ModZValue(0.0);
  const auto m = deck_element(lift.data, path.front(), path.back());
  return ModZValue(line_integral(lift.data, path)) - lift.alpha(m, path.front());
}

PrequantumData heisenberg_data(std::vector<double> reference) {
  const auto chart = ModelChart::box({-4.0, -4.0}, {4.0, 4.0}, "plane");
  PrequantumData data{chart,
                      scalar_form(chart, 1, {{bit(1), [](const Point& x) { return x[0]; }}}),
                      scalar_form(chart, 2, {{bit(0) | bit(1), [](const Point&) { return 1.0; }}}),
                      {Point::Unit(2, 0), Point::Unit(2, 1)},
                      std::move(reference),
                      Point::Zero(2),
                      {}};
  return data;
}

PrequantumData family_prequantum_data(const InvariantPolynomial& p, const ConnectionFamily& fam, const Chain& c,
                                      const QuadratureSpec& q, int t_nodes, const std::optional<Connection>& background) {
  const int r = p.degree;
  const int nb = fam.base.dim();
  const int ns = fam.params.dim();
  if (c.dim() != 2 * r - 2) {
    throw Error(ErrorKind::DimensionMismatch, "the cycle must have dimension 2r-2 = " + std::to_string(2 * r - 2));
  }
  if (!(c.chart == fam.base)) throw Error(ErrorKind::ChartMismatch, "the cycle must live on the family base");

  const Connection total(fam.total);
  const Mask base_bits = (Mask{1} << nb) - 1;
  const auto split = [base_bits, r](int j) {
    return [base_bits, r, j](Mask m) { return popcount(m & base_bits) == 2 * r - 2 && popcount(m & ~base_bits) == j; };
  };
  Connection a0 = zero_connection(fam.product(), fam.group());
  if (background) {
    if (!(background->chart() == fam.base)) {
      throw Error(ErrorKind::ChartMismatch, "the background must live on the family base");
    }
    std::vector<Mask> masks;
    for (int i = 0; i < nb; ++i) masks.push_back(bit(i));
    a0 = Connection(make_bulk_form(fam.product(), 1, ValueKind::Algebra, fam.group(), masks,
                                   [form = background->form, masks, nb](const Point& x) {
                                     const Point b = x.head(nb);
                                     std::vector<Mat> out;
                                     for (Mask m : masks) out.push_back(form.component(m, b));
                                     return out;
                                   }));
  }
  const auto tp = transgression(p, total, a0, q, t_nodes, split(1));
  const auto pf = chern_weil_form(p, total, q, split(2));
  PrequantumData data{fam.params,
                      fiber_integrate(bigrade(tp, nb).part(2 * r - 2, 1), c, q),
                      fiber_integrate(bigrade(pf, nb).part(2 * r - 2, 2), c, q),
                      {},
                      std::vector<double>(static_cast<std::size_t>(ns), 0.0),
                      Point::Zero(ns),
                      q};
  for (int i = 0; i < ns; ++i) data.lattice.push_back(2.0 * std::numbers::pi * Point::Unit(ns, i));
  return data;
}

Connection x0_background(const GroupId& g) {
  const auto& basis = structure_constants(g).basis;
  if (basis.size() < 7) throw Error(ErrorKind::InvalidArgument, "x0_background needs dim g >= 7");
  constexpr double tp = 2.0 * std::numbers::pi;
  return Connection(algebra_form(ModelChart::torus(4), 1,
                                 {{bit(0), [](const Point&) { return 0.4; }, basis[3]},
                                  {bit(1), [](const Point& p) { return 0.6 * std::sin(tp * p[0]); }, basis[1]},
                                  {bit(2), [](const Point& p) { return 0.5 * std::cos(tp * p[0]); }, basis[4]},
                                  {bit(3), [](const Point& p) { return 0.7 * std::sin(2 * tp * p[0]); }, basis[6]}}));
}

Path rectangle_loop(const Point& lo, const Point& hi) {
  Point a = lo, b = lo, c = lo, d = lo;
  b[0] = hi[0];
  c[0] = hi[0];
  c[1] = hi[1];
  d[1] = hi[1];
  return {a, b, c, d, a};
}

PillowcaseResult pillowcase_experiment(const LiftedAction& lift, const Path& loop, double margin) {
  if (loop.empty()) return {ModZValue(0.0), 0.0};
  if ((loop.front() - loop.back()).norm() > kLatticeTol) {
    throw Error(ErrorKind::OpenLoop, "the pillowcase loop must close in the parameter plane");
  }
  const double pi = std::numbers::pi;
  constexpr int kPerEdge = 64;
  for (std::size_t i = 0; i + 1 < loop.size(); ++i) {
    for (int k = 0; k <= kPerEdge; ++k) {
      const Point x = loop[i] + (static_cast<double>(k) / kPerEdge) * (loop[i + 1] - loop[i]);
      const double du = x[0] - pi * std::round(x[0] / pi);
      const double dv = x[1] - pi * std::round(x[1] / pi);
      if (std::hypot(du, dv) < margin) {
        throw Error(ErrorKind::CornerTooClose, "loop passes within " + std::to_string(margin) +
                                                   " of a pillowcase corner");
      }
    }
  }
  PillowcaseResult out;
  out.holonomy = prequantum_holonomy(lift, loop);
  out.area = fan_integral(lift.data, Path(loop.begin(), loop.end() - 1), loop.front());
  return out;
}

std::vector<ModZValue> high_degree_holonomies(const LiftedAction& lift, const ConnectionFamily& fam,
                                              const std::vector<Path>& loops, double flat_tol) {
  std::vector<ModZValue> out;
  for (const auto& loop : loops) {
    for (const auto& v : loop) {
      const double k = max_curvature(fam.at(v), lift.data.q);
      if (k > flat_tol) {
        throw Error(ErrorKind::NotFlat, "family curvature " + std::to_string(k) + " along the loop");
      }
    }
    out.push_back(prequantum_holonomy(lift, loop));
  }
  return out;
}

}  // namespace cs
