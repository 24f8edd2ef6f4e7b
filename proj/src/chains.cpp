#include <algorithm>
#include <regex>

#include "cs/errors.hpp"
#include "cs/forms.hpp"

namespace cs {

int Chain::dim() const { return cells.empty() ? -1 : cells.front().dim; }

Chain Chain::negated() const {
  Chain out = *this;
  for (auto& c : out.cells) c.sign = -c.sign;
  return out;
}

Chain operator+(const Chain& a, const Chain& b) {
  if (a.cells.empty()) return b;
  if (b.cells.empty()) return a;
  if (!(a.chart == b.chart)) throw Error(ErrorKind::ChartMismatch, "chains on different charts");
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "chains of different dimension");
  Chain out = a;
  out.cells.insert(out.cells.end(), b.cells.begin(), b.cells.end());
  return out;
}

Cell point_cell(const Point& p, double sign) {
  Cell c;
  c.dim = 0;
  c.map = [p](const Point&) { return p; };
  c.jacobian = [n = p.size()](const Point&) { return Eigen::MatrixXd(n, 0); };
  c.sign = sign;
  return c;
}

Cell affine_cell(const Point& origin, const std::vector<Point>& edges, double sign) {
  const auto n = origin.size();
  Eigen::MatrixXd j(n, static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (edges[k].size() != n) throw Error(ErrorKind::DimensionMismatch, "cell edge has wrong dimension");
    j.col(static_cast<Eigen::Index>(k)) = edges[k];
  }
  Cell c;
  c.dim = static_cast<int>(edges.size());
  c.map = [origin, j](const Point& u) -> Point { return origin + j * u; };
  c.jacobian = [j](const Point&) { return j; };
  c.sign = sign;
  return c;
}

Chain box_chain(const ModelChart& chart, const std::vector<double>& lo, const std::vector<double>& hi,
                int per_axis, std::vector<int> orders) {
  const int k = static_cast<int>(lo.size());
  if (k != chart.dim() || hi.size() != lo.size()) {
    throw Error(ErrorKind::DimensionMismatch, "box chain bounds must match chart dimension");
  }
  if (per_axis < 1) throw Error(ErrorKind::InvalidArgument, "subdivision count must be positive");
  Chain out{chart, {}};
  std::vector<int> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Point origin(k);
    std::vector<Point> edges;
    for (int a = 0; a < k; ++a) {
      const double step = (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]) / per_axis;
      origin(a) = lo[static_cast<std::size_t>(a)] + step * idx[static_cast<std::size_t>(a)];
      Point e = Point::Zero(k);
      e(a) = step;
      edges.push_back(e);
    }
    Cell c = affine_cell(origin, edges);
    c.orders = orders;
    out.cells.push_back(std::move(c));
    int a = 0;
    while (a < k && ++idx[static_cast<std::size_t>(a)] == per_axis) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == k) break;
  }
  return out;
}

namespace {

Point insert_coordinate(const Point& u, int i, double value) {
  Point out(u.size() + 1);
  for (Eigen::Index a = 0, b = 0; a < out.size(); ++a) out(a) = (a == i) ? value : u(b++);
  return out;
}

}  // namespace

Chain boundary(const Chain& c) {
  Chain out{c.chart, {}};
  for (const auto& cell : c.cells) {
    if (cell.dim == 0) continue;
    for (int i = 0; i < cell.dim; ++i) {
      for (int eps = 0; eps < 2; ++eps) {
        Cell face;
        face.dim = cell.dim - 1;
        const double value = eps;
        face.map = [m = cell.map, i, value](const Point& u) { return m(insert_coordinate(u, i, value)); };
        if (cell.jacobian) {
          face.jacobian = [jf = cell.jacobian, i, value](const Point& u) {
            Eigen::MatrixXd j = jf(insert_coordinate(u, i, value));
            Eigen::MatrixXd r(j.rows(), j.cols() - 1);
            for (Eigen::Index a = 0, b = 0; a < j.cols(); ++a) {
              if (a != i) r.col(b++) = j.col(a);
            }
            return r;
          };
        }
        face.sign = cell.sign * (((i + eps + 1) % 2 == 0) ? 1.0 : -1.0);
        if (!cell.orders.empty()) {
          face.orders = cell.orders;
          face.orders.erase(face.orders.begin() + i);
        }
        out.cells.push_back(std::move(face));
      }
    }
  }
  return out;
}

Eigen::MatrixXd cell_jacobian(const Cell& cell, const Point& u, double h) {
  if (cell.jacobian) return cell.jacobian(u);
  const Point x = cell.map(u);
  Eigen::MatrixXd j(x.size(), cell.dim);
  for (int a = 0; a < cell.dim; ++a) {
    Point p = u;
    p(a) = u(a) + h;
    const Point f1 = cell.map(p);
    p(a) = u(a) - h;
    const Point fm1 = cell.map(p);
    p(a) = u(a) + 2.0 * h;
    const Point f2 = cell.map(p);
    p(a) = u(a) - 2.0 * h;
    const Point fm2 = cell.map(p);
    j.col(a) = (8.0 * (f1 - fm1) - (f2 - fm2)) / (12.0 * h);
  }
  return j;
}

namespace {

struct Node {
  Point x;
  Eigen::MatrixXd jac;
  double weight;  // includes the cell sign
};

std::vector<Node> cell_nodes(const Cell& cell, const QuadratureSpec& q) {
  const int k = cell.dim;
  std::vector<const GaussRule*> rules;
  for (int a = 0; a < k; ++a) {
    int order = q.order;
    if (static_cast<std::size_t>(a) < cell.orders.size() && cell.orders[static_cast<std::size_t>(a)] > 0) {
      order = cell.orders[static_cast<std::size_t>(a)];
    }
    rules.push_back(&gauss_legendre(order));
  }
  std::vector<Node> nodes;
  std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
  while (true) {
    Point u(k);
    double w = cell.sign;
    for (int a = 0; a < k; ++a) {
      u(a) = rules[static_cast<std::size_t>(a)]->nodes[idx[static_cast<std::size_t>(a)]];
      w *= rules[static_cast<std::size_t>(a)]->weights[idx[static_cast<std::size_t>(a)]];
    }
    nodes.push_back({cell.map(u), cell_jacobian(cell, u, q.fd_step), w});
    int a = 0;
    while (a < k && ++idx[static_cast<std::size_t>(a)] == rules[static_cast<std::size_t>(a)]->nodes.size()) {
      idx[static_cast<std::size_t>(a++)] = 0;
    }
    if (a == k) break;
  }
  return nodes;
}

// det of the rows of jac selected by mask (1 for an empty mask).
double minor_det(const Eigen::MatrixXd& jac, Mask m) {
  const auto k = jac.cols();
  if (k == 0) return 1.0;
  Eigen::MatrixXd sub(k, k);
  Eigen::Index r = 0;
  for (Mask mm = m; mm; mm &= mm - 1) sub.row(r++) = jac.row(std::countr_zero(mm));
  return sub.determinant();
}

}  // namespace

void validate_immersion(const Chain& c, const QuadratureSpec& q) {
  for (const auto& cell : c.cells) {
    if (cell.dim == 0) continue;
    for (const auto& node : cell_nodes(cell, q)) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(node.jac);
      if (svd.singularValues().minCoeff() < 1e-10) {
        throw Error(ErrorKind::InvalidArgument, "cell is not immersed at a quadrature node");
      }
    }
  }
}

bool is_cycle(const Chain& c, double tol) {
  if (c.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "is_cycle expects a 1-chain");
  std::vector<std::pair<Point, double>> ends;
  for (const auto& cell : c.cells) {
    ends.emplace_back(cell.map(Point::Zero(1)), -cell.sign);
    ends.emplace_back(cell.map(Point::Ones(1)), cell.sign);
  }
  std::vector<bool> used(ends.size(), false);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (used[i]) continue;
    bool matched = false;
    for (std::size_t j = i + 1; j < ends.size() && !matched; ++j) {
      if (!used[j] && ends[i].second == -ends[j].second && c.chart.same_point(ends[i].first, ends[j].first, tol)) {
        used[i] = used[j] = matched = true;
      }
    }
    if (!matched) return false;
  }
  return true;
}

Mat integrate(const FormField& w, const Chain& c, const QuadratureSpec& q) {
  q.validate();
  Mat total = w.zero_value();
  if (c.cells.empty()) return total;
  if (!(w.chart == c.chart)) throw Error(ErrorKind::ChartMismatch, "form on " + w.chart.id() + ", chain on " + c.chart.id());
  if (w.degree != c.dim()) {
    throw Error(ErrorKind::DegreeMismatch, "cannot integrate a " + std::to_string(w.degree) + "-form over a " +
                                               std::to_string(c.dim()) + "-chain");
  }
  for (const auto& cell : c.cells) {
    for (const auto& node : cell_nodes(cell, q)) {
      auto vals = w.eval(node.x);
      for (std::size_t k = 0; k < w.masks.size(); ++k) {
        const double d = minor_det(node.jac, w.masks[k]);
        if (d != 0.0) total += (node.weight * d) * vals[k];
      }
    }
  }
  return total;
}

Complex integrate_scalar(const FormField& w, const Chain& c, const QuadratureSpec& q) {
  if (w.kind != ValueKind::Scalar) throw Error(ErrorKind::KindMismatch, "integrate_scalar needs a scalar form");
  return integrate(w, c, q)(0, 0);
}

FormField fiber_integrate(const FormField& w, const Chain& c, const QuadratureSpec& q) {
  q.validate();
  if (w.chart.kind() != ChartKind::Product) throw Error(ErrorKind::ChartMismatch, "fiber integration needs a product chart");
  const ModelChart& base = w.chart.base();
  const ModelChart& fiber = w.chart.fiber();
  if (!(c.chart == base)) throw Error(ErrorKind::ChartMismatch, "cycle is not on the base " + base.id());
  const int k = c.dim();
  const int nb = base.dim();
  if (k < 0 || w.degree < k) throw Error(ErrorKind::DegreeMismatch, "form degree below cycle dimension");
  const Mask base_mask = bit(nb) - 1;

  std::vector<Mask> out_masks;
  std::vector<std::tuple<std::size_t, std::size_t, Mask>> terms;  // in index, base part, fiber part
  for (std::size_t i = 0; i < w.masks.size(); ++i) {
    const Mask m = w.masks[i];
    if (popcount(m & base_mask) != k) continue;
    terms.emplace_back(i, m & base_mask, m >> nb);
    out_masks.push_back(m >> nb);
  }
  std::sort(out_masks.begin(), out_masks.end());
  out_masks.erase(std::unique(out_masks.begin(), out_masks.end()), out_masks.end());

  // Nodes on the cycle do not depend on the fiber point, so compute them once.
  struct Prepared {
    Point x;
    std::vector<std::pair<std::size_t, double>> coeff;  // term index -> weight * minor
  };
  auto prepared = std::make_shared<std::vector<Prepared>>();
  for (const auto& cell : c.cells) {
    for (const auto& node : cell_nodes(cell, q)) {
      Prepared p{node.x, {}};
      for (std::size_t t = 0; t < terms.size(); ++t) {
        const double d = minor_det(node.jac, std::get<1>(terms[t]));
        if (d != 0.0) p.coeff.emplace_back(t, node.weight * d);
      }
      prepared->push_back(std::move(p));
    }
  }
  std::vector<std::pair<std::size_t, std::size_t>> slot;  // in index -> out index
  for (const auto& [i, bm, fm] : terms) {
    slot.emplace_back(i, static_cast<std::size_t>(std::lower_bound(out_masks.begin(), out_masks.end(), fm) - out_masks.begin()));
  }
  const Mat zero = w.zero_value();
  const int n = w.chart.dim();
  return make_bulk_form(fiber, w.degree - k, w.kind, w.group, out_masks,
                        [w, prepared, slot, zero, nb, n, nout = out_masks.size()](const Point& s) {
                          std::vector<Mat> out(nout, zero);
                          Point p(n);
                          p.tail(n - nb) = s;
                          for (const auto& node : *prepared) {
                            p.head(nb) = node.x;
                            auto vals = w.eval(p);
                            for (const auto& [t, c] : node.coeff) out[slot[t].second] += c * vals[slot[t].first];
                          }
                          return out;
                        });
}

ModelChart builtin_chart(const std::string& name) {
  static const std::regex torus_re(R"(torus([1-4]))");
  static const std::regex polygon_re(R"(polygon\(([1-3])\))");
  std::smatch m;
  if (std::regex_match(name, m, torus_re)) return ModelChart::torus(std::stoi(m[1]));
  if (std::regex_match(name, m, polygon_re)) return ModelChart::polygon(std::stoi(m[1]));
  if (name == "cubes3") return ModelChart::cube_s3();
  throw Error(ErrorKind::InvalidArgument, "unknown chart '" + name + "'");
}

namespace {

Chain polygon_fundamental(const ModelChart& chart, int subdivisions) {
  Chain out{chart, {}};
  const int n = 4 * chart.genus();
  for (int k = 0; k < n; ++k) {
    const Point a = chart.polygon_vertex(k);
    const Point b = chart.polygon_vertex(k + 1);
    for (int s = 0; s < subdivisions; ++s) {
      // Fan triangle (0, a, b) as a collapsed square, split radially.
      const double r0 = static_cast<double>(s) / subdivisions;
      const double dr = 1.0 / subdivisions;
      Cell c;
      c.dim = 2;
      c.map = [a, b, r0, dr](const Point& u) -> Point {
        const double r = r0 + dr * u(0);
        return r * ((1.0 - u(1)) * a + u(1) * b);
      };
      c.jacobian = [a, b, r0, dr](const Point& u) {
        const double r = r0 + dr * u(0);
        Eigen::MatrixXd j(2, 2);
        j.col(0) = dr * ((1.0 - u(1)) * a + u(1) * b);
        j.col(1) = r * (b - a);
        return j;
      };
      out.cells.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

Chain builtin_chain(const std::string& name, int subdivisions) {
  static const std::regex torus_re(R"(torus([1-4])\.(x|y|z|w)_cycle)");
  static const std::regex torus_fund_re(R"(torus([1-4])\.fundamental)");
  static const std::regex polygon_re(R"(polygon\(([1-3])\)\.(a|b)_([1-3]))");
  static const std::regex polygon_fund_re(R"(polygon\(([1-3])\)\.fundamental)");
  std::smatch m;
  if (std::regex_match(name, m, torus_re)) {
    const int n = std::stoi(m[1]);
    const int axis = std::string("xyzw").find(m[2].str()[0]);
    if (axis >= n) throw Error(ErrorKind::InvalidArgument, "torus" + std::to_string(n) + " has no " + m[2].str() + " cycle");
    auto chart = ModelChart::torus(n);
    Point e = Point::Zero(n);
    e(axis) = 1.0;
    return Chain{chart, {affine_cell(Point::Zero(n), {e})}};
  }
  if (std::regex_match(name, m, torus_fund_re)) {
    const int n = std::stoi(m[1]);
    return box_chain(ModelChart::torus(n), std::vector<double>(n, 0.0), std::vector<double>(n, 1.0), subdivisions);
  }
  if (name == "cubes3.fundamental") {
    return box_chain(ModelChart::cube_s3(), {0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, subdivisions);
  }
  if (std::regex_match(name, m, polygon_re)) {
    const int g = std::stoi(m[1]);
    const int i = std::stoi(m[3]);
    if (i > g) throw Error(ErrorKind::InvalidArgument, "polygon(" + std::to_string(g) + ") has no handle " + std::to_string(i));
    auto chart = ModelChart::polygon(g);
    const int e = 4 * (i - 1) + (m[2] == "a" ? 0 : 1);
    const Point v0 = chart.polygon_vertex(e);
    return Chain{chart, {affine_cell(v0, {chart.polygon_vertex(e + 1) - v0})}};
  }
  if (std::regex_match(name, m, polygon_fund_re)) {
    return polygon_fundamental(ModelChart::polygon(std::stoi(m[1])), subdivisions);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown built-in cycle '" + name + "'");
}

std::vector<std::string> builtin_chain_names() {
  std::vector<std::string> out = {"torus1.x_cycle", "torus1.fundamental"};
  const std::string axes = "xyzw";
  for (int n = 2; n <= 4; ++n) {
    for (int a = 0; a < n; ++a) out.push_back("torus" + std::to_string(n) + "." + axes[static_cast<std::size_t>(a)] + "_cycle");
    out.push_back("torus" + std::to_string(n) + ".fundamental");
  }
  out.push_back("cubes3.fundamental");
  for (int g = 1; g <= 3; ++g) {
    for (int i = 1; i <= g; ++i) {
      out.push_back("polygon(" + std::to_string(g) + ").a_" + std::to_string(i));
      out.push_back("polygon(" + std::to_string(g) + ").b_" + std::to_string(i));
    }
    out.push_back("polygon(" + std::to_string(g) + ").fundamental");
  }
  return out;
}

}  // namespace cs
