#include "cs/connection.hpp"

#include <algorithm>
#include <bit>

#include "cs/errors.hpp"

namespace cs {

Connection::Connection(FormField a) : form(std::move(a)) {
  if (form.degree != 1) throw Error(ErrorKind::DegreeMismatch, "a connection is a 1-form");
  if (form.kind != ValueKind::Algebra) throw Error(ErrorKind::KindMismatch, "a connection must be algebra-valued");
}

Connection zero_connection(const ModelChart& chart, const GroupId& g) {
  return Connection(zero_form(chart, 1, ValueKind::Algebra, g));
}

Connection constant_connection(const ModelChart& chart, const std::vector<double>& c, const AlgebraElement& x) {
  if (static_cast<int>(c.size()) != chart.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "one coefficient per chart direction expected");
  }
  std::vector<std::tuple<Mask, ScalarCoefficient, AlgebraElement>> terms;
  for (int i = 0; i < chart.dim(); ++i) {
    const double ci = c[static_cast<std::size_t>(i)];
    terms.emplace_back(bit(i), [ci](const Point&) { return ci; }, x);
  }
  return Connection(algebra_form(chart, 1, std::move(terms)));
}

GaugeTransformation GaugeTransformation::constant(const ModelChart& chart, const GroupElement& g) {
  GaugeTransformation t;
  t.chart = chart;
  t.group = g.group();
  t.g = [m = g.matrix()](const Point&) { return m; };
  t.dg = [m = g.matrix(), n = chart.dim()](const Point&) {
    return std::vector<Mat>(static_cast<std::size_t>(n), Mat::Zero(m.rows(), m.cols()));
  };
  return t;
}

GaugeTransformation GaugeTransformation::from_map(const ModelChart& chart, const GroupId& group, GroupMap g,
                                                  GroupMapDerivative dg) {
  GaugeTransformation t;
  t.chart = chart;
  t.group = group;
  t.g = std::move(g);
  t.dg = std::move(dg);
  return t;
}

std::vector<Mat> gauge_derivatives(const GaugeTransformation& phi, const Point& x, double h) {
  const int n = phi.active_dims < 0 ? phi.chart.dim() : phi.active_dims;
  std::vector<Mat> out;
  if (phi.dg) {
    out = phi.dg(x);
  } else {
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      Point p = x;
      p(i) = x(i) + h;
      const Mat f1 = phi.g(p);
      p(i) = x(i) - h;
      const Mat fm1 = phi.g(p);
      p(i) = x(i) + 2.0 * h;
      const Mat f2 = phi.g(p);
      p(i) = x(i) - 2.0 * h;
      const Mat fm2 = phi.g(p);
      out.push_back((8.0 * (f1 - fm1) - (f2 - fm2)) / (12.0 * h));
    }
  }
  const int size = phi.group.matrix_size();
  out.resize(static_cast<std::size_t>(phi.chart.dim()), Mat::Zero(size, size));
  return out;
}

GaugeTransformation compose(const GaugeTransformation& phi, const GaugeTransformation& psi) {
  if (!(phi.chart == psi.chart) || !(phi.group == psi.group)) {
    throw Error(ErrorKind::ChartMismatch, "gauge transformations live on different bundles");
  }
  GaugeTransformation out;
  out.chart = phi.chart;
  out.group = phi.group;
  out.active_dims = (phi.active_dims < 0 || psi.active_dims < 0) ? -1 : std::max(phi.active_dims, psi.active_dims);
  out.g = [a = phi.g, b = psi.g](const Point& x) -> Mat { return a(x) * b(x); };
  if (phi.dg && psi.dg) {
    out.dg = [phi, psi](const Point& x) {
      const Mat ga = phi.g(x), gb = psi.g(x);
      auto da = gauge_derivatives(phi, x, 1e-5);
      auto db = gauge_derivatives(psi, x, 1e-5);
      std::vector<Mat> r;
      for (std::size_t i = 0; i < da.size(); ++i) r.push_back(da[i] * gb + ga * db[i]);
      return r;
    };
  }
  return out;
}

GaugeTransformation lift_to_product(const GaugeTransformation& phi, const ModelChart& product) {
  if (!(product.base() == phi.chart)) throw Error(ErrorKind::ChartMismatch, "product base differs from gauge chart");
  const int nb = phi.chart.dim();
  GaugeTransformation out;
  out.chart = product;
  out.group = phi.group;
  out.active_dims = nb;
  out.g = [g = phi.g, nb](const Point& x) { return g(x.head(nb)); };
  if (phi.dg) {
    out.dg = [dg = phi.dg, nb](const Point& x) { return dg(x.head(nb)); };
  } else {
    out.dg = [phi, nb](const Point& x) { return gauge_derivatives(phi, x.head(nb), 1e-5); };
  }
  return out;
}

FormField curvature(const Connection& a, const QuadratureSpec& q) {
  auto da = exterior_derivative(a.form, q);
  auto aa = wedge(a.form, a.form, WedgeMode::LieBracket);
  return add(da, scale(aa, 0.5));
}

Connection gauge_transform(const Connection& a, const GaugeTransformation& phi, const QuadratureSpec& q) {
  if (!(a.chart() == phi.chart)) throw Error(ErrorKind::ChartMismatch, "gauge transformation on a different chart");
  if (!(a.group() == phi.group)) throw Error(ErrorKind::KindMismatch, "gauge transformation in a different group");
  q.validate();
  const int n = a.chart().dim();
  const int active = phi.active_dims < 0 ? n : phi.active_dims;
  std::vector<Mask> masks;
  for (int i = 0; i < n; ++i) {
    const bool stored = std::find(a.form.masks.begin(), a.form.masks.end(), bit(i)) != a.form.masks.end();
    if (i < active || stored) masks.push_back(bit(i));
  }
  const double h = q.fd_step;
  return Connection(make_bulk_form(a.chart(), 1, ValueKind::Algebra, a.group(), masks,
                                   [a, phi, masks, h](const Point& x) {
                                     const Mat g = phi.g(x);
                                     const Mat gi = g.adjoint();
                                     const auto dg = gauge_derivatives(phi, x, h);
                                     const auto va = a.form.eval(x);
                                     std::vector<Mat> out;
                                     out.reserve(masks.size());
                                     std::size_t k = 0;
                                     for (Mask m : masks) {
                                       const int i = std::countr_zero(m);
                                       Mat v = gi * dg[static_cast<std::size_t>(i)];
                                       while (k < a.form.masks.size() && a.form.masks[k] < m) ++k;
                                       if (k < a.form.masks.size() && a.form.masks[k] == m) v += gi * va[k] * g;
                                       out.push_back(std::move(v));
                                     }
                                     return out;
                                   }));
}

GroupElement holonomy(const Connection& a, const Chain& loop, int steps, const QuadratureSpec& q) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "holonomy needs at least one step");
  if (!(loop.chart == a.chart())) throw Error(ErrorKind::ChartMismatch, "loop lies on a different chart");
  if (loop.dim() != 1 || !is_cycle(loop)) throw Error(ErrorKind::OpenLoop, "holonomy needs a closed loop");
  Mat p = identity(a.group());
  const double dt = 1.0 / steps;
  for (const auto& cell : loop.cells) {
    for (int k = 0; k < steps; ++k) {
      // Reversed cells are traversed from u = 1 down to u = 0.
      const double t = (k + 0.5) * dt;
      Point u(1);
      u(0) = cell.sign > 0 ? t : 1.0 - t;
      const Point x = cell.map(u);
      const Eigen::MatrixXd j = cell_jacobian(cell, u, q.fd_step);
      const auto va = a.form.eval(x);
      Mat ag = zero_matrix(a.group());
      for (std::size_t c = 0; c < a.form.masks.size(); ++c) {
        ag += (cell.sign * j(std::countr_zero(a.form.masks[c]), 0)) * va[c];
      }
      p = expm(-dt * ag) * p;
    }
  }
  return GroupElement(a.group(), p);
}

ConnectionCoordinates sample_coordinates(const Connection& a, const Point& x, const QuadratureSpec& q) {
  ConnectionCoordinates c;
  c.basis = structure_constants(a.group());
  c.dim = a.chart().dim();
  const int m = c.basis.dim();
  const int n = c.dim;
  c.a.assign(static_cast<std::size_t>(m * n), 0.0);
  c.da.assign(static_cast<std::size_t>(m * n * n), 0.0);
  auto store = [&](const std::vector<Mat>& vals, int i) {
    for (std::size_t k = 0; k < a.form.masks.size(); ++k) {
      const int j = std::countr_zero(a.form.masks[k]);
      const auto coords = c.basis.coordinates(vals[k]);
      for (int alpha = 0; alpha < m; ++alpha) {
        const double v = coords[static_cast<std::size_t>(alpha)];
        if (i < 0) {
          c.a[static_cast<std::size_t>(alpha * n + j)] = v;
        } else {
          c.da[static_cast<std::size_t>((alpha * n + j) * n + i)] = v;
        }
      }
    }
  };
  store(a.form.eval(x), -1);
  const double h = q.fd_step;
  for (int i = 0; i < n; ++i) {
    Point p = x;
    p(i) = x(i) + h;
    auto f1 = a.form.eval(p);
    p(i) = x(i) - h;
    auto fm1 = a.form.eval(p);
    p(i) = x(i) + 2.0 * h;
    auto f2 = a.form.eval(p);
    p(i) = x(i) - 2.0 * h;
    auto fm2 = a.form.eval(p);
    std::vector<Mat> d;
    for (std::size_t k = 0; k < f1.size(); ++k) d.push_back((8.0 * (f1[k] - fm1[k]) - (f2[k] - fm2[k])) / (12.0 * h));
    store(d, i);
  }
  return c;
}

std::vector<Eigen::MatrixXd> curvature_components(const ConnectionCoordinates& c, double kappa) {
  const int m = c.basis.dim();
  const int n = c.dim;
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(m), Eigen::MatrixXd::Zero(n, n));
  for (int alpha = 0; alpha < m; ++alpha) {
    auto& f = out[static_cast<std::size_t>(alpha)];
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        double v = c.deriv(alpha, j, i) - c.deriv(alpha, i, j);
        for (int b = 0; b < m; ++b) {
          for (int g = 0; g < m; ++g) {
            v += kappa * c.basis(alpha, b, g) * (c.value(b, i) * c.value(g, j) - c.value(b, j) * c.value(g, i));
          }
        }
        f(i, j) = v;
      }
    }
  }
  return out;
}

ConnectionFamily::ConnectionFamily(const ModelChart& b, const ModelChart& p, FormField t)
    : base(b), params(p), total(std::move(t)) {
  if (!(total.chart == ModelChart::product(base, params))) {
    throw Error(ErrorKind::ChartMismatch, "family form must live on base x params");
  }
  if (total.degree != 1 || total.kind != ValueKind::Algebra) {
    throw Error(ErrorKind::KindMismatch, "family form must be an algebra-valued 1-form");
  }
  for (Mask m : total.masks) {
    if (std::countr_zero(m) >= base.dim()) {
      throw Error(ErrorKind::InvalidArgument, "family connection has parameter-direction components");
    }
  }
}

Connection ConnectionFamily::at(const Point& s) const {
  if (s.size() != params.dim()) throw Error(ErrorKind::DimensionMismatch, "parameter point has wrong dimension");
  const int nb = base.dim();
  const int n = nb + params.dim();
  return Connection(make_bulk_form(base, 1, ValueKind::Algebra, group(), total.masks,
                                   [t = total, s, nb, n](const Point& x) {
                                     Point p(n);
                                     p.head(nb) = x;
                                     p.tail(n - nb) = s;
                                     return t.eval(p);
                                   }));
}

ConnectionFamily make_family(const ModelChart& base, const ModelChart& params, const GroupId& g,
                             std::function<std::vector<Mat>(const Point& x, const Point& s)> components) {
  const auto prod = ModelChart::product(base, params);
  const int nb = base.dim();
  std::vector<Mask> masks;
  for (int i = 0; i < nb; ++i) masks.push_back(bit(i));
  auto total = make_bulk_form(prod, 1, ValueKind::Algebra, g, masks, [components, nb](const Point& p) {
    auto v = components(p.head(nb), p.tail(p.size() - nb));
    if (static_cast<int>(v.size()) != nb) throw Error(ErrorKind::DimensionMismatch, "one component per base direction");
    return v;
  });
  return ConnectionFamily(base, params, std::move(total));
}

ConnectionFamily commuting_family(int torus_dim, const AlgebraElement& h, const AlgebraElement& x, double twist) {
  if (!(h.group() == x.group())) throw Error(ErrorKind::KindMismatch, "H and X must share a Lie algebra");
  const auto base = ModelChart::torus(torus_dim);
  const auto params = ModelChart::box(std::vector<double>(static_cast<std::size_t>(torus_dim), -1.0),
                                      std::vector<double>(static_cast<std::size_t>(torus_dim), 1.0), "theta");
  const Mat hm = h.matrix();
  const Mat xm = x.matrix();
  constexpr double two_pi = 2.0 * 3.14159265358979323846;
  return make_family(base, params, h.group(), [=](const Point& p, const Point& s) {
    const Mat g = expm(twist * std::sin(two_pi * p(0)) * xm);
    const Mat gi = g.adjoint();
    std::vector<Mat> out;
    out.reserve(static_cast<std::size_t>(torus_dim));
    for (int i = 0; i < torus_dim; ++i) out.push_back(s(i) * (gi * hm * g));
    // g^-1 d_0 g = twist 2 pi cos(2 pi x_0) X because g commutes with X.
    out[0] += twist * two_pi * std::cos(two_pi * p(0)) * xm;
    return out;
  });
}

}  // namespace cs
