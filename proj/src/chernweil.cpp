#include "cs/chernweil.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "cs/errors.hpp"

namespace cs {

namespace {
constexpr double kPi = std::numbers::pi;
}

ModZValue::ModZValue(double v, double tol) : rep_(v - std::floor(v)), tol_(tol) {
  if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "mod-Z value must be finite");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "mod-Z tolerance must be positive");
  if (rep_ >= 1.0) rep_ = 0.0;
}

double ModZValue::circle_distance(double a, double b) {
  double d = std::fmod(a - b, 1.0);
  if (d < 0.0) d += 1.0;
  return std::min(d, 1.0 - d);
}

FormField chern_weil_form(const InvariantPolynomial& p, const Connection& a, const QuadratureSpec& q,
                          const std::function<bool(Mask)>& keep) {
  const FormField f = curvature(a, q);
  return polynomial_form(p, std::vector<FormField>(static_cast<std::size_t>(p.degree), f), keep);
}

FormField transgression(const InvariantPolynomial& p, const Connection& a_prime, const Connection& a,
                        const QuadratureSpec& q, int t_nodes, const std::function<bool(Mask)>& keep) {
  if (!(a_prime.chart() == a.chart())) throw Error(ErrorKind::ChartMismatch, "connections on different charts");
  if (!(a_prime.group() == a.group())) throw Error(ErrorKind::KindMismatch, "connections in different groups");
  if (t_nodes < 1) throw Error(ErrorKind::InvalidArgument, "need at least one t node");
  const int r = p.degree;
  const int n = a.chart().dim();
  if (2 * r - 1 > n) throw Error(ErrorKind::DegreeOverflow, "transgression degree exceeds chart dimension");

  std::vector<Mask> ones;
  for (int i = 0; i < n; ++i) ones.push_back(bit(i));
  std::vector<Mask> twos;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) twos.push_back(bit(i) | bit(j));
  }
  std::sort(twos.begin(), twos.end());
  std::vector<std::vector<Mask>> factors{ones};
  for (int k = 1; k < r; ++k) factors.push_back(twos);
  auto plan = std::make_shared<PolynomialPlan>(restrict_plan(plan_products(factors), keep));

  // dA is only needed when curvature slots exist.
  std::shared_ptr<FormField> da_prime, da;
  if (r > 1) {
    da_prime = std::make_shared<FormField>(exterior_derivative(a_prime.form, q));
    da = std::make_shared<FormField>(exterior_derivative(a.form, q));
  }
  const GaussRule& rule = gauss_legendre(t_nodes);
  const Mat zero = zero_matrix(a.group());
  const Complex norm = p.normalization;

  auto spread = [](const FormField& f, const std::vector<Mask>& full, const Mat& z, const Point& x) {
    std::vector<Mat> out(full.size(), z);
    const auto v = f.eval(x);
    for (std::size_t k = 0; k < f.masks.size(); ++k) {
      const auto it = std::lower_bound(full.begin(), full.end(), f.masks[k]);
      out[static_cast<std::size_t>(it - full.begin())] = v[k];
    }
    return out;
  };

  const auto masks = plan->masks;
  return make_bulk_form(
      a.chart(), 2 * r - 1, ValueKind::Scalar, GroupId::u1(), masks,
      [=](const Point& x) {
        const auto ap = spread(a_prime.form, ones, zero, x);
        const auto a0 = spread(a.form, ones, zero, x);
        std::vector<Mat> diff(ones.size());
        for (std::size_t i = 0; i < ones.size(); ++i) diff[i] = ap[i] - a0[i];
        std::vector<Mat> dap, da0;
        if (r > 1) {
          dap = spread(*da_prime, twos, zero, x);
          da0 = spread(*da, twos, zero, x);
        }
        std::vector<Complex> acc(masks.size(), Complex(0.0, 0.0));
        std::vector<Mat> at(ones.size()), ft(twos.size());
        std::vector<const std::vector<Mat>*> slots{&diff};
        for (int k = 1; k < r; ++k) slots.push_back(&ft);
        for (std::size_t node = 0; node < rule.nodes.size(); ++node) {
          const double t = rule.nodes[node];
          if (r > 1) {
            for (std::size_t i = 0; i < ones.size(); ++i) at[i] = (1.0 - t) * ap[i] + t * a0[i];
            for (std::size_t k = 0; k < twos.size(); ++k) {
              const auto i = static_cast<std::size_t>(std::countr_zero(twos[k]));
              const auto j = static_cast<std::size_t>(std::countr_zero(twos[k] & ~bit(static_cast<int>(i))));
              ft[k] = (1.0 - t) * dap[k] + t * da0[k] + at[i] * at[j] - at[j] * at[i];
            }
          }
          const auto vals = evaluate_plan(*plan, norm, slots);
          for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += (r * rule.weights[node]) * vals[k];
        }
        std::vector<Mat> out;
        out.reserve(acc.size());
        for (const Complex c : acc) out.push_back(Mat::Constant(1, 1, c));
        return out;
      });
}

double cs_action_real(const CSActionSpec& spec, const Connection& a, const QuadratureSpec& q) {
  const int r = spec.p.degree;
  if (spec.cycle.dim() != 2 * r - 1) {
    throw Error(ErrorKind::DimensionMismatch, "Chern-Simons cycle must have dimension 2r-1 = " + std::to_string(2 * r - 1));
  }
  const auto tp = transgression(spec.p, a, spec.background, q, spec.t_nodes);
  return spec.offset.value() + integrate_scalar(tp, spec.cycle, q).real();
}

ModZValue cs_action(const CSActionSpec& spec, const Connection& a, const QuadratureSpec& q) {
  return ModZValue(cs_action_real(spec, a, q), spec.offset.tolerance());
}

int cs_gauge_defect(const CSActionSpec& spec, const Connection& a, const GaugeTransformation& phi,
                    const QuadratureSpec& q) {
  const double shift = cs_action_real(spec, gauge_transform(a, phi, q), q) - cs_action_real(spec, a, q);
  const double rounded = std::round(shift);
  if (std::abs(shift - rounded) >= 0.05) {
    throw Error(ErrorKind::NonIntegerDefect, "gauge shift " + std::to_string(shift) + " is not near an integer");
  }
  return static_cast<int>(rounded);
}

double max_curvature(const Connection& a, const QuadratureSpec& q, int grid) {
  const auto f = curvature(a, q);
  const int n = a.chart().dim();
  const auto& lo = a.chart().lower();
  const auto& hi = a.chart().upper();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  double worst = 0.0;
  while (true) {
    Point x(n);
    for (int i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      x(i) = lo[ui] + (idx[ui] + 0.5) / grid * (hi[ui] - lo[ui]);
    }
    for (const auto& v : f.eval(x)) worst = std::max(worst, v.norm());
    int i = 0;
    while (i < n && ++idx[static_cast<std::size_t>(i)] == grid) idx[static_cast<std::size_t>(i++)] = 0;
    if (i == n) break;
  }
  return worst;
}

double locally_constant_check(const CSActionSpec& spec, const ConnectionFamily& family,
                              const std::vector<Point>& path, const QuadratureSpec& q, double flat_tol) {
  if (path.empty()) return 0.0;
  std::vector<ModZValue> values;
  for (const auto& s : path) {
    const auto a = family.at(s);
    const double curv = max_curvature(a, q);
    if (curv > flat_tol) {
      throw Error(ErrorKind::NotFlat, "family is not flat along the path (curvature " + std::to_string(curv) + ")");
    }
    values.push_back(cs_action(spec, a, q));
  }
  double worst = 0.0;
  for (const auto& v : values) worst = std::max(worst, v.distance(values.front()));
  return worst;
}

GaugeTransformation winding_map(int degree) {
  // exp(-i f n.sigma) rather than exp(+i f n.sigma): this orientation makes the
  // degree integral over the standard cube orientation equal to +degree.
  const Complex iu{0.0, 1.0};
  const Complex i = -iu;
  std::array<Mat, 3> sigma;
  for (auto& s : sigma) s = Mat::Zero(2, 2);
  sigma[0] << 0.0, 1.0, 1.0, 0.0;
  sigma[1] << 0.0, -iu, iu, 0.0;
  sigma[2] << 1.0, 0.0, 0.0, -1.0;
  constexpr double radius = 0.5;
  const double d = degree;

  struct Profile {
    double f, df;  // f(rho) and f'(rho)
  };
  auto profile = [d](double rho) {
    const double s = rho / radius;
    const double s2 = s * s;
    const double w = (35.0 * s - 35.0 * s * s2 + 21.0 * s * s2 * s2 - 5.0 * s * s2 * s2 * s2) / 16.0;
    const double dw = 35.0 * (1.0 - s2) * (1.0 - s2) * (1.0 - s2) / 16.0;
    return Profile{d * kPi * (1.0 - w), -d * kPi * dw / radius};
  };

  auto g = [=](const Point& x) -> Mat {
    const Eigen::Vector3d y(x(0) - 0.5, x(1) - 0.5, x(2) - 0.5);
    const double rho = y.norm();
    if (rho >= radius) return Mat::Identity(2, 2);
    const auto pr = profile(rho);
    Mat out = std::cos(pr.f) * Mat::Identity(2, 2);
    if (rho > 0.0) {
      for (int j = 0; j < 3; ++j) out += (i * std::sin(pr.f) * y(j) / rho) * sigma[static_cast<std::size_t>(j)];
    }
    return out;
  };
  auto dg = [=](const Point& x) {
    const Eigen::Vector3d y(x(0) - 0.5, x(1) - 0.5, x(2) - 0.5);
    const double rho = y.norm();
    std::vector<Mat> out(3, Mat::Zero(2, 2));
    if (rho >= radius) return out;
    const auto pr = profile(rho);
    if (rho < 1e-12) {
      for (int k = 0; k < 3; ++k) out[static_cast<std::size_t>(k)] = i * std::cos(pr.f) * pr.df * sigma[static_cast<std::size_t>(k)];
      return out;
    }
    const Eigen::Vector3d nh = y / rho;
    Mat nsig = Mat::Zero(2, 2);
    for (int j = 0; j < 3; ++j) nsig += nh(j) * sigma[static_cast<std::size_t>(j)];
    for (int k = 0; k < 3; ++k) {
      Mat v = (-std::sin(pr.f) * pr.df * nh(k)) * Mat::Identity(2, 2) + (i * std::cos(pr.f) * pr.df * nh(k)) * nsig;
      for (int j = 0; j < 3; ++j) {
        const double dn = ((j == k ? 1.0 : 0.0) - nh(j) * nh(k)) / rho;
        v += (i * std::sin(pr.f) * dn) * sigma[static_cast<std::size_t>(j)];
      }
      out[static_cast<std::size_t>(k)] = v;
    }
    return out;
  };
  return GaugeTransformation::from_map(ModelChart::cube_s3(), GroupId::su(2), g, dg);
}

double winding_degree_integral(const GaugeTransformation& phi, const Chain& c, const QuadratureSpec& q) {
  if (phi.chart.dim() != 3) throw Error(ErrorKind::DimensionMismatch, "degree integral needs a 3-dimensional chart");
  const double h = q.fd_step;
  auto form = make_bulk_form(phi.chart, 3, ValueKind::Scalar, GroupId::u1(), {7u}, [phi, h](const Point& x) {
    const Mat g = phi.g(x);
    const auto dg = gauge_derivatives(phi, x, h);
    std::array<Mat, 3> a;
    for (std::size_t k = 0; k < 3; ++k) a[k] = g.adjoint() * dg[k];
    // tr(A^A^A)_{012} = sum over permutations of sign * tr(A_s0 A_s1 A_s2); cyclicity leaves 3 (tr(A0A1A2) - tr(A0A2A1)).
    const Complex v = 3.0 * ((a[0] * a[1] * a[2]).trace() - (a[0] * a[2] * a[1]).trace());
    return std::vector<Mat>{Mat::Constant(1, 1, v)};
  });
  return integrate_scalar(form, c, q).real() / (24.0 * kPi * kPi);
}

}  // namespace cs
