#include "cs/moduli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cs/equivariant.hpp"
#include "cs/errors.hpp"
#include "cs/quadrature.hpp"

namespace cs {

namespace {

constexpr double kPi = std::numbers::pi;

struct Letter {
  int gen;
  bool inverse;
};

// a_1 b_1 a_1^-1 b_1^-1 ... a_g b_g a_g^-1 b_g^-1.
std::vector<Letter> relator_word(int genus) {
  std::vector<Letter> w;
  for (int i = 0; i < genus; ++i) {
    w.push_back({2 * i, false});
    w.push_back({2 * i + 1, false});
    w.push_back({2 * i, true});
    w.push_back({2 * i + 1, true});
  }
  return w;
}

std::vector<Mat> matrices(const SurfaceGroupRep& rho) {
  std::vector<Mat> out;
  for (const auto& g : rho.generators) out.push_back(g.matrix());
  return out;
}

Mat letter_matrix(const std::vector<Mat>& xs, const Letter& l) {
  const Mat& x = xs[static_cast<std::size_t>(l.gen)];
  return l.inverse ? Mat(x.adjoint()) : x;
}

// prefix[j] = w_1 ... w_j, suffix[j] = w_{j+1} ... w_n.
void prefix_suffix(const std::vector<Mat>& xs, const std::vector<Letter>& word, std::vector<Mat>& prefix,
                   std::vector<Mat>& suffix) {
  const auto n = word.size();
  const auto dim = xs.front().rows();
  prefix.assign(n + 1, Mat::Identity(dim, dim));
  suffix.assign(n + 1, Mat::Identity(dim, dim));
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] * letter_matrix(xs, word[j]);
  for (std::size_t j = n; j-- > 0;) suffix[j] = letter_matrix(xs, word[j]) * suffix[j + 1];
}

double objective_of(const std::vector<Mat>& xs, int genus) {
  Mat r = Mat::Identity(xs.front().rows(), xs.front().cols());
  for (const auto& l : relator_word(genus)) r = r * letter_matrix(xs, l);
  return (r - Mat::Identity(r.rows(), r.cols())).squaredNorm();
}

std::vector<double> gradient_of(const std::vector<Mat>& xs, int genus, const StructureConstants& sc) {
  const auto word = relator_word(genus);
  std::vector<Mat> prefix, suffix;
  prefix_suffix(xs, word, prefix, suffix);
  const auto n = word.size();
  const Mat e = prefix[n] - Mat::Identity(prefix[n].rows(), prefix[n].cols());
  const Mat eh = e.adjoint();
  std::vector<Mat> acc(xs.size(), Mat::Zero(xs.front().rows(), xs.front().cols()));
  for (std::size_t j = 0; j < n; ++j) {
    const auto& l = word[j];
    const Mat& x = xs[static_cast<std::size_t>(l.gen)];
    if (!l.inverse) {
      acc[static_cast<std::size_t>(l.gen)] += suffix[j + 1] * eh * prefix[j] * x;
    } else {
      acc[static_cast<std::size_t>(l.gen)] -= x.adjoint() * suffix[j + 1] * eh * prefix[j];
    }
  }
  const int m = sc.dim();
  std::vector<double> g(xs.size() * static_cast<std::size_t>(m));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    for (int a = 0; a < m; ++a) {
      g[k * static_cast<std::size_t>(m) + static_cast<std::size_t>(a)] =
          2.0 * (acc[k] * sc.basis[static_cast<std::size_t>(a)].matrix()).trace().real();
    }
  }
  return g;
}

std::vector<Mat> retract_matrices(const std::vector<Mat>& xs, const std::vector<double>& step,
                                  const StructureConstants& sc) {
  const auto m = static_cast<std::size_t>(sc.dim());
  std::vector<Mat> out;
  out.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    out.push_back(xs[k] * expm(sc.from_coordinates(std::span<const double>(step.data() + k * m, m))));
  }
  return out;
}

SurfaceGroupRep rep_from(const SurfaceGroupRep& like, const std::vector<Mat>& xs) {
  std::vector<GroupElement> gens;
  for (const auto& x : xs) gens.emplace_back(like.group, x);
  return SurfaceGroupRep(like.genus, like.group, std::move(gens));
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Eigen::VectorXd flatten(const TangentCocycle& u, const StructureConstants& sc) {
  const int m = sc.dim();
  Eigen::VectorXd v(static_cast<Eigen::Index>(u.components.size()) * m);
  for (std::size_t k = 0; k < u.components.size(); ++k) {
    const auto c = sc.coordinates(u.components[k].matrix());
    for (int a = 0; a < m; ++a) v(static_cast<Eigen::Index>(k) * m + a) = c[static_cast<std::size_t>(a)];
  }
  return v;
}

TangentCocycle unflatten(const SurfaceGroupRep& rho, const Eigen::VectorXd& v, const StructureConstants& sc) {
  const int m = sc.dim();
  TangentCocycle u{rho, {}};
  for (std::size_t k = 0; k < rho.generators.size(); ++k) {
    std::vector<double> c(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) c[static_cast<std::size_t>(a)] = v(static_cast<Eigen::Index>(k) * m + a);
    u.components.emplace_back(rho.group, sc.from_coordinates(c));
  }
  return u;
}

// Linearized relator map, one column per (generator, basis direction).
Eigen::MatrixXd relator_jacobian(const SurfaceGroupRep& rho, const StructureConstants& sc) {
  const auto xs = matrices(rho);
  const auto word = relator_word(rho.genus);
  std::vector<Mat> prefix, suffix;
  prefix_suffix(xs, word, prefix, suffix);
  const int m = sc.dim();
  const auto ngen = static_cast<int>(xs.size());
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, ngen * m);
  for (int k = 0; k < ngen; ++k) {
    for (int a = 0; a < m; ++a) {
      const Mat& xi = sc.basis[static_cast<std::size_t>(a)].matrix();
      Mat dr = Mat::Zero(xs.front().rows(), xs.front().cols());
      for (std::size_t l = 0; l < word.size(); ++l) {
        if (word[l].gen != k) continue;
        const Mat& x = xs[static_cast<std::size_t>(k)];
        const Mat dw = word[l].inverse ? Mat(-xi * x.adjoint()) : Mat(x * xi);
        dr += prefix[l] * dw * suffix[l + 1];
      }
      const auto c = sc.coordinates(dr);
      for (int b = 0; b < m; ++b) j(b, k * m + a) = c[static_cast<std::size_t>(b)];
    }
  }
  return j;
}

// Left cocycle values u(x_k) = Ad_{x_k} xi_k.
std::vector<Mat> left_values(const TangentCocycle& u) {
  std::vector<Mat> out;
  for (std::size_t k = 0; k < u.components.size(); ++k) {
    const Mat& x = u.rep.generators[k].matrix();
    out.push_back(x * u.components[k].matrix() * x.adjoint());
  }
  return out;
}

// <u cup v, [relator]> = sum_j tr(u(P_{j-1}) Ad_{P_{j-1}} v(w_j)).
double cup(const TangentCocycle& u, const TangentCocycle& v) {
  const auto xs = matrices(u.rep);
  const auto lu = left_values(u);
  const auto lv = left_values(v);
  auto letter_value = [&](const std::vector<Mat>& lc, const Letter& l) -> Mat {
    const Mat& c = lc[static_cast<std::size_t>(l.gen)];
    if (!l.inverse) return c;
    const Mat& x = xs[static_cast<std::size_t>(l.gen)];
    return -(x.adjoint() * c * x);
  };
  const auto n = xs.front().rows();
  Mat p = Mat::Identity(n, n);
  Mat up = Mat::Zero(n, n);  // u(P)
  Complex total{0.0, 0.0};
  for (const auto& l : relator_word(u.rep.genus)) {
    const Mat vw = letter_value(lv, l);
    total += (up * p * vw * p.adjoint()).trace();
    up += p * letter_value(lu, l) * p.adjoint();
    p = p * letter_matrix(xs, l);
  }
  return total.real();
}

void require_same_point(const TangentCocycle& u, const TangentCocycle& v) {
  bool same = u.rep.genus == v.rep.genus && u.rep.group == v.rep.group;
  for (std::size_t k = 0; same && k < u.rep.generators.size(); ++k) {
    same = (u.rep.generators[k].matrix() - v.rep.generators[k].matrix()).norm() < 1e-12;
  }
  if (!same) throw Error(ErrorKind::PointMismatch, "tangent vectors live at different representations");
}

}  // namespace

SurfaceGroupRep::SurfaceGroupRep(int g, GroupId grp, std::vector<GroupElement> gens)
    : genus(g), group(std::move(grp)), generators(std::move(gens)) {
  if (genus < 1) throw Error(ErrorKind::InvalidArgument, "genus must be at least 1");
  if (static_cast<int>(generators.size()) != 2 * genus) {
    throw Error(ErrorKind::ArityMismatch, "a genus-" + std::to_string(genus) + " representation needs " +
                                              std::to_string(2 * genus) + " generators");
  }
  for (const auto& x : generators) {
    if (!(x.group() == group)) throw Error(ErrorKind::KindMismatch, "generator in a different group");
  }
}

SurfaceGroupRep SurfaceGroupRep::trivial(int genus, const GroupId& group) {
  return SurfaceGroupRep(genus, group,
                         std::vector<GroupElement>(static_cast<std::size_t>(2 * genus), GroupElement::identity(group)));
}

SurfaceGroupRep SurfaceGroupRep::random(int genus, const GroupId& group, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<GroupElement> gens;
  for (int k = 0; k < 2 * genus; ++k) gens.push_back(random_group(group, rng));
  return SurfaceGroupRep(genus, group, std::move(gens));
}

SurfaceGroupRep SurfaceGroupRep::conjugated(const GroupElement& g) const {
  std::vector<GroupElement> gens;
  for (const auto& x : generators) gens.push_back(g * x * g.inverse());
  return SurfaceGroupRep(genus, group, std::move(gens));
}

Mat relator(const SurfaceGroupRep& rho) {
  const auto xs = matrices(rho);
  Mat r = Mat::Identity(xs.front().rows(), xs.front().cols());
  for (const auto& l : relator_word(rho.genus)) r = r * letter_matrix(xs, l);
  return r;
}

double relator_residual(const SurfaceGroupRep& rho) {
  const Mat r = relator(rho);
  return (r - Mat::Identity(r.rows(), r.cols())).norm();
}

double relator_objective(const SurfaceGroupRep& rho) { return objective_of(matrices(rho), rho.genus); }

std::vector<double> relator_gradient(const SurfaceGroupRep& rho) {
  return gradient_of(matrices(rho), rho.genus, structure_constants(rho.group));
}

std::vector<double> relator_gradient_fd(const SurfaceGroupRep& rho, double h) {
  const auto sc = structure_constants(rho.group);
  const auto xs = matrices(rho);
  const std::size_t n = xs.size() * static_cast<std::size_t>(sc.dim());
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> step(n, 0.0);
    step[i] = h;
    const double fp = objective_of(retract_matrices(xs, step, sc), rho.genus);
    step[i] = -h;
    const double fm = objective_of(retract_matrices(xs, step, sc), rho.genus);
    g[i] = (fp - fm) / (2 * h);
  }
  return g;
}

SurfaceGroupRep retract(const SurfaceGroupRep& rho, const std::vector<double>& step) {
  const auto sc = structure_constants(rho.group);
  if (step.size() != rho.generators.size() * static_cast<std::size_t>(sc.dim())) {
    throw Error(ErrorKind::DimensionMismatch, "step has the wrong length");
  }
  return rep_from(rho, retract_matrices(matrices(rho), step, sc));
}

FlatSearchResult search_flat(const SurfaceGroupRep& seed, const FlatSearchOptions& options) {
  const auto sc = structure_constants(seed.group);
  const double tol2 = options.tol * options.tol;
  std::vector<Mat> xs = matrices(seed);
  double f = objective_of(xs, seed.genus);
  FlatSearchResult res{seed, 0, std::sqrt(f), f < tol2};
  if (res.converged) return res;

  std::vector<double> g = gradient_of(xs, seed.genus, sc);
  double alpha = 0.1;
  std::vector<double> prev_step, prev_g;
  int it = 0;
  for (; it < options.max_iters && f >= tol2; ++it) {
    // Barzilai-Borwein trial step from the last accepted move.
    if (!prev_step.empty()) {
      std::vector<double> y(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) y[i] = g[i] - prev_g[i];
      const double sy = dot(prev_step, y);
      if (sy > 0.0) alpha = std::clamp(dot(prev_step, prev_step) / sy, 1e-6, 1e3);
    }
    const double gg = dot(g, g);
    std::vector<double> step(g.size());
    std::vector<Mat> trial;
    double ft = f;
    bool accepted = false;
    while (alpha > 1e-16) {
      for (std::size_t i = 0; i < g.size(); ++i) step[i] = -alpha * g[i];
      trial = retract_matrices(xs, step, sc);
      ft = objective_of(trial, seed.genus);
      if (ft <= f - options.armijo * alpha * gg) {
        accepted = true;
        break;
      }
      alpha *= options.shrink;
    }
    if (!accepted) break;
    xs = std::move(trial);
    f = ft;
    prev_g = g;
    prev_step = step;
    g = gradient_of(xs, seed.genus, sc);
  }
  res.rep = rep_from(seed, xs);
  res.iterations = it;
  res.residual = relator_residual(res.rep);
  res.converged = res.residual < options.tol;
  return res;
}

SurfaceGroupRep find_flat(const SurfaceGroupRep& seed, const FlatSearchOptions& options) {
  auto res = search_flat(seed, options);
  if (!res.converged) {
    throw Error(ErrorKind::NoConvergence, "flat search stopped after " + std::to_string(res.iterations) +
                                              " iterations with residual " + std::to_string(res.residual));
  }
  return res.rep;
}

std::vector<double> trace_coordinates(const SurfaceGroupRep& rho) {
  std::vector<double> out;
  for (int i = 0; i < rho.genus; ++i) {
    out.push_back(rho.a(i).matrix().trace().real());
    out.push_back(rho.b(i).matrix().trace().real());
    out.push_back((rho.a(i).matrix() * rho.b(i).matrix()).trace().real());
  }
  return out;
}

CocycleSpace tangent_cocycles(const SurfaceGroupRep& rho, double threshold) {
  const double res = relator_residual(rho);
  if (res >= kFlatTolerance) {
    throw Error(ErrorKind::NotFlat, "representation residual " + std::to_string(res) + " is not flat");
  }
  const auto sc = structure_constants(rho.group);
  const int m = sc.dim();
  const auto ngen = static_cast<int>(rho.generators.size());
  const int n = ngen * m;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd_j(relator_jacobian(rho, sc), Eigen::ComputeFullV);
  int rank_j = 0;
  for (Eigen::Index i = 0; i < svd_j.singularValues().size(); ++i) rank_j += svd_j.singularValues()(i) > threshold;
  const Eigen::MatrixXd kernel = svd_j.matrixV().rightCols(n - rank_j);

  Eigen::MatrixXd cob(n, m);
  for (int b = 0; b < m; ++b) cob.col(b) = flatten(coboundary(rho, sc.basis[static_cast<std::size_t>(b)]), sc);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_c(cob, Eigen::ComputeThinU);
  int rank_c = 0;
  for (Eigen::Index i = 0; i < svd_c.singularValues().size(); ++i) rank_c += svd_c.singularValues()(i) > threshold;
  const Eigen::MatrixXd ub = svd_c.matrixU().leftCols(rank_c);

  CocycleSpace out;
  out.cocycle_dim = n - rank_j;
  out.coboundary_dim = rank_c;
  if (out.cocycle_dim == 0) return out;
  const Eigen::MatrixXd projected = kernel - ub * (ub.transpose() * kernel);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_q(projected, Eigen::ComputeThinU);
  for (Eigen::Index i = 0; i < svd_q.singularValues().size(); ++i) {
    if (svd_q.singularValues()(i) > threshold) out.basis.push_back(unflatten(rho, svd_q.matrixU().col(i), sc));
  }
  return out;
}

std::vector<double> linearized_relator(const TangentCocycle& u) {
  const auto sc = structure_constants(u.rep.group);
  const Eigen::VectorXd r = relator_jacobian(u.rep, sc) * flatten(u, sc);
  return std::vector<double>(r.data(), r.data() + r.size());
}

TangentCocycle coboundary(const SurfaceGroupRep& rho, const AlgebraElement& eta) {
  TangentCocycle u{rho, {}};
  for (const auto& x : rho.generators) {
    const Mat& g = x.matrix();
    u.components.push_back(AlgebraElement::projected(rho.group, g.adjoint() * eta.matrix() * g - eta.matrix()));
  }
  return u;
}

TangentCocycle conjugated(const TangentCocycle& u, const GroupElement& g) {
  TangentCocycle out{u.rep.conjugated(g), {}};
  for (const auto& c : u.components) {
    out.components.push_back(AlgebraElement::projected(u.rep.group, g.matrix() * c.matrix() * g.matrix().adjoint()));
  }
  return out;
}

double coordinate_pairing(const TangentCocycle& u, const TangentCocycle& v) {
  const auto sc = structure_constants(u.rep.group);
  return flatten(u, sc).dot(flatten(v, sc));
}

double atiyah_bott_form(const TangentCocycle& u, const TangentCocycle& v) {
  require_same_point(u, v);
  return 0.5 * (cup(u, v) - cup(v, u)) / (4 * kPi * kPi);
}

double atiyah_bott_form(const ConnectionFamily& fam, const Point& s, const std::vector<double>& du,
                        const std::vector<double>& dv, const QuadratureSpec& q) {
  if (fam.base.kind() != ChartKind::Torus || fam.base.dim() != 2) {
    throw Error(ErrorKind::InvalidArgument, "direct Atiyah-Bott quadrature needs a family on Torus(2)");
  }
  const int ns = fam.params.dim();
  if (static_cast<int>(du.size()) != ns || static_cast<int>(dv.size()) != ns || s.size() != ns) {
    throw Error(ErrorKind::DimensionMismatch, "tangent directions must match the parameter dimension");
  }
  q.validate();
  const double h = q.fd_step;
  // Derivative of the base components along the parameter direction d.
  auto tangent = [&](const Point& x, const std::vector<double>& d) {
    Point p(2 + ns), m(2 + ns);
    p.head(2) = x;
    m.head(2) = x;
    for (int a = 0; a < ns; ++a) {
      p(2 + a) = s(a) + h * d[static_cast<std::size_t>(a)];
      m(2 + a) = s(a) - h * d[static_cast<std::size_t>(a)];
    }
    const Mat plus0 = fam.total.component(bit(0), p), minus0 = fam.total.component(bit(0), m);
    const Mat plus1 = fam.total.component(bit(1), p), minus1 = fam.total.component(bit(1), m);
    return std::pair<Mat, Mat>{(plus0 - minus0) / (2 * h), (plus1 - minus1) / (2 * h)};
  };
  const auto& rule = gauss_legendre(q.order);
  Complex total{0.0, 0.0};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      Point x(2);
      x << rule.nodes[i], rule.nodes[j];
      const auto [a0, a1] = tangent(x, du);
      const auto [b0, b1] = tangent(x, dv);
      total += rule.weights[i] * rule.weights[j] * (a0 * b1 - a1 * b0).trace();
    }
  }
  return total.real() / (4 * kPi * kPi);
}

double family_pairing_22(const ConnectionFamily& fam, const Chain& c, const Point& s, const std::vector<double>& du,
                         const std::vector<double>& dv, const QuadratureSpec& q) {
  const int ns = fam.params.dim();
  if (static_cast<int>(du.size()) != ns || static_cast<int>(dv.size()) != ns) {
    throw Error(ErrorKind::DimensionMismatch, "tangent directions must match the parameter dimension");
  }
  const auto f = curvature(Connection(fam.total), q);
  // The quadratic polynomial (1/8 pi^2) tr of the symplectic-structure remark.
  const auto pf = polynomial_form(InvariantPolynomial::standard(2), {f, f});
  const auto w22 = bigrade(pf, fam.base.dim()).part(2, 2);
  const auto on_params = fiber_integrate(w22, c, q);
  double total = 0.0;
  for (Mask m : on_params.masks) {
    const int a = std::countr_zero(m);
    const int b = std::countr_zero(m & (m - 1));
    const double coeff = on_params.component(m, s)(0, 0).real();
    const auto ua = static_cast<std::size_t>(a), ub = static_cast<std::size_t>(b);
    total += coeff * (du[ua] * dv[ub] - du[ub] * dv[ua]);
  }
  return total;
}

double moment_map(const InvariantPolynomial& p, const ConnectionFamily& fam, const Chain& c,
                  const std::function<Mat(const Point&)>& x, const Point& s, const QuadratureSpec& q) {
  const int r = p.degree;
  if (c.dim() != 2 * r - 2) {
    throw Error(ErrorKind::DimensionMismatch, "moment map needs a chain of dimension 2r-2 = " + std::to_string(2 * r - 2));
  }
  const int nb = fam.base.dim();
  const auto f20 = family_curvature_bigrading(fam, q).part(2, 0);
  const auto lifted = make_form(fam.product(), 0, ValueKind::Algebra, fam.group(),
                                {{Mask{0}, [x, nb](const Point& pt) { return x(pt.head(nb)); }}});
  std::vector<FormField> args{lifted};
  args.insert(args.end(), static_cast<std::size_t>(r - 1), f20);
  const auto integrand = polynomial_form(p, args);
  const auto on_params = fiber_integrate(integrand, c, q);
  return -r * on_params.component(Mask{0}, s)(0, 0).real();
}

}  // namespace cs
