#include <algorithm>
#include <bit>
#include <map>
#include <set>

#include "cs/errors.hpp"
#include "cs/forms.hpp"

namespace cs {

int popcount(Mask m) { return std::popcount(m); }

int wedge_sign(Mask a, Mask b) {
  if (a & b) return 0;
  // Each pair (i in a, j in b) with i > j costs one transposition.
  int swaps = 0;
  for (Mask bb = b; bb; bb &= bb - 1) {
    const int j = std::countr_zero(bb);
    swaps += std::popcount(a >> (j + 1));
  }
  return swaps % 2 == 0 ? 1 : -1;
}

std::string mask_to_string(Mask m) {
  if (m == 0) return "1";
  std::string s;
  for (Mask mm = m; mm; mm &= mm - 1) {
    if (!s.empty()) s += "^";
    s += "d" + std::to_string(std::countr_zero(mm));
  }
  return s;
}

std::string_view to_string(ValueKind k) {
  switch (k) {
    case ValueKind::Scalar: return "scalar";
    case ValueKind::Algebra: return "algebra";
    case ValueKind::Matrix: return "matrix";
  }
  return "unknown";
}

Mat FormField::component(Mask m, const Point& x) const {
  auto it = std::lower_bound(masks.begin(), masks.end(), m);
  if (it == masks.end() || *it != m) return zero_value();
  return eval(x)[static_cast<std::size_t>(it - masks.begin())];
}

namespace {

void check_masks(const ModelChart& chart, int degree, const std::vector<Mask>& masks) {
  if (degree < 0 || degree > chart.dim()) {
    throw Error(ErrorKind::DegreeOverflow, "degree " + std::to_string(degree) + " exceeds dimension of " + chart.id());
  }
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (popcount(masks[i]) != degree) {
      throw Error(ErrorKind::DegreeMismatch, "component " + mask_to_string(masks[i]) + " has wrong degree");
    }
    if (masks[i] >> chart.dim()) {
      throw Error(ErrorKind::DimensionMismatch, "component " + mask_to_string(masks[i]) + " outside chart");
    }
    if (i > 0 && masks[i] <= masks[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "components must be distinct");
    }
  }
}

void check_same_chart(const FormField& a, const FormField& b) {
  if (!(a.chart == b.chart)) {
    throw Error(ErrorKind::ChartMismatch, "forms live on " + a.chart.id() + " and " + b.chart.id());
  }
}

// Sorted union of masks plus, for each input, its slot in the union.
std::vector<Mask> merge_masks(const std::vector<Mask>& a, const std::vector<Mask>& b,
                              std::vector<std::size_t>& ia, std::vector<std::size_t>& ib) {
  std::vector<Mask> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  auto slot = [&](Mask m) { return static_cast<std::size_t>(std::lower_bound(out.begin(), out.end(), m) - out.begin()); };
  ia.clear();
  ib.clear();
  for (Mask m : a) ia.push_back(slot(m));
  for (Mask m : b) ib.push_back(slot(m));
  return out;
}

Mat scalar_times(const Mat& s, const Mat& m) { return s(0, 0) * m; }

}  // namespace

FormField make_bulk_form(const ModelChart& chart, int degree, ValueKind kind, GroupId group,
                         std::vector<Mask> masks, Evaluator eval) {
  check_masks(chart, degree, masks);
  FormField f;
  f.chart = chart;
  f.degree = degree;
  f.kind = kind;
  f.group = kind == ValueKind::Scalar ? GroupId::u1() : group;
  f.masks = std::move(masks);
  f.eval = std::move(eval);
  return f;
}

FormField make_form(const ModelChart& chart, int degree, ValueKind kind, GroupId group,
                    std::vector<std::pair<Mask, Coefficient>> components) {
  std::sort(components.begin(), components.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Mask> masks;
  std::vector<Coefficient> coeffs;
  for (auto& [m, c] : components) {
    masks.push_back(m);
    coeffs.push_back(std::move(c));
  }
  return make_bulk_form(chart, degree, kind, group, std::move(masks), [coeffs](const Point& x) {
    std::vector<Mat> out;
    out.reserve(coeffs.size());
    for (const auto& c : coeffs) out.push_back(c(x));
    return out;
  });
}

FormField scalar_form(const ModelChart& chart, int degree,
                      std::vector<std::pair<Mask, ScalarCoefficient>> components) {
  std::vector<std::pair<Mask, Coefficient>> wrapped;
  for (auto& [m, f] : components) {
    wrapped.emplace_back(m, [f](const Point& x) { return Mat::Constant(1, 1, Complex(f(x), 0.0)); });
  }
  return make_form(chart, degree, ValueKind::Scalar, GroupId::u1(), std::move(wrapped));
}

FormField algebra_form(const ModelChart& chart, int degree,
                       std::vector<std::tuple<Mask, ScalarCoefficient, AlgebraElement>> terms) {
  if (terms.empty()) throw Error(ErrorKind::InvalidArgument, "algebra_form needs at least one term");
  const GroupId g = std::get<2>(terms.front()).group();
  std::map<Mask, std::vector<std::pair<ScalarCoefficient, Mat>>> grouped;
  for (auto& [m, f, x] : terms) {
    if (!(x.group() == g)) throw Error(ErrorKind::KindMismatch, "terms mix Lie algebras");
    grouped[m].emplace_back(f, x.matrix());
  }
  std::vector<std::pair<Mask, Coefficient>> comps;
  for (auto& [m, list] : grouped) {
    comps.emplace_back(m, [list, g](const Point& p) {
      Mat out = zero_matrix(g);
      for (const auto& [f, x] : list) out += f(p) * x;
      return out;
    });
  }
  return make_form(chart, degree, ValueKind::Algebra, g, std::move(comps));
}

FormField zero_form(const ModelChart& chart, int degree, ValueKind kind, GroupId group) {
  return make_bulk_form(chart, degree, kind, group, {}, [](const Point&) { return std::vector<Mat>{}; });
}

FormField constant_function(const ModelChart& chart, double c) {
  return scalar_form(chart, 0, {{0u, [c](const Point&) { return c; }}});
}

FormField add(const FormField& a, const FormField& b) {
  check_same_chart(a, b);
  if (a.degree != b.degree) throw Error(ErrorKind::DegreeMismatch, "cannot add forms of different degree");
  if ((a.kind == ValueKind::Scalar) != (b.kind == ValueKind::Scalar) ||
      (a.kind != ValueKind::Scalar && !(a.group == b.group))) {
    throw Error(ErrorKind::KindMismatch, "cannot add forms with different value kinds");
  }
  const ValueKind kind = a.kind == b.kind ? a.kind : ValueKind::Matrix;
  std::vector<std::size_t> ia, ib;
  auto masks = merge_masks(a.masks, b.masks, ia, ib);
  const Mat zero = a.zero_value();
  return make_bulk_form(a.chart, a.degree, kind, a.group, masks,
                        [a, b, ia, ib, zero, n = masks.size()](const Point& x) {
                          std::vector<Mat> out(n, zero);
                          auto va = a.eval(x);
                          auto vb = b.eval(x);
                          for (std::size_t i = 0; i < va.size(); ++i) out[ia[i]] += va[i];
                          for (std::size_t i = 0; i < vb.size(); ++i) out[ib[i]] += vb[i];
                          return out;
                        });
}

FormField scale(const FormField& a, Complex s) {
  const ValueKind kind = (a.kind == ValueKind::Algebra && s.imag() != 0.0) ? ValueKind::Matrix : a.kind;
  return make_bulk_form(a.chart, a.degree, kind, a.group, a.masks, [a, s](const Point& x) {
    auto v = a.eval(x);
    for (auto& m : v) m *= s;
    return v;
  });
}

FormField subtract(const FormField& a, const FormField& b) { return add(a, scale(b, -1.0)); }
FormField operator+(const FormField& a, const FormField& b) { return add(a, b); }
FormField operator-(const FormField& a, const FormField& b) { return subtract(a, b); }
FormField operator*(Complex s, const FormField& a) { return scale(a, s); }

FormField restrict_components(const FormField& a, const std::function<bool(Mask)>& pred) {
  std::vector<Mask> masks;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < a.masks.size(); ++i) {
    if (pred(a.masks[i])) {
      masks.push_back(a.masks[i]);
      keep.push_back(i);
    }
  }
  return make_bulk_form(a.chart, a.degree, a.kind, a.group, masks, [a, keep](const Point& x) {
    auto v = a.eval(x);
    std::vector<Mat> out;
    out.reserve(keep.size());
    for (auto i : keep) out.push_back(v[i]);
    return out;
  });
}

FormField transform_values(const FormField& a, ValueKind kind,
                           std::function<void(const Point&, std::vector<Mat>&)> fn) {
  return make_bulk_form(a.chart, a.degree, kind, a.group, a.masks, [a, fn](const Point& x) {
    auto v = a.eval(x);
    fn(x, v);
    return v;
  });
}

FormField rebase(const FormField& a, const ModelChart& chart) {
  if (chart.dim() != a.chart.dim()) throw Error(ErrorKind::DimensionMismatch, "rebase needs equal dimensions");
  FormField out = a;
  out.chart = chart;
  return out;
}

FormField exterior_derivative(const FormField& w, const QuadratureSpec& q) {
  q.validate();
  const int n = w.chart.dim();
  if (w.degree >= n) {
    throw Error(ErrorKind::DegreeOverflow, "d of a top-degree form on " + w.chart.id());
  }
  struct Term {
    std::size_t out;
    int dir;
    std::size_t in;
    double sign;
  };
  std::map<Mask, std::vector<std::tuple<int, std::size_t, double>>> grouped;
  std::set<int> dirs;
  for (std::size_t k = 0; k < w.masks.size(); ++k) {
    const Mask m = w.masks[k];
    for (int i = 0; i < n; ++i) {
      if (m & bit(i)) continue;
      // dx^i moved past the lower indices of m.
      const double sign = (popcount(m & (bit(i) - 1)) % 2 == 0) ? 1.0 : -1.0;
      grouped[m | bit(i)].emplace_back(i, k, sign);
      dirs.insert(i);
    }
  }
  std::vector<Mask> masks;
  std::vector<Term> terms;
  for (auto& [m, list] : grouped) {
    for (auto& [i, k, s] : list) terms.push_back({masks.size(), i, k, s});
    masks.push_back(m);
  }
  const double h = q.fd_step;
  std::vector<int> dir_list(dirs.begin(), dirs.end());
  const Mat zero = w.zero_value();
  return make_bulk_form(w.chart, w.degree + 1, w.kind, w.group, masks,
                        [w, terms, dir_list, h, zero, nout = masks.size(), n](const Point& x) {
                          // Fourth-order central stencil per direction.
                          std::vector<std::vector<Mat>> deriv(static_cast<std::size_t>(n));
                          for (int i : dir_list) {
                            Point p = x;
                            p(i) = x(i) + h;
                            auto f1 = w.eval(p);
                            p(i) = x(i) - h;
                            auto fm1 = w.eval(p);
                            p(i) = x(i) + 2.0 * h;
                            auto f2 = w.eval(p);
                            p(i) = x(i) - 2.0 * h;
                            auto fm2 = w.eval(p);
                            auto& d = deriv[static_cast<std::size_t>(i)];
                            d.resize(f1.size());
                            for (std::size_t k = 0; k < f1.size(); ++k) {
                              d[k] = (8.0 * (f1[k] - fm1[k]) - (f2[k] - fm2[k])) / (12.0 * h);
                            }
                          }
                          std::vector<Mat> out(nout, zero);
                          for (const auto& t : terms) out[t.out] += t.sign * deriv[static_cast<std::size_t>(t.dir)][t.in];
                          return out;
                        });
}

PolynomialPlan plan_products(const std::vector<std::vector<Mask>>& factor_masks) {
  std::map<Mask, std::vector<std::pair<std::vector<std::size_t>, double>>> grouped;
  std::vector<std::size_t> slots(factor_masks.size());
  std::function<void(std::size_t, Mask, int)> rec = [&](std::size_t level, Mask acc, int sign) {
    if (level == factor_masks.size()) {
      grouped[acc].emplace_back(slots, static_cast<double>(sign));
      return;
    }
    const auto& ms = factor_masks[level];
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const int s = wedge_sign(acc, ms[k]);
      if (s == 0) continue;
      slots[level] = k;
      rec(level + 1, acc | ms[k], sign * s);
    }
  };
  rec(0, 0u, 1);
  PolynomialPlan plan;
  for (auto& [m, list] : grouped) {
    for (auto& [sl, s] : list) plan.terms.push_back({plan.masks.size(), sl, s});
    plan.masks.push_back(m);
  }
  return plan;
}

PolynomialPlan restrict_plan(const PolynomialPlan& plan, const std::function<bool(Mask)>& keep) {
  if (!keep) return plan;
  PolynomialPlan out;
  std::vector<std::size_t> index(plan.masks.size(), plan.masks.size());
  for (std::size_t k = 0; k < plan.masks.size(); ++k) {
    if (!keep(plan.masks[k])) continue;
    index[k] = out.masks.size();
    out.masks.push_back(plan.masks[k]);
  }
  for (const auto& t : plan.terms) {
    if (index[t.out] != plan.masks.size()) out.terms.push_back({index[t.out], t.slots, t.sign});
  }
  return out;
}

std::vector<Complex> evaluate_plan(const PolynomialPlan& plan, Complex normalization,
                                   const std::vector<const std::vector<Mat>*>& factor_values) {
  std::vector<Complex> out(plan.masks.size(), Complex(0.0, 0.0));
  std::vector<Mat> slot(factor_values.size());
  for (const auto& t : plan.terms) {
    for (std::size_t k = 0; k < factor_values.size(); ++k) slot[k] = (*factor_values[k])[t.slots[k]];
    out[t.out] += t.sign * symmetrized_trace(normalization, slot);
  }
  return out;
}

namespace {

PolynomialPlan product_terms(const std::vector<const FormField*>& fs) {
  std::vector<std::vector<Mask>> ms;
  for (const auto* f : fs) ms.push_back(f->masks);
  return plan_products(ms);
}

}  // namespace

FormField wedge(const FormField& a, const FormField& b, WedgeMode mode) {
  check_same_chart(a, b);
  if (a.degree + b.degree > a.chart.dim()) {
    throw Error(ErrorKind::DegreeOverflow, "wedge degree exceeds dimension of " + a.chart.id());
  }
  if (mode == WedgeMode::PolynomialSlot) {
    return polynomial_form(InvariantPolynomial::standard(2), {a, b});
  }
  const bool sa = a.kind == ValueKind::Scalar;
  const bool sb = b.kind == ValueKind::Scalar;
  if (!sa && !sb && !(a.group == b.group)) throw Error(ErrorKind::KindMismatch, "forms take values in different groups");
  ValueKind kind;
  GroupId group = sa ? b.group : a.group;
  if (mode == WedgeMode::LieBracket) {
    if (a.kind != ValueKind::Algebra || b.kind != ValueKind::Algebra) {
      throw Error(ErrorKind::KindMismatch, "Lie bracket needs algebra-valued forms");
    }
    kind = ValueKind::Algebra;
  } else if (sa && sb) {
    kind = ValueKind::Scalar;
  } else if (sa) {
    kind = b.kind;
  } else if (sb) {
    kind = a.kind;
  } else {
    kind = ValueKind::Matrix;
  }
  auto plan = product_terms({&a, &b});
  const auto& masks = plan.masks;
  const int n = kind == ValueKind::Scalar ? 1 : group.matrix_size();
  const Mat zero = Mat::Zero(n, n);
  return make_bulk_form(a.chart, a.degree + b.degree, kind, group, masks,
                        [a, b, terms = plan.terms, zero, mode, sa, sb, nout = masks.size()](const Point& x) {
                          auto va = a.eval(x);
                          auto vb = b.eval(x);
                          std::vector<Mat> out(nout, zero);
                          for (const auto& t : terms) {
                            const Mat& u = va[t.slots[0]];
                            const Mat& v = vb[t.slots[1]];
                            if (mode == WedgeMode::LieBracket) {
                              out[t.out] += t.sign * (u * v - v * u);
                            } else if (sa) {
                              out[t.out] += t.sign * scalar_times(u, v);
                            } else if (sb) {
                              out[t.out] += t.sign * scalar_times(v, u);
                            } else {
                              out[t.out] += t.sign * (u * v);
                            }
                          }
                          return out;
                        });
}

FormField polynomial_form(const InvariantPolynomial& p, const std::vector<FormField>& args,
                          const std::function<bool(Mask)>& keep) {
  if (static_cast<int>(args.size()) != p.degree) {
    throw Error(ErrorKind::ArityMismatch, "polynomial of degree " + std::to_string(p.degree) + " given " +
                                              std::to_string(args.size()) + " forms");
  }
  int degree = 0;
  std::vector<const FormField*> ptrs;
  for (const auto& f : args) {
    check_same_chart(args.front(), f);
    if (f.kind == ValueKind::Scalar || !(f.group == args.front().group)) {
      throw Error(ErrorKind::KindMismatch, "polynomial slots need forms valued in one Lie algebra");
    }
    degree += f.degree;
    ptrs.push_back(&f);
  }
  const auto& chart = args.front().chart;
  if (degree > chart.dim()) throw Error(ErrorKind::DegreeOverflow, "polynomial degree exceeds dimension of " + chart.id());
  auto plan = restrict_plan(product_terms(ptrs), keep);
  const Complex norm = p.normalization;
  const auto masks = plan.masks;
  return make_bulk_form(chart, degree, ValueKind::Scalar, GroupId::u1(), masks,
                        [args, plan = std::move(plan), norm](const Point& x) {
                          std::vector<std::vector<Mat>> vals;
                          vals.reserve(args.size());
                          for (const auto& f : args) vals.push_back(f.eval(x));
                          std::vector<const std::vector<Mat>*> ptrs;
                          for (const auto& v : vals) ptrs.push_back(&v);
                          std::vector<Mat> out;
                          for (const Complex c : evaluate_plan(plan, norm, ptrs)) out.push_back(Mat::Constant(1, 1, c));
                          return out;
                        });
}

FormField interior(const VectorField& v, const FormField& w) {
  if (w.degree == 0) throw Error(ErrorKind::DegreeMismatch, "interior product of a function");
  std::map<Mask, std::vector<std::tuple<int, std::size_t, double>>> grouped;
  for (std::size_t k = 0; k < w.masks.size(); ++k) {
    const Mask m = w.masks[k];
    int pos = 0;
    for (Mask mm = m; mm; mm &= mm - 1, ++pos) {
      const int i = std::countr_zero(mm);
      grouped[m & ~bit(i)].emplace_back(i, k, pos % 2 == 0 ? 1.0 : -1.0);
    }
  }
  std::vector<Mask> masks;
  std::vector<std::tuple<std::size_t, int, std::size_t, double>> terms;
  for (auto& [m, list] : grouped) {
    for (auto& [i, k, s] : list) terms.emplace_back(masks.size(), i, k, s);
    masks.push_back(m);
  }
  const Mat zero = w.zero_value();
  return make_bulk_form(w.chart, w.degree - 1, w.kind, w.group, masks,
                        [v, w, terms, zero, nout = masks.size()](const Point& x) {
                          const Point vx = v(x);
                          auto vals = w.eval(x);
                          std::vector<Mat> out(nout, zero);
                          for (const auto& [o, i, k, s] : terms) out[o] += (s * vx(i)) * vals[k];
                          return out;
                        });
}

namespace {

// Linear part of the affine gluing map taking polygon edge e onto its partner.
Eigen::Matrix2d polygon_gluing(const ModelChart& c, const Point& a) {
  const int n = 4 * c.genus();
  int edge = -1;
  double best = 1e300;
  for (int e = 0; e < n; ++e) {
    const Point v0 = c.polygon_vertex(e), v1 = c.polygon_vertex(e + 1);
    const Point d = v1 - v0;
    const double t = std::clamp((a - v0).dot(d) / d.squaredNorm(), 0.0, 1.0);
    const double dist = (v0 + t * d - a).norm();
    if (dist < best) {
      best = dist;
      edge = e;
    }
  }
  const int partner = (edge % 4) < 2 ? edge + 2 : edge - 2;
  auto frame = [&](int e) {
    const Point d = (c.polygon_vertex(e + 1) - c.polygon_vertex(e)).normalized();
    Eigen::Matrix2d f;
    f << d(0), d(1), d(1), -d(0);  // columns: direction, outward normal
    return f;
  };
  // Direction reverses and outward normal becomes inward normal.
  return -frame(partner) * frame(edge).inverse();
}

}  // namespace

double identification_defect(const FormField& w, int samples, std::uint64_t seed) {
  double worst = 0.0;
  for (const auto& [a, b] : w.chart.identified_pairs(samples, seed)) {
    auto va = w.eval(a);
    auto vb = w.eval(b);
    if (w.chart.kind() == ChartKind::CubeS3 && w.degree > 0) {
      // Everything at the collapsed boundary is one point, so positive-degree
      // forms must vanish there.
      for (std::size_t k = 0; k < va.size(); ++k) worst = std::max({worst, va[k].norm(), vb[k].norm()});
      continue;
    }
    if (w.chart.kind() == ChartKind::Polygon && w.degree == 1) {
      const Eigen::Matrix2d l = polygon_gluing(w.chart, a);
      auto comp = [&](const std::vector<Mat>& v, Mask m) {
        auto it = std::lower_bound(w.masks.begin(), w.masks.end(), m);
        return (it == w.masks.end() || *it != m) ? w.zero_value() : v[static_cast<std::size_t>(it - w.masks.begin())];
      };
      for (int i = 0; i < 2; ++i) {
        Mat pulled = l(0, i) * comp(vb, bit(0)) + l(1, i) * comp(vb, bit(1));
        worst = std::max(worst, (comp(va, bit(i)) - pulled).norm());
      }
      continue;
    }
    for (std::size_t k = 0; k < va.size(); ++k) worst = std::max(worst, (va[k] - vb[k]).norm());
  }
  return worst;
}

double algebra_defect(const FormField& w, const std::vector<Point>& samples) {
  if (w.kind != ValueKind::Algebra) return 0.0;
  double worst = 0.0;
  for (const auto& x : samples) {
    for (const auto& v : w.eval(x)) worst = std::max(worst, (v - project_to_algebra(w.group, v)).norm());
  }
  return worst;
}

}  // namespace cs
