#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include "cs/errors.hpp"
#include "cs/forms.hpp"

namespace cs {

namespace {

Point point_from(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) p(i++) = x;
  return p;
}

bool on_cube_boundary(const Point& p, double tol) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) <= tol || p(i) >= 1.0 - tol) return true;
  }
  return false;
}

}  // namespace

ModelChart ModelChart::torus(int n) {
  if (n < 1 || n > 4) throw Error(ErrorKind::InvalidArgument, "torus dimension must be 1..4");
  ModelChart c;
  c.kind_ = ChartKind::Torus;
  c.dim_ = n;
  c.id_ = "torus" + std::to_string(n);
  c.lo_.assign(static_cast<std::size_t>(n), 0.0);
  c.hi_.assign(static_cast<std::size_t>(n), 1.0);
  return c;
}

ModelChart ModelChart::polygon(int genus) {
  if (genus < 1 || genus > 3) throw Error(ErrorKind::InvalidArgument, "polygon genus must be 1..3");
  ModelChart c;
  c.kind_ = ChartKind::Polygon;
  c.dim_ = 2;
  c.genus_ = genus;
  c.id_ = "polygon(" + std::to_string(genus) + ")";
  c.lo_ = {-1.0, -1.0};
  c.hi_ = {1.0, 1.0};
  return c;
}

ModelChart ModelChart::cube_s3() {
  ModelChart c;
  c.kind_ = ChartKind::CubeS3;
  c.dim_ = 3;
  c.id_ = "cubes3";
  c.lo_ = {0.0, 0.0, 0.0};
  c.hi_ = {1.0, 1.0, 1.0};
  return c;
}

ModelChart ModelChart::box(std::vector<double> lo, std::vector<double> hi, std::string label) {
  if (lo.size() != hi.size() || lo.empty() || lo.size() > static_cast<std::size_t>(kMaxChartDim)) {
    throw Error(ErrorKind::InvalidArgument, "box bounds must have equal length 1..8");
  }
  ModelChart c;
  c.kind_ = ChartKind::Box;
  c.dim_ = static_cast<int>(lo.size());
  c.id_ = label + "(" + std::to_string(c.dim_) + ")";
  c.lo_ = std::move(lo);
  c.hi_ = std::move(hi);
  return c;
}

ModelChart ModelChart::product(const ModelChart& base, const ModelChart& fiber) {
  if (base.dim_ + fiber.dim_ > kMaxChartDim) {
    throw Error(ErrorKind::InvalidArgument, "product chart exceeds the maximal dimension");
  }
  ModelChart c;
  c.kind_ = ChartKind::Product;
  c.dim_ = base.dim_ + fiber.dim_;
  c.id_ = base.id_ + " x " + fiber.id_;
  c.lo_ = base.lo_;
  c.lo_.insert(c.lo_.end(), fiber.lo_.begin(), fiber.lo_.end());
  c.hi_ = base.hi_;
  c.hi_.insert(c.hi_.end(), fiber.hi_.begin(), fiber.hi_.end());
  c.base_ = std::make_shared<const ModelChart>(base);
  c.fiber_ = std::make_shared<const ModelChart>(fiber);
  return c;
}

const ModelChart& ModelChart::base() const {
  if (!base_) throw Error(ErrorKind::InvalidArgument, "chart " + id_ + " is not a product");
  return *base_;
}

const ModelChart& ModelChart::fiber() const {
  if (!fiber_) throw Error(ErrorKind::InvalidArgument, "chart " + id_ + " is not a product");
  return *fiber_;
}

Point ModelChart::polygon_vertex(int k) const {
  if (kind_ != ChartKind::Polygon) throw Error(ErrorKind::InvalidArgument, "not a polygon chart");
  const int n = 4 * genus_;
  const int kk = ((k % n) + n) % n;
  const double theta = std::numbers::pi * (2.0 * kk + 1.0) / n;
  return point_from({std::cos(theta), std::sin(theta)});
}

namespace {

// Parameter t in [0,1] of p on polygon edge e, if p lies on it.
std::optional<double> edge_parameter(const ModelChart& c, const Point& p, int e, double tol) {
  const Point a = c.polygon_vertex(e);
  const Point b = c.polygon_vertex(e + 1);
  const Point d = b - a;
  const double t = (p - a).dot(d) / d.squaredNorm();
  if (t < -tol || t > 1.0 + tol) return std::nullopt;
  if ((a + t * d - p).norm() > tol) return std::nullopt;
  return t;
}

// Polygon edges are paired as e <-> e+2 within each block of four, reversed.
int paired_edge(int e) { return (e % 4) < 2 ? e + 2 : e - 2; }

}  // namespace

bool ModelChart::same_point(const Point& a, const Point& b, double tol) const {
  if (a.size() != dim_ || b.size() != dim_) {
    throw Error(ErrorKind::DimensionMismatch, "point dimension does not match chart " + id_);
  }
  if ((a - b).norm() <= tol) return true;
  switch (kind_) {
    case ChartKind::Box:
      return false;
    case ChartKind::Torus:
      for (int i = 0; i < dim_; ++i) {
        const double d = a(i) - b(i);
        if (std::abs(d - std::round(d)) > tol) return false;
      }
      return true;
    case ChartKind::CubeS3:
      return on_cube_boundary(a, tol) && on_cube_boundary(b, tol);
    case ChartKind::Polygon: {
      const int n = 4 * genus_;
      auto near_vertex = [&](const Point& p) {
        for (int k = 0; k < n; ++k) {
          if ((p - polygon_vertex(k)).norm() <= tol) return true;
        }
        return false;
      };
      if (near_vertex(a) && near_vertex(b)) return true;
      for (int e = 0; e < n; ++e) {
        auto ta = edge_parameter(*this, a, e, tol);
        if (!ta) continue;
        auto tb = edge_parameter(*this, b, paired_edge(e), tol);
        if (tb && std::abs(*ta + *tb - 1.0) <= tol) return true;
      }
      return false;
    }
    case ChartKind::Product: {
      const int nb = base_->dim();
      return base_->same_point(a.head(nb), b.head(nb), tol) &&
             fiber_->same_point(a.tail(dim_ - nb), b.tail(dim_ - nb), tol);
    }
  }
  return false;
}

std::vector<std::pair<Point, Point>> ModelChart::identified_pairs(int samples, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::pair<Point, Point>> out;
  switch (kind_) {
    case ChartKind::Box:
      break;
    case ChartKind::Torus:
      for (int s = 0; s < samples; ++s) {
        Point a(dim_);
        for (int i = 0; i < dim_; ++i) a(i) = unit(rng);
        const int axis = s % dim_;
        a(axis) = 0.0;
        Point b = a;
        b(axis) = 1.0;
        out.emplace_back(a, b);
      }
      break;
    case ChartKind::CubeS3:
      for (int s = 0; s < samples; ++s) {
        Point a(3), b(3);
        for (int i = 0; i < 3; ++i) {
          a(i) = unit(rng);
          b(i) = unit(rng);
        }
        a(s % 3) = (s / 3) % 2 == 0 ? 0.0 : 1.0;
        b((s + 1) % 3) = (s / 2) % 2 == 0 ? 1.0 : 0.0;
        out.emplace_back(a, b);
      }
      break;
    case ChartKind::Polygon:
      for (int s = 0; s < samples; ++s) {
        const int pair = s % (2 * genus_);
        const int e = 4 * (pair / 2) + pair % 2;
        const double t = unit(rng);
        const Point v0 = polygon_vertex(e), v1 = polygon_vertex(e + 1);
        const Point w0 = polygon_vertex(e + 2), w1 = polygon_vertex(e + 3);
        out.emplace_back(v0 + t * (v1 - v0), w0 + (1.0 - t) * (w1 - w0));
      }
      break;
    case ChartKind::Product: {
      auto random_in = [&](const ModelChart& c) {
        Point p(c.dim());
        for (int i = 0; i < c.dim(); ++i) {
          p(i) = c.lower()[static_cast<std::size_t>(i)] +
                 unit(rng) * (c.upper()[static_cast<std::size_t>(i)] - c.lower()[static_cast<std::size_t>(i)]);
        }
        return p;
      };
      for (auto& [a, b] : base_->identified_pairs(samples, seed)) {
        Point f = random_in(*fiber_);
        Point pa(dim_), pb(dim_);
        pa << a, f;
        pb << b, f;
        out.emplace_back(pa, pb);
      }
      for (auto& [a, b] : fiber_->identified_pairs(samples, seed + 1)) {
        Point x = random_in(*base_);
        Point pa(dim_), pb(dim_);
        pa << x, a;
        pb << x, b;
        out.emplace_back(pa, pb);
      }
      break;
    }
  }
  return out;
}

}  // namespace cs
