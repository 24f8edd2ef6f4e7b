#include "cs/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

#include "cs/errors.hpp"

namespace cs {

void QuadratureSpec::validate() const {
  if (order < 2) throw Error(ErrorKind::InvalidArgument, "quadrature order must be >= 2");
  if (!(fd_step >= 1e-9 && fd_step <= 1e-3)) {
    throw Error(ErrorKind::InvalidArgument, "finite-difference step must lie in [1e-9, 1e-3]");
  }
}

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // Map [-1,1] -> [0,1].
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - x);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + x);
    rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) throw Error(ErrorKind::InvalidArgument, "Gauss rule needs at least one node");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_rule(order)).first;
  return it->second;
}

}  // namespace cs
