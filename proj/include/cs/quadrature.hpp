#pragma once

#include <span>
#include <vector>

namespace cs {

struct QuadratureSpec {
  int order = 16;         // Gauss-Legendre nodes per axis
  double fd_step = 1e-5;  // finite-difference step

  void validate() const;  // order >= 2, 1e-9 <= fd_step <= 1e-3
};

struct GaussRule {
  std::vector<double> nodes;    // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

// Gauss-Legendre rule on [0,1]; cached per order.
const GaussRule& gauss_legendre(int order);

}  // namespace cs
