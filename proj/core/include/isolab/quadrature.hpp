#pragma once

#include <vector>

namespace isolab {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of order n >= 1, from Newton iteration on the Legendre recurrence.
GaussLegendreRule gauss_legendre(int n);

}  // namespace isolab
