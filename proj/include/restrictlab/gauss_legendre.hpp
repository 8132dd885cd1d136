#pragma once

#include <cstddef>
#include <vector>

namespace restrictlab {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;  // sum to 2
};

// n-point rule by Newton iteration on P_n; results are cached per n.
const GaussLegendreRule& gauss_legendre(std::size_t n);

}  // namespace restrictlab
