#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace sweep::detail {

template <typename Dist>
double pvar_dynamic_program(std::size_t n, double p, Dist&& dist) {
  if (n < 2) return 0.0;
  std::vector<double> best(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) {
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < j; ++i) {
      const double candidate = best[i] + std::pow(dist(i, j), p);
      if (candidate > top) top = candidate;
    }
    best[j] = top;
  }
  return best[n - 1];
}

}  // namespace sweep::detail
