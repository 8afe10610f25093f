#pragma once

#include "sweep/esp.hpp"
#include "sweep/path.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace sweep::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline std::size_t uniform_index(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline bool coin(Rng& rng, double prob) { return uniform(rng, 0.0, 1.0) < prob; }

/// 0 = t_0 < t_1 < ... with random spacing.
inline std::vector<double> random_grid(Rng& rng, std::size_t n) {
  std::vector<double> grid{0.0};
  for (std::size_t i = 1; i < n; ++i) grid.push_back(grid.back() + uniform(rng, 0.05, 1.0));
  return grid;
}

inline SampledPath random_path_on(Rng& rng, const std::vector<double>& grid, std::size_t dim, double scale = 1.0) {
  std::vector<double> values(grid.size() * dim);
  for (auto& v : values) v = uniform(rng, -scale, scale);
  return SampledPath(grid, std::move(values), dim);
}

/// Random walk with occasional flat stretches, which exercises ties in the
/// p-variation code.
inline SampledPath random_walk_on(Rng& rng, const std::vector<double>& grid, std::size_t dim, double step = 1.0) {
  std::vector<double> values(grid.size() * dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) values[j] = uniform(rng, -step, step);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double inc = coin(rng, 0.15) ? 0.0 : uniform(rng, -step, step);
      values[i * dim + j] = values[(i - 1) * dim + j] + inc;
    }
  }
  return SampledPath(grid, std::move(values), dim);
}

/// Barriers l <= u on `grid`; each (point, component) collapses to l = u
/// with probability `collapse`.
inline BarrierPair random_barriers(Rng& rng, const std::vector<double>& grid, std::size_t dim, double collapse = 0.1,
                                   bool with_witness = false) {
  std::vector<double> lo(grid.size() * dim), hi(grid.size() * dim), mid(grid.size() * dim);
  for (std::size_t k = 0; k < lo.size(); ++k) {
    lo[k] = uniform(rng, -1.5, 0.5);
    hi[k] = coin(rng, collapse) ? lo[k] : lo[k] + uniform(rng, 0.0, 2.0);
    mid[k] = lo[k] + uniform(rng, 0.0, 1.0) * (hi[k] - lo[k]);
  }
  std::optional<SampledPath> h;
  if (with_witness) h = SampledPath(grid, std::move(mid), dim);
  return BarrierPair(SampledPath(grid, std::move(lo), dim), SampledPath(grid, std::move(hi), dim), std::move(h));
}

/// Input path with y_0 inside [l_0, u_0].
inline SampledPath random_input(Rng& rng, const BarrierPair& b, double scale = 2.5) {
  const auto grid = std::vector<double>(b.times().begin(), b.times().end());
  const std::size_t d = b.dim();
  std::vector<double> values(grid.size() * d);
  for (std::size_t j = 0; j < d; ++j) {
    values[j] = b.lower().at(0, j) + uniform(rng, 0.0, 1.0) * (b.upper().at(0, j) - b.lower().at(0, j));
  }
  for (std::size_t k = d; k < values.size(); ++k) values[k] = uniform(rng, -scale, scale);
  return SampledPath(grid, std::move(values), d);
}

/// Exhaustive p-variation: every subdivision of the grid points that keeps
/// both endpoints, 2^(n-2) of them.
inline double brute_force_pvar(const std::vector<Vector>& points, double p) {
  const std::size_t n = points.size();
  if (n < 2) return 0.0;
  const std::size_t inner = n - 2;
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << inner); ++mask) {
    double sum = 0.0;
    std::size_t prev = 0;
    for (std::size_t i = 1; i < n; ++i) {
      if (i == n - 1 || (mask >> (i - 1)) & 1U) {
        sum += std::pow((points[i] - points[prev]).norm(), p);
        prev = i;
      }
    }
    best = std::max(best, sum);
  }
  return best;
}

inline std::vector<Vector> rows_of(const SampledPath& path) {
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < path.size(); ++i) rows.emplace_back(path.value(i));
  return rows;
}

inline bool rel_close(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace sweep::testing
