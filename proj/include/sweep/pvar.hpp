#pragma once

#include "sweep/path.hpp"

#include <optional>

namespace sweep {

/// p-variation of a path over [a, b].
///   value    = sup over subdivisions of sum |x_{t_i} - x_{t_{i-1}}|^p
///   norm     = value^(1/p)
///   bar_norm = norm + |x_a|
struct VariationResult {
  double p = 1.0;
  double value = 0.0;
  double norm = 0.0;
  double bar_norm = 0.0;
  Interval interval;
};

struct PVarOptions {
  /// Largest point set handed to the O(n^2) dynamic program; larger inputs
  /// raise NumericalError instead of being approximated.
  std::size_t max_points = 20000;
};

/// Exact p-variation of a step path. When the interval is omitted it is
/// [0, last grid time]. Interval endpoints that are not grid points are
/// inserted with their càdlàg values.
VariationResult p_variation(const SampledPath& path, double p, std::optional<Interval> interval = {},
                            const PVarOptions& options = {});

/// Matrix-valued variant; increments are measured in the operator norm.
VariationResult p_variation(const MatrixPath& path, double p, std::optional<Interval> interval = {},
                            const PVarOptions& options = {});

/// p-variation over the half-open interval [a, b): the grid points strictly
/// below b plus the left limit at b, which for a step path is the value at
/// the last grid point below b.
VariationResult p_variation_half_open(const MatrixPath& path, double p, Interval interval,
                                      const PVarOptions& options = {});

/// Shorthands for bar V_p over [0, T].
double bar_pvar(const SampledPath& path, double p, double horizon);
double bar_pvar(const SampledPath& path, double p);

/// sup over grid pairs s, t <= horizon of |x_t - x_s|.
double oscillation(const SampledPath& path, double horizon);

struct InterpolationBound {
  double lhs = 0.0;  ///< V_{p+eps}(x)_T
  double rhs = 0.0;  ///< Osc(x)_T^{1 - p/(p+eps)} * V_p(x)_T^{p/(p+eps)}
};

/// Interpolation between oscillation and p-variation; lhs <= rhs holds for
/// every path.
InterpolationBound interpolation_bound(const SampledPath& path, double p, double eps, double horizon);

namespace detail {

/// Dynamic program over an ordered point set with endpoints fixed:
/// best[j] = max_{i<j} best[i] + dist(i, j)^p. Returns best[n-1].
template <typename Dist>
double pvar_dynamic_program(std::size_t n, double p, Dist&& dist);

/// Scalar sequence p-variation sum, after dropping points that are not
/// local extrema (exact for p >= 1).
double scalar_pvar_sum(std::span<const double> values, double p, std::size_t max_points);

}  // namespace detail

}  // namespace sweep

#include "sweep/detail/pvar_dp.hpp"
