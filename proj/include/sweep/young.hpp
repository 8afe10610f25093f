#pragma once

#include "sweep/path.hpp"
#include "sweep/pvar.hpp"

#include <optional>
#include <utility>

namespace sweep {

/// Riemann zeta at s > 1, by direct summation with an Euler-Maclaurin tail.
double riemann_zeta(double s);

/// C_{p,q} = zeta(1/p + 1/q). Requires 1/p + 1/q > 1.
double zeta_constant(double p, double q);

/// Left-point Stieltjes sums of a matrix path against a vector path:
///   I(t) = sum_{a < t_i <= min(t, b)} w(t_{i-1}) (z(t_i) - z(t_{i-1})).
/// The result lives on the common grid, is zero up to a and constant after
/// b. For step paths this is the exact integral of w_{s-} dz_s.
SampledPath young_integral(const MatrixPath& w, const SampledPath& z, std::optional<Interval> interval = {});

/// Same sum with a vector integrand and a scalar integrator,
/// I(t) = sum w(t_{i-1}) (a(t_i) - a(t_{i-1})).
SampledPath stieltjes_integral(const SampledPath& w, const SampledPath& a, std::optional<Interval> interval = {});

/// Resamples both paths onto the union of their grids.
std::pair<MatrixPath, SampledPath> merge_grids(const MatrixPath& w, const SampledPath& z);

struct YoungBound {
  double p = 0.0;
  double q = 0.0;
  double c_pq = 0.0;   ///< zeta(1/p + 1/q)
  double vq_w = 0.0;   ///< bar V_q(w) over [a, b)
  double vp_z = 0.0;   ///< V_p(z) over [a, b]
  double bound = 0.0;  ///< c_pq * vq_w * vp_z
  double lhs = 0.0;    ///< measured V_p of the integral over [a, b]

  bool holds(double slack = 1e-12) const { return lhs <= bound * (1.0 + slack) + slack; }
};

/// Measures V_p(int w dz) against the Young-Loeve bound.
YoungBound young_loeve_check(const MatrixPath& w, const SampledPath& z, double p, double q,
                             std::optional<Interval> interval = {});

}  // namespace sweep
