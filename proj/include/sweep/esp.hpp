#pragma once

#include "sweep/path.hpp"

#include <optional>
#include <string>

namespace sweep {

/// Lower/upper barriers l <= u on a common grid, with an optional witness
/// path h satisfying l <= h <= u.
class BarrierPair {
 public:
  BarrierPair() = default;
  BarrierPair(SampledPath lower, SampledPath upper, std::optional<SampledPath> witness = {});

  /// Constant box [lower, upper] on the given grid.
  static BarrierPair constant(std::vector<double> grid, const Vector& lower, const Vector& upper);

  const SampledPath& lower() const { return lower_; }
  const SampledPath& upper() const { return upper_; }
  const std::optional<SampledPath>& witness() const { return witness_; }
  std::size_t dim() const { return lower_.dim(); }
  std::span<const double> times() const { return lower_.times(); }

  /// Barriers (and witness) resampled onto another grid.
  BarrierPair resampled(std::span<const double> grid) const;

 private:
  SampledPath lower_;
  SampledPath upper_;
  std::optional<SampledPath> witness_;
};

/// (x, k) = ESP(y, l, u) on the grid of y.
struct EspSolution {
  SampledPath x;  ///< constrained path, x = y + k in [l, u]
  SampledPath k;  ///< regulator, k_0 = 0
  SampledPath y;  ///< input
};

/// Componentwise projection of x_prev + dy onto [l, u].
Vector projection_step(const Vector& x_prev, const Vector& dy, const Vector& lower, const Vector& upper);

/// Extended Skorokhod problem for step inputs:
///   K_0 = 0,  K_i = max(min(K_{i-1}, U_i - Y_i), L_i - Y_i),  X_i = Y_i + K_i.
/// Barriers must share the grid of y.
EspSolution esp_solve(const SampledPath& y, const BarrierPair& barriers);

struct VerifyOptions {
  double tol = 1e-12;  ///< absolute, scaled by 1 + max(|y|, |l|, |u|)
  double gap = 1e-8;   ///< complementarity sums only where u - l exceeds this
};

struct VerificationReport {
  bool passed = true;
  std::optional<std::size_t> index;  ///< first violating grid index
  std::size_t component = 0;
  std::string reason;

  explicit operator bool() const { return passed; }
};

/// Checks the ESP conditions on a candidate solution: x = y + k, l <= x <= u,
/// k_0 = 0, k moves up only at l and down only at u, and the discrete
/// complementarity sums  sum (x - l) dk <= 0,  sum (x - u) dk <= 0  over every
/// grid subinterval on which the barriers stay apart.
VerificationReport verify_esp(const EspSolution& sol, const BarrierPair& barriers, const VerifyOptions& options = {});

struct LipschitzGap {
  double lhs_k = 0.0;  ///< bar V_p(k1 - k2)_T
  double lhs_x = 0.0;  ///< bar V_p(x1 - x2)_T
  double rhs = 0.0;    ///< bar V_p(y1 - y2)_T
};

/// p-variation distances between the ESP solutions of two inputs under the
/// same barriers. Expected: lhs_k <= d rhs, lhs_x <= (d + 1) rhs, and
/// lhs_k <= rhs when d = 1.
LipschitzGap esp_lipschitz_gap(const SampledPath& y1, const SampledPath& y2, const BarrierPair& barriers, double p);

struct SupNormGap {
  double sup_x_gap = 0.0;
  double sup_k_gap = 0.0;
  double sup_y_gap = 0.0;
  double sup_barrier_gap = 0.0;  ///< sup max(|l - l'|, |u - u'|)

  double rhs_x() const { return 2.0 * sup_y_gap + sup_barrier_gap; }
  double rhs_k() const { return sup_y_gap + sup_barrier_gap; }
  bool holds(double slack = 1e-12) const {
    return sup_x_gap <= rhs_x() + slack && sup_k_gap <= rhs_k() + slack;
  }
};

/// Sup-norm stability of the ESP under perturbation of both input and
/// barriers. Norms are max-abs over components; all four paths are merged
/// onto a common grid first.
SupNormGap esp_supnorm_gap(const SampledPath& y1, const SampledPath& y2, const BarrierPair& b1,
                           const BarrierPair& b2);

}  // namespace sweep
