#include "sweep/esp.hpp"

#include "sweep/pvar.hpp"

#include <algorithm>
#include <cmath>

namespace sweep {

namespace {

void check_same_grid(const SampledPath& a, const SampledPath& b, const char* what) {
  if (!a.same_grid(b)) throw ValidationError(std::string(what) + " must share the barrier grid");
  if (a.dim() != b.dim()) throw ValidationError(std::string(what) + " dimension differs from the barriers");
}

std::string at_index(std::size_t i, std::size_t j) {
  return " at grid index " + std::to_string(i) + ", component " + std::to_string(j);
}

}  // namespace

BarrierPair::BarrierPair(SampledPath lower, SampledPath upper, std::optional<SampledPath> witness)
    : lower_(std::move(lower)), upper_(std::move(upper)), witness_(std::move(witness)) {
  check_same_grid(upper_, lower_, "upper barrier");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    for (std::size_t j = 0; j < lower_.dim(); ++j) {
      if (lower_.at(i, j) > upper_.at(i, j)) throw ValidationError("barrier crossing l > u" + at_index(i, j));
    }
  }
  if (witness_) {
    check_same_grid(*witness_, lower_, "witness path");
    for (std::size_t i = 0; i < lower_.size(); ++i) {
      for (std::size_t j = 0; j < lower_.dim(); ++j) {
        const double h = witness_->at(i, j);
        if (h < lower_.at(i, j) || h > upper_.at(i, j)) {
          throw ValidationError("witness leaves [l, u]" + at_index(i, j));
        }
      }
    }
  }
}

BarrierPair BarrierPair::constant(std::vector<double> grid, const Vector& lower, const Vector& upper) {
  auto l = SampledPath::constant(grid, lower);
  auto u = SampledPath::constant(std::move(grid), upper);
  return BarrierPair(std::move(l), std::move(u));
}

BarrierPair BarrierPair::resampled(std::span<const double> grid) const {
  std::optional<SampledPath> h;
  if (witness_) h = resample(*witness_, grid);
  return BarrierPair(resample(lower_, grid), resample(upper_, grid), std::move(h));
}

Vector projection_step(const Vector& x_prev, const Vector& dy, const Vector& lower, const Vector& upper) {
  if (x_prev.size() != dy.size() || lower.size() != dy.size() || upper.size() != dy.size()) {
    throw ValidationError("projection_step dimension mismatch");
  }
  Vector out(dy.size());
  for (Eigen::Index j = 0; j < dy.size(); ++j) {
    if (lower[j] > upper[j]) throw ValidationError("projection onto an empty box (l > u)");
    out[j] = std::max(std::min(x_prev[j] + dy[j], upper[j]), lower[j]);
  }
  return out;
}

EspSolution esp_solve(const SampledPath& y, const BarrierPair& barriers) {
  check_same_grid(y, barriers.lower(), "input path");
  const auto& l = barriers.lower();
  const auto& u = barriers.upper();
  const std::size_t d = y.dim();
  for (std::size_t j = 0; j < d; ++j) {
    if (y.at(0, j) < l.at(0, j) || y.at(0, j) > u.at(0, j)) {
      throw ValidationError("initial condition violated: y_0 outside [l_0, u_0]" + at_index(0, j));
    }
  }
  std::vector<double> k(y.size() * d, 0.0);
  std::vector<double> x(y.size() * d, 0.0);
  for (std::size_t j = 0; j < d; ++j) x[j] = y.at(0, j);
  for (std::size_t i = 1; i < y.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double yi = y.at(i, j);
      const double ki = std::max(std::min(k[(i - 1) * d + j], u.at(i, j) - yi), l.at(i, j) - yi);
      k[i * d + j] = ki;
      x[i * d + j] = std::clamp(yi + ki, l.at(i, j), u.at(i, j));
    }
  }
  std::vector<double> times(y.times().begin(), y.times().end());
  return EspSolution{SampledPath(times, std::move(x), d), SampledPath(times, std::move(k), d), y};
}

VerificationReport verify_esp(const EspSolution& sol, const BarrierPair& barriers, const VerifyOptions& options) {
  const auto& l = barriers.lower();
  const auto& u = barriers.upper();
  const auto& x = sol.x;
  const auto& k = sol.k;
  const auto& y = sol.y;
  VerificationReport report;
  auto fail = [&](std::size_t i, std::size_t j, std::string why) {
    report.passed = false;
    report.index = i;
    report.component = j;
    report.reason = std::move(why) + at_index(i, j);
    return report;
  };
  if (!x.same_grid(l) || !k.same_grid(l) || !y.same_grid(l) || x.dim() != l.dim() || k.dim() != l.dim() ||
      y.dim() != l.dim()) {
    report.passed = false;
    report.reason = "solution and barriers are not on a common grid";
    return report;
  }
  const double scale = 1.0 + std::max({sup_norm_inf(y), sup_norm_inf(l), sup_norm_inf(u)});
  const double tol = options.tol * scale;
  const std::size_t d = x.dim();

  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double xi = x.at(i, j);
      if (std::abs(xi - (y.at(i, j) + k.at(i, j))) > tol) return fail(i, j, "x != y + k");
      if (xi < l.at(i, j) - tol) return fail(i, j, "x below the lower barrier");
      if (xi > u.at(i, j) + tol) return fail(i, j, "x above the upper barrier");
      if (i == 0) {
        if (std::abs(k.at(0, j)) > tol) return fail(0, j, "k_0 != 0");
        continue;
      }
      const double dk = k.at(i, j) - k.at(i - 1, j);
      if (dk > tol && xi - l.at(i, j) > tol) return fail(i, j, "regulator pushes up away from the lower barrier");
      if (dk < -tol && u.at(i, j) - xi > tol) return fail(i, j, "regulator pushes down away from the upper barrier");
    }
  }

  // Largest sum of (x - b) dk over contiguous grid runs where u - l > gap.
  for (std::size_t j = 0; j < d; ++j) {
    for (int side = 0; side < 2; ++side) {
      const SampledPath& barrier = side == 0 ? l : u;
      double run = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (u.at(i, j) - l.at(i, j) <= options.gap) {
          run = 0.0;
          continue;
        }
        const double dk = i == 0 ? 0.0 : k.at(i, j) - k.at(i - 1, j);
        const double term = (x.at(i, j) - barrier.at(i, j)) * dk;
        run = std::max(term, run + term);
        if (run > tol) {
          return fail(i, j, side == 0 ? "complementarity sum (x - l) dk > 0" : "complementarity sum (x - u) dk > 0");
        }
      }
    }
  }
  return report;
}

LipschitzGap esp_lipschitz_gap(const SampledPath& y1, const SampledPath& y2, const BarrierPair& barriers, double p) {
  const auto s1 = esp_solve(y1, barriers);
  const auto s2 = esp_solve(y2, barriers);
  const double horizon = y1.last_time();
  LipschitzGap gap;
  gap.lhs_k = bar_pvar(s1.k - s2.k, p, horizon);
  gap.lhs_x = bar_pvar(s1.x - s2.x, p, horizon);
  gap.rhs = bar_pvar(y1 - y2, p, horizon);
  return gap;
}

SupNormGap esp_supnorm_gap(const SampledPath& y1, const SampledPath& y2, const BarrierPair& b1,
                           const BarrierPair& b2) {
  auto grid = union_grid(union_grid(y1.times(), y2.times()), union_grid(b1.times(), b2.times()));
  const auto r1 = b1.resampled(grid);
  const auto r2 = b2.resampled(grid);
  const auto z1 = resample(y1, grid);
  const auto z2 = resample(y2, grid);
  const auto s1 = esp_solve(z1, r1);
  const auto s2 = esp_solve(z2, r2);
  SupNormGap gap;
  gap.sup_x_gap = sup_norm_inf(s1.x - s2.x);
  gap.sup_k_gap = sup_norm_inf(s1.k - s2.k);
  gap.sup_y_gap = sup_norm_inf(z1 - z2);
  gap.sup_barrier_gap = std::max(sup_norm_inf(r1.lower() - r2.lower()), sup_norm_inf(r1.upper() - r2.upper()));
  return gap;
}

}  // namespace sweep
