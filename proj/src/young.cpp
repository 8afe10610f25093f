#include "sweep/young.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sweep {

namespace {

double zeta_estimate(double partial_sum, double n, double s) {
  // partial_sum = sum_{k < n} k^{-s}; Euler-Maclaurin tail from n onwards.
  return partial_sum + std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s) +
         s / 12.0 * std::pow(n, -s - 1.0);
}

std::size_t grid_position(std::span<const double> times, double t, const char* what) {
  auto it = std::lower_bound(times.begin(), times.end(), t);
  if (it == times.end() || *it != t) {
    throw ValidationError(std::string("integration interval endpoint ") + what + " is not a grid point");
  }
  return static_cast<std::size_t>(it - times.begin());
}

std::pair<std::size_t, std::size_t> interval_positions(std::span<const double> times,
                                                       std::optional<Interval> interval) {
  if (!interval) return {0, times.size() - 1};
  if (!(interval->a < interval->b)) throw ValidationError("integration interval must satisfy a < b");
  return {grid_position(times, interval->a, "a"), grid_position(times, interval->b, "b")};
}

}  // namespace

double riemann_zeta(double s) {
  if (!(s > 1.0) || !std::isfinite(s)) {
    throw ValidationError("zeta(s) requires s > 1 (Young condition 1/p + 1/q > 1), got s = " + std::to_string(s));
  }
  constexpr std::size_t kMaxTerms = std::size_t{1} << 20;
  double partial = 0.0;
  std::size_t n = 1;
  auto advance_to = [&](std::size_t target) {
    for (; n < target; ++n) partial += std::pow(static_cast<double>(n), -s);
  };
  std::size_t terms = 64;
  advance_to(terms);
  double previous = zeta_estimate(partial, static_cast<double>(terms), s);
  while (terms < kMaxTerms) {
    terms *= 2;
    advance_to(terms);
    const double current = zeta_estimate(partial, static_cast<double>(terms), s);
    if (std::abs(current - previous) < 1e-12) return current;
    previous = current;
  }
  return previous;
}

double zeta_constant(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) throw ValidationError("zeta constant needs positive p and q");
  return riemann_zeta(1.0 / p + 1.0 / q);
}

SampledPath young_integral(const MatrixPath& w, const SampledPath& z, std::optional<Interval> interval) {
  if (!std::equal(w.times().begin(), w.times().end(), z.times().begin(), z.times().end())) {
    throw ValidationError("young_integral requires w and z on a common grid (see merge_grids)");
  }
  if (w.dim() != z.dim()) throw ValidationError("young_integral dimension mismatch between w and z");
  const auto [first, last] = interval_positions(z.times(), interval);
  const std::size_t d = z.dim();
  std::vector<double> values(z.size() * d, 0.0);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 1; i < z.size(); ++i) {
    if (i > first && i <= last) acc += w.value(i - 1) * (z.value(i) - z.value(i - 1));
    std::copy(acc.data(), acc.data() + d, values.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return SampledPath(std::vector<double>(z.times().begin(), z.times().end()), std::move(values), d);
}

SampledPath stieltjes_integral(const SampledPath& w, const SampledPath& a, std::optional<Interval> interval) {
  if (!w.same_grid(a)) throw ValidationError("stieltjes_integral requires a common grid");
  if (a.dim() != 1) throw ValidationError("stieltjes_integral integrator must be one-dimensional");
  const auto [first, last] = interval_positions(w.times(), interval);
  const std::size_t d = w.dim();
  std::vector<double> values(w.size() * d, 0.0);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(d));
  for (std::size_t i = 1; i < w.size(); ++i) {
    if (i > first && i <= last) acc += w.value(i - 1) * (a.at(i, 0) - a.at(i - 1, 0));
    std::copy(acc.data(), acc.data() + d, values.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return SampledPath(std::vector<double>(w.times().begin(), w.times().end()), std::move(values), d);
}

std::pair<MatrixPath, SampledPath> merge_grids(const MatrixPath& w, const SampledPath& z) {
  const auto grid = union_grid(w.times(), z.times());
  return {resample(w, grid), resample(z, grid)};
}

YoungBound young_loeve_check(const MatrixPath& w, const SampledPath& z, double p, double q,
                             std::optional<Interval> interval) {
  YoungBound out;
  out.p = p;
  out.q = q;
  out.c_pq = zeta_constant(p, q);
  const Interval iv = interval.value_or(Interval{0.0, z.last_time()});
  const SampledPath integral = young_integral(w, z, interval);
  out.lhs = p_variation(integral, p, iv).norm;
  out.vq_w = p_variation_half_open(w, q, iv).bar_norm;
  out.vp_z = p_variation(z, p, iv).norm;
  out.bound = out.c_pq * out.vq_w * out.vp_z;
  return out;
}

}  // namespace sweep
