#include "sweep/pvar.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sweep {

namespace {

void check_p(double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw ValidationError("p-variation requires finite p >= 1, got " + std::to_string(p));
  }
}

Interval resolve_interval(std::span<const double> times, std::optional<Interval> interval) {
  if (!interval) return Interval{0.0, times.back()};
  if (!(interval->a >= 0.0) || !(interval->a < interval->b)) {
    throw ValidationError("p-variation interval must satisfy 0 <= a < b");
  }
  return *interval;
}

/// Grid indices whose values realise the step path on [a, b]: the index
/// valid at a, every grid point strictly inside (a, b), and the index valid
/// at b (omitted when `include_right` is false).
std::vector<std::size_t> interval_indices(std::span<const double> times, Interval iv, bool include_right) {
  std::vector<std::size_t> idx;
  const std::size_t first = grid_index(times, iv.a);
  idx.push_back(first);
  for (std::size_t i = first + 1; i < times.size() && times[i] < iv.b; ++i) idx.push_back(i);
  if (include_right) idx.push_back(grid_index(times, iv.b));
  return idx;
}

VariationResult finish(double p, double value, double initial_norm, Interval iv) {
  VariationResult r;
  r.p = p;
  r.value = value;
  r.norm = std::pow(value, 1.0 / p);
  r.bar_norm = r.norm + initial_norm;
  r.interval = iv;
  return r;
}

void check_cap(std::size_t n, const PVarOptions& options) {
  if (n > options.max_points) {
    throw NumericalError("p-variation over " + std::to_string(n) + " points exceeds the cap of " +
                         std::to_string(options.max_points));
  }
}

VariationResult vector_pvar(const SampledPath& path, double p, Interval iv, bool include_right,
                            const PVarOptions& options) {
  const auto idx = interval_indices(path.times(), iv, include_right);
  double value = 0.0;
  if (path.dim() == 1) {
    std::vector<double> seq(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) seq[i] = path.at(idx[i], 0);
    value = detail::scalar_pvar_sum(seq, p, options.max_points);
  } else if (p == 1.0) {
    for (std::size_t i = 1; i < idx.size(); ++i) value += (path.value(idx[i]) - path.value(idx[i - 1])).norm();
  } else {
    check_cap(idx.size(), options);
    value = detail::pvar_dynamic_program(idx.size(), p, [&](std::size_t i, std::size_t j) {
      return (path.value(idx[j]) - path.value(idx[i])).norm();
    });
  }
  return finish(p, value, path.value(idx.front()).norm(), iv);
}

VariationResult matrix_pvar(const MatrixPath& path, double p, Interval iv, bool include_right,
                            const PVarOptions& options) {
  const auto idx = interval_indices(path.times(), iv, include_right);
  double value = 0.0;
  if (path.dim() == 1) {
    std::vector<double> seq(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) seq[i] = path.value(idx[i])(0, 0);
    value = detail::scalar_pvar_sum(seq, p, options.max_points);
  } else if (p == 1.0) {
    for (std::size_t i = 1; i < idx.size(); ++i) value += operator_norm(path.value(idx[i]) - path.value(idx[i - 1]));
  } else {
    check_cap(idx.size(), options);
    value = detail::pvar_dynamic_program(idx.size(), p, [&](std::size_t i, std::size_t j) {
      return operator_norm(path.value(idx[j]) - path.value(idx[i]));
    });
  }
  return finish(p, value, operator_norm(path.value(idx.front())), iv);
}

}  // namespace

namespace detail {

double scalar_pvar_sum(std::span<const double> values, double p, std::size_t max_points) {
  if (values.size() < 2) return 0.0;
  if (p == 1.0) {
    double sum = 0.0;
    for (std::size_t i = 1; i < values.size(); ++i) sum += std::abs(values[i] - values[i - 1]);
    return sum;
  }
  // Drop repeated values, then keep only endpoints and strict local extrema.
  std::vector<double> dedup;
  dedup.reserve(values.size());
  for (double v : values) {
    if (dedup.empty() || v != dedup.back()) dedup.push_back(v);
  }
  if (dedup.size() < 2) return 0.0;
  std::vector<double> extrema;
  extrema.reserve(dedup.size());
  extrema.push_back(dedup.front());
  for (std::size_t i = 1; i + 1 < dedup.size(); ++i) {
    if ((dedup[i] - dedup[i - 1]) * (dedup[i + 1] - dedup[i]) < 0.0) extrema.push_back(dedup[i]);
  }
  extrema.push_back(dedup.back());
  if (extrema.size() > max_points) {
    throw NumericalError("p-variation over " + std::to_string(extrema.size()) +
                         " extremal points exceeds the cap of " + std::to_string(max_points));
  }
  return pvar_dynamic_program(extrema.size(), p, [&](std::size_t i, std::size_t j) {
    return std::abs(extrema[j] - extrema[i]);
  });
}

}  // namespace detail

VariationResult p_variation(const SampledPath& path, double p, std::optional<Interval> interval,
                            const PVarOptions& options) {
  check_p(p);
  if (path.empty()) throw ValidationError("p-variation of an empty path");
  if (!interval && path.size() == 1) return finish(p, 0.0, path.value(0).norm(), Interval{});
  return vector_pvar(path, p, resolve_interval(path.times(), interval), true, options);
}

VariationResult p_variation(const MatrixPath& path, double p, std::optional<Interval> interval,
                            const PVarOptions& options) {
  check_p(p);
  if (path.size() == 0) throw ValidationError("p-variation of an empty path");
  if (!interval && path.size() == 1) return finish(p, 0.0, operator_norm(path.value(0)), Interval{});
  return matrix_pvar(path, p, resolve_interval(path.times(), interval), true, options);
}

VariationResult p_variation_half_open(const MatrixPath& path, double p, Interval interval,
                                      const PVarOptions& options) {
  check_p(p);
  if (path.size() == 0) throw ValidationError("p-variation of an empty path");
  return matrix_pvar(path, p, resolve_interval(path.times(), interval), false, options);
}

double bar_pvar(const SampledPath& path, double p, double horizon) {
  if (horizon <= 0.0) {
    check_p(p);
    return path.value(0).norm();
  }
  return p_variation(path, p, Interval{0.0, horizon}).bar_norm;
}

double bar_pvar(const SampledPath& path, double p) { return bar_pvar(path, p, path.last_time()); }

double oscillation(const SampledPath& path, double horizon) {
  if (horizon < 0.0) throw ValidationError("oscillation horizon must be non-negative");
  const std::size_t last = grid_index(path.times(), horizon);
  if (path.dim() == 1) {
    double lo = path.at(0, 0);
    double hi = lo;
    for (std::size_t i = 1; i <= last; ++i) {
      lo = std::min(lo, path.at(i, 0));
      hi = std::max(hi, path.at(i, 0));
    }
    return hi - lo;
  }
  double best = 0.0;
  for (std::size_t i = 0; i <= last; ++i) {
    for (std::size_t j = i + 1; j <= last; ++j) {
      best = std::max(best, (path.value(j) - path.value(i)).norm());
    }
  }
  return best;
}

InterpolationBound interpolation_bound(const SampledPath& path, double p, double eps, double horizon) {
  check_p(p);
  if (!(eps > 0.0)) throw ValidationError("interpolation bound needs eps > 0");
  if (horizon <= 0.0) return {};
  const Interval iv{0.0, horizon};
  const double q = p + eps;
  InterpolationBound out;
  out.lhs = p_variation(path, q, iv).norm;
  const double osc = oscillation(path, horizon);
  const double vp = p_variation(path, p, iv).norm;
  out.rhs = std::pow(osc, 1.0 - p / q) * std::pow(vp, p / q);
  return out;
}

}  // namespace sweep
