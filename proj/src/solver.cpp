#include "sweep/solver.hpp"

#include "sweep/parallel.hpp"
#include "sweep/pvar.hpp"
#include "sweep/young.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace sweep {

namespace {

std::vector<double> truncate_grid(std::vector<double> grid, double horizon) {
  const std::size_t last = grid_index(grid, horizon);
  grid.resize(last + 1);
  return grid;
}

SampledPath apply_drift(const CoefficientPair& coeffs, const SampledPath& x) {
  std::vector<Vector> rows;
  rows.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back(coeffs.f(x.time(i), x.value(i)));
  return SampledPath::from_rows(std::vector<double>(x.times().begin(), x.times().end()), rows);
}

MatrixPath apply_diffusion(const CoefficientPair& coeffs, const SampledPath& x) {
  std::vector<Matrix> rows;
  rows.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) rows.push_back(coeffs.g(x.time(i), x.value(i)));
  return MatrixPath(std::vector<double>(x.times().begin(), x.times().end()), rows);
}

/// sup over the union of both grids, up to T, of the max-abs difference.
double sup_gap(const SampledPath& lhs, const SampledPath& rhs, double horizon) {
  const auto grid = union_grid(lhs.times(), rhs.times());
  double gap = 0.0;
  for (double t : grid) {
    if (t > horizon) break;
    gap = std::max(gap, (lhs.eval(t) - rhs.eval(t)).lpNorm<Eigen::Infinity>());
  }
  return gap;
}

}  // namespace

double ProblemSpec::resolved_horizon() const {
  if (horizon > 0.0) return horizon;
  double t = 0.0;
  if (!a.empty()) t = std::max(t, a.last_time());
  if (!z.empty()) t = std::max(t, z.last_time());
  if (!barriers.lower().empty()) t = std::max(t, barriers.lower().last_time());
  return t;
}

std::vector<double> ProblemSpec::merged_grid() const {
  auto grid = union_grid(union_grid(a.times(), z.times()), barriers.times());
  return truncate_grid(std::move(grid), resolved_horizon());
}

void ProblemSpec::validate() const {
  const std::size_t d = dim();
  if (d == 0) throw ValidationError("x0: must be non-empty");
  if (a.empty() || a.dim() != 1) throw ValidationError("a: bounded-variation driver must be a 1-d path");
  if (z.empty() || z.dim() != d) throw ValidationError("z: driver dimension must equal dim(x0)");
  if (barriers.lower().empty() || barriers.dim() != d) {
    throw ValidationError("barriers: dimension must equal dim(x0)");
  }
  for (std::size_t j = 0; j < d; ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    if (x0[jj] < barriers.lower().at(0, j) || x0[jj] > barriers.upper().at(0, j)) {
      throw ValidationError("x0: component " + std::to_string(j) + " outside [l_0, u_0]");
    }
  }
  const bool pure_bv = coeffs.diffusion_vanishes;
  if (pure_bv ? !(p >= 1.0 && p < 2.0) : !(p > 1.0 && p < 2.0)) {
    throw ValidationError("p: must lie in (1, 2) (p = 1 only when g == 0), got " + std::to_string(p));
  }
  if (!(resolved_horizon() > 0.0)) throw ValidationError("horizon: must be positive");
  coeffs.validate(p);
}

Vector increment(const CoefficientPair& coeffs, double t, const Vector& x, double da, const Vector& dz) {
  return coeffs.f(t, x) * da + coeffs.g(t, x) * dz;
}

SolveReport picard_solve(const ProblemSpec& spec, const PicardOptions& options) {
  spec.validate();
  if (!(options.tol > 0.0)) throw ValidationError("picard tol must be positive");
  const double horizon = spec.resolved_horizon();
  const auto grid = spec.merged_grid();
  const SampledPath a = resample(spec.a, grid);
  const SampledPath z = resample(spec.z, grid);
  const BarrierPair barriers = spec.barriers.resampled(grid);
  const SampledPath start = SampledPath::constant(grid, spec.x0);

  SolveReport report;
  report.solution = esp_solve(start, barriers);
  report.norm_history.push_back(bar_pvar(report.solution.x, spec.p, horizon));
  for (std::size_t iter = 1; iter <= options.max_iter; ++iter) {
    const SampledPath& prev = report.solution.x;
    const SampledPath y =
        start + stieltjes_integral(apply_drift(spec.coeffs, prev), a) + young_integral(apply_diffusion(spec.coeffs, prev), z);
    EspSolution next = esp_solve(y, barriers);
    const double residual = bar_pvar(next.x - prev, spec.p, horizon);
    report.solution = std::move(next);
    report.iterations = iter;
    report.residual = residual;
    report.residual_history.push_back(residual);
    report.norm_history.push_back(bar_pvar(report.solution.x, spec.p, horizon));
    if (!std::isfinite(residual)) break;
    if (residual < options.tol) {
      report.apriori_norm = report.norm_history.back();
      return report;
    }
  }
  report.apriori_norm = report.norm_history.back();
  std::ostringstream msg;
  msg << "Picard iteration did not reach tol " << options.tol << " after " << report.iterations
      << " iterations (last residual " << report.residual << ")";
  throw PicardNonConvergence(msg.str(), std::move(report));
}

SolveReport euler_solve(const ProblemSpec& spec, std::size_t n) {
  spec.validate();
  if (n == 0) throw ValidationError("euler level n must be >= 1");
  const double horizon = spec.resolved_horizon();
  const auto grid = uniform_grid(n, horizon);
  const SampledPath a = resample(spec.a, grid);
  const SampledPath z = resample(spec.z, grid);
  const BarrierPair barriers = spec.barriers.resampled(grid);
  const std::size_t d = spec.dim();

  std::vector<double> xs(grid.size() * d);
  std::vector<double> ks(grid.size() * d, 0.0);
  std::vector<double> ys(grid.size() * d);
  Vector x = spec.x0;
  Vector k = Vector::Zero(static_cast<Eigen::Index>(d));
  Vector y = spec.x0;
  auto store = [&](std::size_t i) {
    std::copy(x.data(), x.data() + d, xs.begin() + static_cast<std::ptrdiff_t>(i * d));
    std::copy(k.data(), k.data() + d, ks.begin() + static_cast<std::ptrdiff_t>(i * d));
    std::copy(y.data(), y.data() + d, ys.begin() + static_cast<std::ptrdiff_t>(i * d));
  };
  store(0);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const Vector dy = increment(spec.coeffs, grid[i], x, a.at(i + 1, 0) - a.at(i, 0), z.value(i + 1) - z.value(i));
    const Vector next = projection_step(x, dy, barriers.lower().value(i + 1), barriers.upper().value(i + 1));
    k += (next - x) - dy;
    y += dy;
    x = next;
    store(i + 1);
  }
  SolveReport report;
  report.solution = EspSolution{SampledPath(grid, std::move(xs), d), SampledPath(grid, std::move(ks), d),
                                SampledPath(grid, std::move(ys), d)};
  report.iterations = n;
  report.apriori_norm = bar_pvar(report.solution.x, spec.p, horizon);
  report.norm_history.push_back(report.apriori_norm);
  return report;
}

AprioriCheck apriori_norm_check(const SolveReport& report, const ProblemSpec& spec) {
  AprioriCheck out;
  out.measured = bar_pvar(report.solution.x, spec.p, spec.resolved_horizon());
  out.finite = std::isfinite(out.measured);
  if (spec.barriers.witness()) {
    const double d = static_cast<double>(spec.dim());
    const auto grid = spec.merged_grid();
    const SampledPath h = resample(*spec.barriers.witness(), grid);
    out.reference_bound = (d + 1.0) * spec.x0.norm() + d * bar_pvar(h, spec.p, spec.resolved_horizon());
  }
  return out;
}

NormSequenceCheck norm_sequence_check(std::span<const double> norms, double rel_tol) {
  NormSequenceCheck out;
  out.finite = std::all_of(norms.begin(), norms.end(), [](double v) { return std::isfinite(v); });
  if (norms.empty() || !out.finite) return out;
  double running = 0.0;
  double at_half = 0.0;
  const std::size_t half = norms.size() / 2;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    running = std::max(running, norms[i]);
    if (i + 1 == std::max<std::size_t>(half, 1)) at_half = running;
  }
  out.max = running;
  out.stabilized = running <= at_half * (1.0 + rel_tol);
  return out;
}

FieldVariationBound field_variation_check(const ScalarFieldFn& g, const SampledPath& x, const SampledPath& y,
                            const FieldRegularity& constants, double p, double horizon) {
  if (!x.same_grid(y) || x.dim() != y.dim()) throw ValidationError("field_variation_check needs x and y on a common grid");
  if (!(p >= 1.0)) throw ValidationError("field_variation_check needs p >= 1");
  if (!(constants.alpha_n > 0.0) || !(constants.beta > 0.0)) {
    throw ValidationError("field_variation_check needs positive alpha_N and beta");
  }
  FieldVariationBound out;
  out.r = std::max(p / constants.alpha_n, 1.0 / constants.beta);
  if (horizon <= 0.0) return out;
  std::vector<double> w(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = g(x.time(i), x.value(i)) - g(y.time(i), y.value(i));
  const SampledPath gw = SampledPath::scalar(std::vector<double>(x.times().begin(), x.times().end()), std::move(w));
  const Interval iv{0.0, horizon};
  const SampledPath diff = x - y;
  out.lhs = p_variation(gw, out.r, iv).norm;
  const double sup_diff = sup_norm(diff.truncated(horizon));
  out.rhs = constants.c_beta * p_variation(diff, out.r, iv).norm +
            constants.c_n * sup_diff *
                (std::pow(horizon, constants.beta) + std::pow(p_variation(x, p, iv).norm, constants.alpha_n) +
                 std::pow(p_variation(y, p, iv).norm, constants.alpha_n));
  return out;
}

std::vector<Perturbation> make_perturbations(const ProblemSpec& spec, PerturbKind kind, std::span<const double> eps) {
  std::vector<Perturbation> out;
  for (double e : eps) {
    Perturbation pert{e, spec.coeffs, spec.x0};
    switch (kind) {
      case PerturbKind::drift:
        pert.coeffs = perturb_drift(spec.coeffs, e, spec.dim());
        break;
      case PerturbKind::diffusion:
        pert.coeffs = perturb_diffusion(spec.coeffs, e);
        break;
      case PerturbKind::initial:
        pert.x0[0] = std::clamp(spec.x0[0] + e, spec.barriers.lower().at(0, 0), spec.barriers.upper().at(0, 0));
        break;
    }
    out.push_back(std::move(pert));
  }
  return out;
}

StabilityTable stability_experiment(const ProblemSpec& spec, const std::vector<Perturbation>& perturbations,
                                    const PicardOptions& options) {
  const SolveReport base = picard_solve(spec, options);
  const double horizon = spec.resolved_horizon();
  StabilityTable table;
  table.rows.resize(perturbations.size());
  parallel_for(perturbations.size(), [&](std::size_t i) {
    const Perturbation& pert = perturbations[i];
    StabilityRow& row = table.rows[i];
    row.eps = pert.eps;
    try {
      ProblemSpec perturbed = spec;
      perturbed.coeffs = pert.coeffs;
      perturbed.x0 = pert.x0;
      const SolveReport sol = picard_solve(perturbed, options);
      row.gap_x = bar_pvar(sol.solution.x - base.solution.x, spec.p, horizon);
      row.gap_k = bar_pvar(sol.solution.k - base.solution.k, spec.p, horizon);
    } catch (const std::exception& e) {
      row.error = e.what();
      row.gap_x = row.gap_k = std::numeric_limits<double>::quiet_NaN();
    }
  });
  table.decreasing = true;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (!table.rows[i].error.empty()) table.decreasing = false;
    if (i == 0) continue;
    const auto& prev = table.rows[i - 1];
    const auto& cur = table.rows[i];
    auto down = [](double before, double after) { return after < before || (after == 0.0 && before == 0.0); };
    if (!down(prev.gap_x, cur.gap_x) || !down(prev.gap_k, cur.gap_k)) table.decreasing = false;
  }
  return table;
}

double level_gap(const SolveReport& coarse, const SolveReport& fine) {
  const SampledPath& xc = coarse.solution.x;
  const SampledPath& xf = fine.solution.x;
  double gap = 0.0;
  for (std::size_t i = 0; i < xc.size(); ++i) {
    gap = std::max(gap, (xc.value(i) - xf.eval(xc.time(i))).lpNorm<Eigen::Infinity>());
  }
  return gap;
}

ConvergenceReport convergence_report(const ProblemSpec& spec, std::span<const std::size_t> levels,
                                     const EspSolution& reference) {
  const double horizon = spec.resolved_horizon();
  ConvergenceReport report;
  report.rows.resize(levels.size());
  parallel_for(levels.size(), [&](std::size_t i) {
    const SolveReport sol = euler_solve(spec, levels[i]);
    ConvergenceRow& row = report.rows[i];
    row.n = levels[i];
    row.sup_gap = sup_gap(sol.solution.x, reference.x, horizon);
    for (std::size_t j = 0; j < sol.solution.x.size(); ++j) {
      const double t = sol.solution.x.time(j);
      row.grid_gap = std::max(row.grid_gap, (sol.solution.x.value(j) - reference.x.eval(t)).lpNorm<Eigen::Infinity>());
    }
  });
  report.monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    if (report.rows[i].sup_gap > report.rows[i - 1].sup_gap) report.monotone = false;
  }
  return report;
}

std::vector<double> euler_level_gaps(const ProblemSpec& spec, std::span<const std::size_t> levels) {
  std::vector<std::size_t> needed(levels.begin(), levels.end());
  for (std::size_t n : levels) needed.push_back(2 * n);
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  std::vector<SolveReport> solved(needed.size());
  parallel_for(needed.size(), [&](std::size_t i) { solved[i] = euler_solve(spec, needed[i]); });
  auto find = [&](std::size_t n) -> const SolveReport& {
    return solved[static_cast<std::size_t>(std::lower_bound(needed.begin(), needed.end(), n) - needed.begin())];
  };
  std::vector<double> gaps;
  for (std::size_t n : levels) gaps.push_back(level_gap(find(n), find(2 * n)));
  return gaps;
}

StochasticReport stochastic_solve(const ProblemSpec& spec, const FbmConfig& fbm, const SigmaWeight& sigma,
                                  std::size_t n, bool keep_paths) {
  fbm.validate();
  if (!(fbm.hurst > 0.5)) throw ValidationError("fbm.hurst: stochastic solve requires H > 1/2");
  if (!(spec.p > 1.0 / fbm.hurst && spec.p < 2.0)) {
    throw ValidationError("p: stochastic solve requires p in (1/H, 2)");
  }
  if (!std::equal(sigma.sigma.times().begin(), sigma.sigma.times().end(), fbm.grid.begin(), fbm.grid.end())) {
    throw ValidationError("sigma: must be sampled on the fBm grid");
  }
  if (fbm.dim != spec.dim() || sigma.sigma.dim() != spec.dim()) {
    throw ValidationError("fbm.dim: must equal dim(x0)");
  }
  const FbmSampler sampler(fbm);
  StochasticReport report;
  report.paths.resize(fbm.n_paths);
  report.gaps.assign(fbm.n_paths, std::numeric_limits<double>::quiet_NaN());
  report.errors.resize(fbm.n_paths);
  parallel_for(fbm.n_paths, [&](std::size_t i) {
    try {
      ProblemSpec path_spec = spec;
      path_spec.z = weighted_fbm(sampler.path(i), sigma);
      SolveReport coarse = euler_solve(path_spec, n);
      const SolveReport fine = euler_solve(path_spec, 2 * n);
      report.gaps[i] = level_gap(coarse, fine);
      if (keep_paths) report.paths[i] = std::move(coarse);
    } catch (const std::exception& e) {
      report.errors[i] = e.what();
    }
  });
  double total = 0.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < fbm.n_paths; ++i) {
    if (report.errors[i].empty()) {
      total += report.gaps[i];
      ++ok;
    } else {
      ++report.failures;
    }
  }
  report.mean_gap = ok > 0 ? total / static_cast<double>(ok) : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace sweep
