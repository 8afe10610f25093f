#include "sweep/drivers.hpp"

#include "sweep/csv.hpp"
#include "sweep/parallel.hpp"
#include "sweep/pvar.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace sweep {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Matrix covariance_matrix(std::span<const double> times, double hurst) {
  const auto n = static_cast<Eigen::Index>(times.size());
  Matrix cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = fbm_covariance(times[static_cast<std::size_t>(i)], times[static_cast<std::size_t>(j)], hurst);
    }
  }
  return cov;
}

}  // namespace

double fbm_covariance(double t1, double t2, double hurst) {
  if (t1 < 0.0 || t2 < 0.0) throw ValidationError("fBm covariance needs non-negative times");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t2, h2) + std::pow(t1, h2) - std::pow(std::abs(t2 - t1), h2));
}

void FbmConfig::validate() const {
  if (!(hurst >= 0.5 && hurst < 1.0)) {
    throw ValidationError("hurst must lie in [0.5, 1), got " + std::to_string(hurst));
  }
  if (dim == 0) throw ValidationError("fBm dimension must be positive");
  if (n_paths == 0) throw ValidationError("fBm needs at least one path");
  validate_grid(grid);
  if (grid.size() - 1 > max_points) {
    throw ValidationError("fBm grid has " + std::to_string(grid.size() - 1) +
                          " positive times, above the Cholesky cap of " + std::to_string(max_points));
  }
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t path, std::uint64_t component) {
  return splitmix64(splitmix64(splitmix64(seed) ^ path) ^ (component * 0xd1b54a32d192ed03ULL));
}

FbmSampler::FbmSampler(FbmConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::span<const double> positive(config_.grid.data() + 1, config_.grid.size() - 1);
  if (positive.empty()) return;
  Matrix cov = covariance_matrix(positive, config_.hurst);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    const double jitter = 1e-12 * cov.diagonal().maxCoeff();
    cov.diagonal().array() += jitter;
    llt.compute(cov);
    if (llt.info() != Eigen::Success) {
      double min_step = positive.front();
      for (std::size_t i = 1; i < positive.size(); ++i) min_step = std::min(min_step, positive[i] - positive[i - 1]);
      std::ostringstream msg;
      msg << "fBm covariance Cholesky failed after jitter " << jitter << " (n = " << positive.size()
          << ", H = " << config_.hurst << ", T = " << positive.back() << ", min step = " << min_step << ")";
      throw NumericalError(msg.str());
    }
  }
  factor_ = llt.matrixL();
}

SampledPath FbmSampler::path(std::size_t index) const {
  const std::size_t n = config_.grid.size();
  const std::size_t d = config_.dim;
  std::vector<double> values(n * d, 0.0);
  const auto m = static_cast<Eigen::Index>(n - 1);
  for (std::size_t j = 0; j < d && m > 0; ++j) {
    std::mt19937_64 rng(substream_seed(config_.seed, index, j));
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector xi(m);
    for (Eigen::Index i = 0; i < m; ++i) xi[i] = normal(rng);
    const Vector b = factor_.triangularView<Eigen::Lower>() * xi;
    for (Eigen::Index i = 0; i < m; ++i) values[(static_cast<std::size_t>(i) + 1) * d + j] = b[i];
  }
  return SampledPath(config_.grid, std::move(values), d);
}

std::vector<SampledPath> FbmSampler::sample_all() const {
  std::vector<SampledPath> out(config_.n_paths);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = path(i); });
  return out;
}

std::vector<SampledPath> fbm_sample(const FbmConfig& config) { return FbmSampler(config).sample_all(); }

SigmaWeight SigmaWeight::from_samples(SampledPath sigma, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw ValidationError("sigma weight needs hurst in (0, 1)");
  SigmaWeight w;
  w.sigma = std::move(sigma);
  w.hurst = hurst;
  w.lh_norm.resize(w.sigma.dim());
  for (std::size_t j = 0; j < w.sigma.dim(); ++j) w.lh_norm[j] = w.interval_norm(j, 0.0, w.sigma.last_time());
  return w;
}

SigmaWeight SigmaWeight::constant(std::vector<double> grid, const Vector& value, double hurst) {
  return from_samples(SampledPath::constant(std::move(grid), value), hurst);
}

double SigmaWeight::interval_norm(std::size_t component, double t1, double t2) const {
  if (component >= sigma.dim()) throw ValidationError("sigma component out of range");
  if (t1 < 0.0 || t2 < t1) throw ValidationError("sigma interval must satisfy 0 <= t1 <= t2");
  const auto times = sigma.times();
  const double exponent = 1.0 / hurst;
  double integral = 0.0;
  for (std::size_t k = grid_index(times, t1); k < times.size(); ++k) {
    const double lo = std::max(times[k], t1);
    const double hi = k + 1 < times.size() ? std::min(times[k + 1], t2) : t2;
    if (hi > lo) integral += std::pow(std::abs(sigma.at(k, component)), exponent) * (hi - lo);
    if (k + 1 < times.size() && times[k + 1] >= t2) break;
  }
  return std::pow(integral, hurst);
}

SampledPath weighted_fbm(const SampledPath& b, const SigmaWeight& weight) {
  if (!b.same_grid(weight.sigma)) throw ValidationError("weighted_fbm requires sigma on the fBm grid");
  if (b.dim() != weight.sigma.dim()) throw ValidationError("weighted_fbm dimension mismatch");
  const std::size_t d = b.dim();
  std::vector<double> values(b.size() * d, 0.0);
  for (std::size_t i = 1; i < b.size(); ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      values[i * d + j] = values[(i - 1) * d + j] + weight.sigma.at(i - 1, j) * (b.at(i, j) - b.at(i - 1, j));
    }
  }
  return SampledPath(std::vector<double>(b.times().begin(), b.times().end()), std::move(values), d);
}

MomentCheck moment_check(const std::vector<SampledPath>& fbm_paths, const SigmaWeight& weight, double r, double t1,
                         double t2, std::size_t component) {
  if (!(r > 0.0)) throw ValidationError("moment order r must be positive");
  if (!(t1 < t2)) throw ValidationError("moment_check needs t1 < t2");
  if (fbm_paths.empty()) throw ValidationError("moment_check needs at least one path");
  std::vector<double> samples(fbm_paths.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const SampledPath z = weighted_fbm(fbm_paths[i], weight);
    samples[i] = std::pow(std::abs(z.eval(t2)[static_cast<Eigen::Index>(component)] -
                                   z.eval(t1)[static_cast<Eigen::Index>(component)]),
                          r);
  });
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= n;
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var = samples.size() > 1 ? var / (n - 1.0) : 0.0;
  MomentCheck out;
  out.empirical_moment = mean;
  out.standard_error = std::sqrt(var / n);
  out.bound_shape = std::pow(weight.interval_norm(component, t1, t2), r);
  return out;
}

BvDriver bv_driver(const BvSpec& spec) {
  SampledPath path = std::visit(
      [](const auto& s) -> SampledPath {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, IdentityDriver>) {
          return SampledPath::scalar(s.grid, s.grid);
        } else if constexpr (std::is_same_v<T, StepDriver>) {
          if (s.values.size() != s.grid.size()) throw ValidationError("step driver values and grid differ in length");
          return SampledPath::scalar(s.grid, s.values);
        } else {
          return csv::read_path(s.file);
        }
      },
      spec);
  if (path.dim() != 1) throw ValidationError("bounded-variation driver must be one-dimensional");
  const double v1 = path.size() > 1 ? p_variation(path, 1.0).value : 0.0;
  return BvDriver{std::move(path), v1};
}

}  // namespace sweep
