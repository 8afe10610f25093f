#pragma once

#include "sweep/path.hpp"

#include <cstdint>
#include <filesystem>
#include <variant>
#include <vector>

namespace sweep {

/// E[B^H_{t1} B^H_{t2}] = (t1^{2H} + t2^{2H} - |t2 - t1|^{2H}) / 2.
double fbm_covariance(double t1, double t2, double hurst);

struct FbmConfig {
  double hurst = 0.75;
  std::size_t dim = 1;
  std::vector<double> grid;  ///< strictly increasing, starting at 0
  std::uint64_t seed = 0;
  std::size_t n_paths = 1;
  std::size_t max_points = 4096;  ///< cap on the Cholesky dimension

  /// Hurst in [1/2, 1): H = 1/2 is admitted as the Brownian sanity case,
  /// solvers additionally require H > 1/2.
  void validate() const;
};

/// Exact Gaussian sampler: lower Cholesky factor of the covariance matrix on
/// the positive grid times, applied to standard normal vectors. Each
/// (path, component) pair draws from its own seeded substream, so results do
/// not depend on evaluation order or thread count.
class FbmSampler {
 public:
  explicit FbmSampler(FbmConfig config);

  const FbmConfig& config() const { return config_; }
  /// Path number `index` (0-based); components are independent.
  SampledPath path(std::size_t index) const;
  /// All n_paths paths, generated in parallel.
  std::vector<SampledPath> sample_all() const;

 private:
  FbmConfig config_;
  Matrix factor_;  // lower Cholesky factor over grid[1..]
};

std::vector<SampledPath> fbm_sample(const FbmConfig& config);

/// Seed of the (path, component) substream.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t path, std::uint64_t component);

/// Per-component weight sigma^i sampled on a grid, with
/// ||sigma^i||_{L^{1/H}[0,T]} = (sum |sigma(t_{k-1})|^{1/H} dt_k)^H.
struct SigmaWeight {
  SampledPath sigma;
  double hurst = 0.75;
  std::vector<double> lh_norm;

  static SigmaWeight from_samples(SampledPath sigma, double hurst);
  static SigmaWeight constant(std::vector<double> grid, const Vector& value, double hurst);

  /// (int_{t1}^{t2} |sigma^i_s|^{1/H} ds)^H with left-point quadrature.
  double interval_norm(std::size_t component, double t1, double t2) const;
};

/// Z^i_t = sum sigma^i(t_{k-1}) (B^i_{t_k} - B^i_{t_{k-1}}).
SampledPath weighted_fbm(const SampledPath& b, const SigmaWeight& weight);

struct MomentCheck {
  double empirical_moment = 0.0;  ///< mean |Z_{t2} - Z_{t1}|^r
  double standard_error = 0.0;
  double bound_shape = 0.0;  ///< (int_{t1}^{t2} |sigma|^{1/H})^{rH}

  double ratio() const { return empirical_moment / bound_shape; }
};

/// Monte Carlo r-th absolute moment of a weighted-fBm increment (one
/// component) against the scaling quantity it is bounded by.
MomentCheck moment_check(const std::vector<SampledPath>& fbm_paths, const SigmaWeight& weight, double r, double t1,
                         double t2, std::size_t component = 0);

/// Bounded-variation driver descriptions.
struct IdentityDriver {
  std::vector<double> grid;  ///< a_t = t
};
struct StepDriver {
  std::vector<double> grid;
  std::vector<double> values;
};
struct CsvDriver {
  std::filesystem::path file;
};
using BvSpec = std::variant<IdentityDriver, StepDriver, CsvDriver>;

struct BvDriver {
  SampledPath path;
  double v1 = 0.0;  ///< total variation over the grid
};

BvDriver bv_driver(const BvSpec& spec);

}  // namespace sweep
