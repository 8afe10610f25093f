#pragma once

#include "sweep/coefficients.hpp"
#include "sweep/drivers.hpp"
#include "sweep/esp.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sweep {

/// x_t = x0 + int f(s, x_{s-}) da_s + int g(s, x_{s-}) dz_s + k_t with
/// (x, k) = ESP(y, l, u).
struct ProblemSpec {
  Vector x0;
  CoefficientPair coeffs;
  SampledPath a;  ///< bounded-variation driver, one-dimensional
  SampledPath z;  ///< p-variation driver, d-dimensional
  BarrierPair barriers;
  double p = 1.5;
  double horizon = 0.0;  ///< T; 0 means the latest grid time among the inputs

  double resolved_horizon() const;
  /// Union of all input grids, truncated at T.
  std::vector<double> merged_grid() const;
  /// Dimensions, l_0 <= x0 <= u_0, p in (1, 2) (p = 1 only when g == 0) and
  /// the declared coefficient constants.
  void validate() const;
  std::size_t dim() const { return static_cast<std::size_t>(x0.size()); }
};

struct SolveReport {
  EspSolution solution;
  std::size_t iterations = 0;  ///< Picard iterations, or the Euler level n
  double residual = 0.0;       ///< last Picard residual bar V_p(x^n - x^{n-1})_T; 0 for Euler
  std::vector<double> residual_history;
  std::vector<double> norm_history;  ///< bar V_p(x^n)_T per iterate
  double apriori_norm = 0.0;         ///< bar V_p(x)_T of the returned solution
};

struct PicardOptions {
  double tol = 1e-8;
  std::size_t max_iter = 200;
};

/// Raised when Picard iteration hits max_iter; carries the partial report.
class PicardNonConvergence : public NumericalError {
 public:
  PicardNonConvergence(const std::string& what, SolveReport report)
      : NumericalError(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Picard iteration on the merged grid:
///   (x^0, k^0) = ESP(x0, l, u),
///   y^n = x0 + int f(s, x^{n-1}_{s-}) da + int g(s, x^{n-1}_{s-}) dz,
///   (x^n, k^n) = ESP(y^n, l, u),
/// until bar V_p(x^n - x^{n-1})_T < tol.
SolveReport picard_solve(const ProblemSpec& spec, const PicardOptions& options = {});

/// Catching-up (Euler) scheme on the uniform grid {k/n : k/n <= T}; drivers
/// and barriers are resampled onto it.
SolveReport euler_solve(const ProblemSpec& spec, std::size_t n);

/// One step of the drift-plus-diffusion increment used by both schemes.
Vector increment(const CoefficientPair& coeffs, double t, const Vector& x, double da, const Vector& dz);

struct AprioriCheck {
  double measured = 0.0;  ///< bar V_p(x)_T
  bool finite = false;
  /// (d + 1)|x0| + d bar V_p(h)_T when a witness is present: the bound on the
  /// zeroth Picard iterate, and on the solution when f = g = 0.
  std::optional<double> reference_bound;
};

AprioriCheck apriori_norm_check(const SolveReport& report, const ProblemSpec& spec);

struct NormSequenceCheck {
  double max = 0.0;
  bool finite = false;
  bool stabilized = false;  ///< running max grew by < rel_tol over the second half
};

/// Boundedness of a sequence of a priori norms (Picard iterates or Euler
/// refinements).
NormSequenceCheck norm_sequence_check(std::span<const double> norms, double rel_tol = 0.1);

/// Constants entering the Lipschitz estimate for g(., x) - g(., y).
struct FieldRegularity {
  double c_beta = 1.0;
  double beta = 1.0;
  double c_n = 1.0;
  double alpha_n = 1.0;
};

struct FieldVariationBound {
  double lhs = 0.0;  ///< V_r(g(., x) - g(., y))_T
  double rhs = 0.0;  ///< c_beta V_r(x - y)_T + c_n sup|x - y| (T^beta + V_p(x)^alpha + V_p(y)^alpha)
  double r = 0.0;    ///< (p / alpha_n) v (1 / beta)
};

using ScalarFieldFn = std::function<double(double, const Vector&)>;

/// Evaluates both sides of the r-variation estimate for a scalar field g
/// along two paths on a common grid, over [0, T].
FieldVariationBound field_variation_check(const ScalarFieldFn& g, const SampledPath& x, const SampledPath& y,
                            const FieldRegularity& constants, double p, double horizon);

struct Perturbation {
  double eps = 0.0;
  CoefficientPair coeffs;
  Vector x0;
};

struct StabilityRow {
  double eps = 0.0;
  double gap_x = 0.0;  ///< bar V_p(x_eps - x)_T
  double gap_k = 0.0;  ///< bar V_p(k_eps - k)_T
  std::string error;   ///< non-empty when this instance failed
};

struct StabilityTable {
  std::vector<StabilityRow> rows;  ///< in schedule order
  bool decreasing = false;         ///< both gaps strictly decrease along the schedule
};

/// Solves the base problem and every perturbation with Picard iteration and
/// reports the p-variation distance of the solutions.
StabilityTable stability_experiment(const ProblemSpec& spec, const std::vector<Perturbation>& perturbations,
                                    const PicardOptions& options = {});

enum class PerturbKind { drift, diffusion, initial };

/// Perturbation schedule of one kind: f + eps, g + eps I, or x0 + eps e_1
/// projected into [l_0, u_0].
std::vector<Perturbation> make_perturbations(const ProblemSpec& spec, PerturbKind kind, std::span<const double> eps);

/// max over the level-n grid points of |x^{(n)} - x^{(2n)}| (max-abs norm).
double level_gap(const SolveReport& coarse, const SolveReport& fine);

struct ConvergenceRow {
  std::size_t n = 0;
  double sup_gap = 0.0;   ///< sup_{t <= T} |x^n_t - x_ref_t|
  double grid_gap = 0.0;  ///< max_{k/n <= T} |x^n_{k/n} - x_ref_{k/n}|
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  bool monotone = false;  ///< sup gaps non-increasing in n
};

/// Euler levels against a reference solution (finest Euler or Picard).
ConvergenceReport convergence_report(const ProblemSpec& spec, std::span<const std::size_t> levels,
                                     const EspSolution& reference);

/// Gaps between consecutive levels n and 2n for every n in `levels`.
std::vector<double> euler_level_gaps(const ProblemSpec& spec, std::span<const std::size_t> levels);

struct StochasticReport {
  std::vector<std::optional<SolveReport>> paths;  ///< level-n solutions, empty on failure
  std::vector<double> gaps;                       ///< per-path gap between levels n and 2n (NaN on failure)
  std::vector<std::string> errors;                ///< per-path error text, empty on success
  double mean_gap = 0.0;
  std::size_t failures = 0;
};

/// Euler scheme per sampled path of Z^H = int sigma dB^H. The z driver of
/// `spec` is replaced path by path. Requires H > 1/2 and p in (1/H, 2).
StochasticReport stochastic_solve(const ProblemSpec& spec, const FbmConfig& fbm, const SigmaWeight& sigma,
                                  std::size_t n, bool keep_paths = true);

}  // namespace sweep
