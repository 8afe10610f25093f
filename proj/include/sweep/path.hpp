#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sweep {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bad input: malformed paths, violated preconditions, bad configuration.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed on valid input (Cholesky breakdown,
/// non-convergence, runtime caps).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Closed time interval [a, b].
struct Interval {
  double a = 0.0;
  double b = 0.0;
};

/// Checks that `times` starts at 0, is strictly increasing and finite.
void validate_grid(std::span<const double> times);

/// Index of the largest grid time <= t (grid must be valid, t >= times[0]).
std::size_t grid_index(std::span<const double> times, double t);

/// Sorted union of two grids.
std::vector<double> union_grid(std::span<const double> lhs, std::span<const double> rhs);

/// Uniform grid {k/n : k = 0..floor(n*horizon)}.
std::vector<double> uniform_grid(std::size_t n, double horizon);

/// d-dimensional path sampled on a grid, read as a càdlàg step function:
/// x(t) = values[i] for times[i] <= t < times[i+1], constant after the last
/// grid time. Immutable after construction.
class SampledPath {
 public:
  SampledPath() = default;

  /// `values` is row-major: values[i * dim + j] is component j at times[i].
  SampledPath(std::vector<double> times, std::vector<double> values, std::size_t dim);

  static SampledPath from_rows(std::vector<double> times, const std::vector<Vector>& rows);
  static SampledPath constant(std::vector<double> times, const Vector& value);
  /// One-dimensional convenience.
  static SampledPath scalar(std::vector<double> times, std::vector<double> values);

  std::size_t size() const { return times_.size(); }
  std::size_t dim() const { return dim_; }
  bool empty() const { return times_.empty(); }

  std::span<const double> times() const { return times_; }
  double time(std::size_t i) const { return times_[i]; }
  double last_time() const { return times_.back(); }
  std::span<const double> data() const { return values_; }

  Eigen::Map<const Vector> value(std::size_t i) const {
    return Eigen::Map<const Vector>(values_.data() + i * dim_, static_cast<Eigen::Index>(dim_));
  }
  double at(std::size_t i, std::size_t component) const { return values_[i * dim_ + component]; }

  /// Càdlàg evaluation; t must be >= 0.
  Vector eval(double t) const;

  /// Single component as a one-dimensional path on the same grid.
  SampledPath component(std::size_t j) const;

  /// Values at grid points t <= horizon, same grid prefix.
  SampledPath truncated(double horizon) const;

  bool same_grid(const SampledPath& other) const { return times_ == other.times_; }

  friend bool operator==(const SampledPath&, const SampledPath&) = default;

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::size_t dim_ = 0;
};

/// Path of d x d matrices on a grid, same càdlàg reading as SampledPath.
class MatrixPath {
 public:
  MatrixPath() = default;
  MatrixPath(std::vector<double> times, const std::vector<Matrix>& values);
  /// Constant matrix on the given grid.
  static MatrixPath constant(std::vector<double> times, const Matrix& value);

  std::size_t size() const { return times_.size(); }
  std::size_t dim() const { return dim_; }
  std::span<const double> times() const { return times_; }
  double last_time() const { return times_.back(); }

  Eigen::Map<const Matrix> value(std::size_t i) const {
    const auto d = static_cast<Eigen::Index>(dim_);
    return Eigen::Map<const Matrix>(values_.data() + i * dim_ * dim_, d, d);
  }
  Matrix eval(double t) const;

 private:
  std::vector<double> times_;
  std::vector<double> values_;  // column-major blocks of dim*dim
  std::size_t dim_ = 0;
};

/// Resample by càdlàg evaluation onto `grid` (which must be a valid grid).
SampledPath resample(const SampledPath& path, std::span<const double> grid);
MatrixPath resample(const MatrixPath& path, std::span<const double> grid);

SampledPath operator+(const SampledPath& lhs, const SampledPath& rhs);
SampledPath operator-(const SampledPath& lhs, const SampledPath& rhs);
SampledPath operator*(double scale, const SampledPath& path);

/// sup over grid points of the Euclidean norm.
double sup_norm(const SampledPath& path);

/// sup over grid points of the max-abs component norm.
double sup_norm_inf(const SampledPath& path);

/// Operator (spectral) norm via power iteration on AᵀA.
double operator_norm(const Matrix& m);

}  // namespace sweep
