#include "sweep/path.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace sweep {

void validate_grid(std::span<const double> times) {
  if (times.empty()) throw ValidationError("grid is empty");
  if (times[0] != 0.0) throw ValidationError("grid must start at t = 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i])) throw ValidationError("grid contains a non-finite time");
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw ValidationError("grid times must be strictly increasing (index " + std::to_string(i) +
                            ")");
    }
  }
}

std::size_t grid_index(std::span<const double> times, double t) {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return 0;
  return static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
}

std::vector<double> union_grid(std::span<const double> lhs, std::span<const double> rhs) {
  std::vector<double> out;
  out.reserve(lhs.size() + rhs.size());
  std::set_union(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(), std::back_inserter(out));
  return out;
}

std::vector<double> uniform_grid(std::size_t n, double horizon) {
  if (n == 0) throw ValidationError("uniform grid needs n >= 1");
  if (!(horizon > 0.0)) throw ValidationError("horizon must be positive");
  const auto steps = static_cast<std::size_t>(std::floor(static_cast<double>(n) * horizon + 1e-9));
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = static_cast<double>(k) / static_cast<double>(n);
  return grid;
}

SampledPath::SampledPath(std::vector<double> times, std::vector<double> values, std::size_t dim)
    : times_(std::move(times)), values_(std::move(values)), dim_(dim) {
  if (dim_ == 0) throw ValidationError("path dimension must be positive");
  validate_grid(times_);
  if (values_.size() != times_.size() * dim_) {
    throw ValidationError("path has " + std::to_string(values_.size()) + " values, expected " +
                          std::to_string(times_.size() * dim_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw ValidationError("path contains a non-finite value");
  }
}

SampledPath SampledPath::from_rows(std::vector<double> times, const std::vector<Vector>& rows) {
  if (rows.empty()) throw ValidationError("path has no rows");
  const auto dim = static_cast<std::size_t>(rows.front().size());
  std::vector<double> values;
  values.reserve(rows.size() * dim);
  for (const auto& r : rows) {
    if (static_cast<std::size_t>(r.size()) != dim) throw ValidationError("ragged path rows");
    values.insert(values.end(), r.data(), r.data() + r.size());
  }
  return SampledPath(std::move(times), std::move(values), dim);
}

SampledPath SampledPath::constant(std::vector<double> times, const Vector& value) {
  const auto dim = static_cast<std::size_t>(value.size());
  std::vector<double> values;
  values.reserve(times.size() * dim);
  for (std::size_t i = 0; i < times.size(); ++i) values.insert(values.end(), value.data(), value.data() + dim);
  return SampledPath(std::move(times), std::move(values), dim);
}

SampledPath SampledPath::scalar(std::vector<double> times, std::vector<double> values) {
  return SampledPath(std::move(times), std::move(values), 1);
}

Vector SampledPath::eval(double t) const {
  if (t < 0.0) throw ValidationError("path evaluated at negative time");
  return value(grid_index(times_, t));
}

SampledPath SampledPath::component(std::size_t j) const {
  if (j >= dim_) throw ValidationError("component index out of range");
  std::vector<double> values(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) values[i] = at(i, j);
  return SampledPath(times_, std::move(values), 1);
}

SampledPath SampledPath::truncated(double horizon) const {
  const std::size_t last = grid_index(times_, horizon);
  std::vector<double> t(times_.begin(), times_.begin() + static_cast<std::ptrdiff_t>(last + 1));
  std::vector<double> v(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>((last + 1) * dim_));
  return SampledPath(std::move(t), std::move(v), dim_);
}

MatrixPath::MatrixPath(std::vector<double> times, const std::vector<Matrix>& values)
    : times_(std::move(times)) {
  validate_grid(times_);
  if (values.size() != times_.size()) throw ValidationError("matrix path length differs from grid");
  dim_ = static_cast<std::size_t>(values.front().rows());
  if (dim_ == 0) throw ValidationError("matrix path dimension must be positive");
  values_.reserve(values.size() * dim_ * dim_);
  for (const auto& m : values) {
    if (static_cast<std::size_t>(m.rows()) != dim_ || static_cast<std::size_t>(m.cols()) != dim_) {
      throw ValidationError("matrix path entries must be square and equally sized");
    }
    if (!m.allFinite()) throw ValidationError("matrix path contains a non-finite value");
    values_.insert(values_.end(), m.data(), m.data() + m.size());
  }
}

MatrixPath MatrixPath::constant(std::vector<double> times, const Matrix& value) {
  std::vector<Matrix> values(times.size(), value);
  return MatrixPath(std::move(times), values);
}

Matrix MatrixPath::eval(double t) const {
  if (t < 0.0) throw ValidationError("path evaluated at negative time");
  return value(grid_index(times_, t));
}

SampledPath resample(const SampledPath& path, std::span<const double> grid) {
  std::vector<double> values;
  values.reserve(grid.size() * path.dim());
  for (double t : grid) {
    const auto v = path.value(grid_index(path.times(), t));
    values.insert(values.end(), v.data(), v.data() + v.size());
  }
  return SampledPath(std::vector<double>(grid.begin(), grid.end()), std::move(values), path.dim());
}

MatrixPath resample(const MatrixPath& path, std::span<const double> grid) {
  std::vector<Matrix> values;
  values.reserve(grid.size());
  for (double t : grid) values.emplace_back(path.value(grid_index(path.times(), t)));
  return MatrixPath(std::vector<double>(grid.begin(), grid.end()), values);
}

namespace {

template <typename Op>
SampledPath combine(const SampledPath& lhs, const SampledPath& rhs, Op op) {
  if (!lhs.same_grid(rhs)) throw ValidationError("path arithmetic requires a common grid");
  if (lhs.dim() != rhs.dim()) throw ValidationError("path arithmetic requires equal dimensions");
  std::vector<double> values(lhs.data().size());
  std::transform(lhs.data().begin(), lhs.data().end(), rhs.data().begin(), values.begin(), op);
  return SampledPath(std::vector<double>(lhs.times().begin(), lhs.times().end()), std::move(values),
                     lhs.dim());
}

}  // namespace

SampledPath operator+(const SampledPath& lhs, const SampledPath& rhs) {
  return combine(lhs, rhs, std::plus<>());
}

SampledPath operator-(const SampledPath& lhs, const SampledPath& rhs) {
  return combine(lhs, rhs, std::minus<>());
}

SampledPath operator*(double scale, const SampledPath& path) {
  std::vector<double> values(path.data().begin(), path.data().end());
  for (double& v : values) v *= scale;
  return SampledPath(std::vector<double>(path.times().begin(), path.times().end()), std::move(values),
                     path.dim());
}

double sup_norm(const SampledPath& path) {
  double best = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) best = std::max(best, path.value(i).norm());
  return best;
}

double sup_norm_inf(const SampledPath& path) {
  double best = 0.0;
  for (double v : path.data()) best = std::max(best, std::abs(v));
  return best;
}

double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  const Matrix gram = m.transpose() * m;
  // Start from the heaviest column of the Gram matrix so the seed is not
  // orthogonal to the dominant eigenvector in the generic case.
  Eigen::Index col = 0;
  const double heaviest = gram.colwise().norm().maxCoeff(&col);
  if (heaviest == 0.0) return 0.0;
  Vector v = gram.col(col) / heaviest;
  double lambda = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    Vector w = gram * v;
    const double next = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
    if (std::abs(next - lambda) <= 1e-12 * std::abs(next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  // Rayleigh quotient of the final unit vector.
  lambda = std::max(lambda, v.dot(gram * v));
  return std::sqrt(std::max(lambda, 0.0));
}

}  // namespace sweep
