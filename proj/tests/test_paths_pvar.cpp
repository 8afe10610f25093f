#include "support.hpp"

#include "sweep/csv.hpp"
#include "sweep/pvar.hpp"

#include <doctest.h>

#include <sstream>

using namespace sweep;
using namespace sweep::testing;

TEST_CASE("step path evaluation is right-continuous and constant after the last time") {
  const SampledPath x = SampledPath::scalar({0.0, 1.0}, {2.0, 5.0});
  CHECK(x.eval(0.5)[0] == 2.0);
  CHECK(x.eval(1.0)[0] == 5.0);
  CHECK(x.eval(7.0)[0] == 5.0);
  CHECK(x.eval(0.0)[0] == 2.0);
}

TEST_CASE("grids are validated") {
  CHECK_THROWS_AS(SampledPath::scalar({0.5, 1.0}, {1.0, 2.0}), ValidationError);
  CHECK_THROWS_AS(SampledPath::scalar({0.0, 1.0, 1.0}, {1.0, 2.0, 3.0}), ValidationError);
  CHECK_THROWS_AS(SampledPath::scalar({0.0, 1.0}, {1.0}), ValidationError);
  CHECK_THROWS_AS(SampledPath::scalar({0.0, 1.0}, {1.0, std::nan("")}), ValidationError);
  CHECK_THROWS_AS(uniform_grid(0, 1.0), ValidationError);
  const auto g = uniform_grid(4, 1.0);
  CHECK(g == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(uniform_grid(4, 0.6).size() == 3);
}

TEST_CASE("resampling onto a finer grid reproduces the step function") {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto grid = random_grid(rng, 8);
    const SampledPath x = random_path_on(rng, grid, 2);
    const auto fine = union_grid(grid, random_grid(rng, 12));
    const SampledPath y = resample(x, fine);
    for (double t : fine) CHECK((y.eval(t) - x.eval(t)).norm() == 0.0);
    CHECK(resample(y, grid) == x);
  }
}

TEST_CASE("p-variation of small examples") {
  const SampledPath x = SampledPath::scalar({0, 1, 2, 3}, {0, 2, 1, 3});
  CHECK(p_variation(x, 1.0).value == 5.0);
  CHECK(p_variation(x, 2.0).value == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(p_variation(x, 2.0).norm == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(p_variation(x, 2.0).bar_norm == doctest::Approx(3.0).epsilon(1e-15));

  const SampledPath c = SampledPath::scalar({0, 1, 2}, {4, 4, 4});
  for (double p : {1.0, 1.5, 2.0, 7.0}) CHECK(p_variation(c, p).value == 0.0);
  CHECK(p_variation(c, 2.0).bar_norm == 4.0);

  CHECK_THROWS_AS(p_variation(x, 0.5), ValidationError);
  CHECK_THROWS_AS(p_variation(x, 2.0, Interval{2.0, 1.0}), ValidationError);
}

TEST_CASE("p-variation over an interval inserts the endpoints") {
  const SampledPath x = SampledPath::scalar({0, 1, 2, 3}, {0, 2, 1, 3});
  // On [0.5, 2.5] the step path takes the values 0, 2, 1.
  CHECK(p_variation(x, 1.0, Interval{0.5, 2.5}).value == 3.0);
  CHECK(p_variation(x, 2.0, Interval{0.5, 2.5}).value == doctest::Approx(5.0));
  CHECK(p_variation(x, 1.0, Interval{1.5, 1.9}).value == 0.0);
  CHECK(p_variation(x, 1.0, Interval{1.0, 3.0}).bar_norm == 2.0 + 3.0);
}

TEST_CASE("oscillation examples") {
  const SampledPath x = SampledPath::scalar({0, 1, 2, 3}, {0, 2, 1, 3});
  CHECK(oscillation(x, 3.0) == 3.0);
  CHECK(oscillation(x, 1.5) == 2.0);
  CHECK(oscillation(SampledPath::scalar({0, 1}, {2, 2}), 1.0) == 0.0);
  const SampledPath v = SampledPath::from_rows({0, 1}, {Vector::Zero(2), (Vector(2) << 3, 4).finished()});
  CHECK(oscillation(v, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("dynamic program agrees with exhaustive enumeration") {
  Rng rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = uniform_index(rng, 2, 12);
    const std::size_t d = uniform_index(rng, 1, 3);
    const SampledPath x = coin(rng, 0.5) ? random_path_on(rng, random_grid(rng, n), d)
                                         : random_walk_on(rng, random_grid(rng, n), d);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double expected = brute_force_pvar(rows_of(x), p);
      const double got = p_variation(x, p).value;
      CHECK(std::abs(got - expected) <= 1e-12 * std::max(1.0, expected));
    }
  }
}

TEST_CASE("p = 1 equals the sum of absolute increments exactly") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const SampledPath x = random_walk_on(rng, random_grid(rng, uniform_index(rng, 2, 200)), 1);
    double sum = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) sum += std::abs(x.at(i, 0) - x.at(i - 1, 0));
    CHECK(p_variation(x, 1.0).value == sum);
  }
}

TEST_CASE("adding grid points never decreases the p-variation") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto grid = random_grid(rng, uniform_index(rng, 3, 30));
    const SampledPath x = random_path_on(rng, grid, uniform_index(rng, 1, 2));
    // Coarse path: a random subset of the grid points, same values there.
    std::vector<double> coarse_grid{0.0};
    std::vector<Vector> coarse_rows{x.value(0)};
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (coin(rng, 0.5) || i + 1 == x.size()) {
        coarse_grid.push_back(x.time(i));
        coarse_rows.emplace_back(x.value(i));
      }
    }
    const SampledPath coarse = SampledPath::from_rows(coarse_grid, coarse_rows);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      CHECK(p_variation(x, p).value >= p_variation(coarse, p).value * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("p-variation is superadditive over concatenation") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto grid = random_grid(rng, uniform_index(rng, 3, 40));
    const SampledPath x = random_walk_on(rng, grid, uniform_index(rng, 1, 2));
    const double b = grid[uniform_index(rng, 1, grid.size() - 2)];
    const double c = grid.back();
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double whole = p_variation(x, p, Interval{0.0, c}).value;
      const double left = p_variation(x, p, Interval{0.0, b}).value;
      const double right = p_variation(x, p, Interval{b, c}).value;
      CHECK(whole >= (left + right) * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("matrix paths use the operator norm") {
  Matrix a = Matrix::Zero(2, 2);
  Matrix b(2, 2);
  b << 3, 0, 0, -4;
  const MatrixPath w({0.0, 1.0}, {a, b});
  CHECK(p_variation(w, 2.0).norm == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(operator_norm(b) == doctest::Approx(4.0).epsilon(1e-12));
  Matrix r(2, 2);
  r << 1, 2, 3, 4;
  CHECK(operator_norm(r) == doctest::Approx(5.464985704219043).epsilon(1e-12));
}

TEST_CASE("interpolation bound") {
  const SampledPath c = SampledPath::scalar({0, 1, 2}, {1, 1, 1});
  const auto zero = interpolation_bound(c, 1.5, 0.5, 2.0);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);

  const SampledPath jump = SampledPath::scalar({0, 1}, {0, 1});
  const auto one = interpolation_bound(jump, 1.5, 0.5, 1.0);
  CHECK(one.lhs == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(one.rhs == doctest::Approx(1.0).epsilon(1e-15));

  Rng rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    const SampledPath x = random_walk_on(rng, random_grid(rng, uniform_index(rng, 2, 40)), uniform_index(rng, 1, 2));
    const double p = uniform(rng, 1.0, 3.0);
    const double eps = uniform(rng, 0.01, 2.0);
    const auto r = interpolation_bound(x, p, eps, x.last_time());
    CHECK(r.lhs <= r.rhs * (1.0 + 1e-9) + 1e-300);
  }
}

TEST_CASE("p-variation cap raises instead of approximating") {
  std::vector<double> grid, values;
  for (int i = 0; i < 50; ++i) {
    grid.push_back(i);
    values.push_back(i % 2);
  }
  const SampledPath x = SampledPath::scalar(grid, values);
  CHECK_THROWS_AS(p_variation(x, 2.0, {}, PVarOptions{10}), NumericalError);
  CHECK(p_variation(x, 2.0, {}, PVarOptions{50}).value == doctest::Approx(49.0));
}

TEST_CASE("path CSV round trip is bit-exact") {
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto grid = random_grid(rng, uniform_index(rng, 1, 30));
    SampledPath x = random_path_on(rng, grid, uniform_index(rng, 1, 3), std::pow(10.0, uniform(rng, -300, 300)));
    std::stringstream buf;
    csv::write_path(buf, x);
    CHECK(csv::read_path(buf) == x);
  }
  std::stringstream bad("t,x1\n0,1\n1,abc\n");
  CHECK_THROWS_AS(csv::read_path(bad), ValidationError);
}
