// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "support.hpp"

#include "sweep/cli.hpp"
#include "sweep/config.hpp"
#include "sweep/drivers.hpp"
#include "sweep/pvar.hpp"
#include "sweep/solver.hpp"
#include "sweep/young.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace sweep;
using namespace sweep::testing;
using nlohmann::json;

namespace {

// Tolerances and limits.
constexpr double kPvarRelTol = 1e-12;
constexpr double kPvarTimeLimit = 10.0;
constexpr double kLipschitzSlack = 1e-9;
constexpr double kLipschitzTimeLimit = 60.0;
constexpr double kZetaTol = 1e-6;
constexpr double kZeta15 = 2.612375;
constexpr double kSeLimit = 4.0;
constexpr double kFbmTimeLimit = 120.0;
constexpr double kPicardTol = 1e-8;
constexpr double kCrossSchemeTol = 10.0 * kPicardTol;
constexpr std::uint64_t kConvergenceSeed = 2024;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

/// Barriers with a collapsed stretch l = u plus isolated collapsed points.
BarrierPair barriers_with_collapse(Rng& rng, const std::vector<double>& grid) {
  const BarrierPair base = random_barriers(rng, grid, 1, 0.1);
  std::vector<double> lo(base.lower().data().begin(), base.lower().data().end());
  std::vector<double> hi(base.upper().data().begin(), base.upper().data().end());
  if (grid.size() > 2 && coin(rng, 0.7)) {
    const std::size_t a = uniform_index(rng, 1, grid.size() - 1);
    const std::size_t b = uniform_index(rng, a, std::min(grid.size() - 1, a + 8));
    for (std::size_t i = a; i <= b; ++i) hi[i] = lo[i];
  }
  return BarrierPair(SampledPath(grid, std::move(lo), 1), SampledPath(grid, std::move(hi), 1));
}

Outcome pvar_oracle() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(101);
  double worst = 0.0;
  std::size_t compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = uniform_index(rng, 2, 14);
    const std::size_t d = uniform_index(rng, 1, 3);
    const auto grid = random_grid(rng, n);
    const SampledPath x = coin(rng, 0.5) ? random_path_on(rng, grid, d) : random_walk_on(rng, grid, d);
    const auto rows = rows_of(x);
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const double expected = brute_force_pvar(rows, p);
      const double got = p_variation(x, p).value;
      const double err = expected == 0.0 ? std::abs(got) : std::abs(got - expected) / expected;
      worst = std::max(worst, err);
      ++compared;
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= kPvarRelTol && elapsed <= kPvarTimeLimit,
          std::to_string(compared) + " comparisons, max rel err " + num(worst) + ", " + num(elapsed) + " s"};
}

Outcome lipschitz_1d() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(102);
  std::size_t violations = 0;
  std::size_t collapsed = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto grid = random_grid(rng, uniform_index(rng, 2, 50));
    const BarrierPair b = barriers_with_collapse(rng, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (b.lower().at(i, 0) == b.upper().at(i, 0)) {
        ++collapsed;
        break;
      }
    }
    const SampledPath y1 = random_input(rng, b);
    const SampledPath y2 = random_input(rng, b);
    for (double p : {1.0, 1.3, 1.7, 2.0}) {
      const LipschitzGap g = esp_lipschitz_gap(y1, y2, b, p);
      if (g.lhs_k > g.rhs * (1.0 + kLipschitzSlack)) ++violations;
      if (g.rhs > 0.0) worst = std::max(worst, g.lhs_k / g.rhs);
    }
  }
  const double elapsed = seconds_since(start);
  return {violations == 0 && elapsed <= kLipschitzTimeLimit,
          "40000 checks (" + std::to_string(collapsed) + " instances with l = u), " + std::to_string(violations) +
              " violations, max ratio " + num(worst) + ", " + num(elapsed) + " s"};
}

Outcome lipschitz_multi() {
  Rng rng(103);
  std::size_t violations = 0;
  double worst_k = 0.0;
  double worst_x = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = trial % 2 == 0 ? 2 : 3;
    const auto grid = random_grid(rng, uniform_index(rng, 2, 40));
    const BarrierPair b = random_barriers(rng, grid, d, 0.1);
    const SampledPath y1 = random_input(rng, b);
    const SampledPath y2 = random_input(rng, b);
    const double p = std::vector<double>{1.0, 1.3, 1.7, 2.0}[uniform_index(rng, 0, 3)];
    const LipschitzGap g = esp_lipschitz_gap(y1, y2, b, p);
    const double dd = static_cast<double>(d);
    if (g.lhs_k > dd * g.rhs * (1.0 + kLipschitzSlack)) ++violations;
    if (g.lhs_x > (dd + 1.0) * g.rhs * (1.0 + kLipschitzSlack)) ++violations;
    if (g.rhs > 0.0) {
      worst_k = std::max(worst_k, g.lhs_k / (dd * g.rhs));
      worst_x = std::max(worst_x, g.lhs_x / ((dd + 1.0) * g.rhs));
    }
  }
  return {violations == 0, "2000 instances d in {2, 3}, " + std::to_string(violations) +
                               " violations, max k ratio " + num(worst_k) + ", max x ratio " + num(worst_x)};
}

Outcome verifier() {
  Rng rng(104);
  std::size_t solved = 0;
  std::size_t rejected_solutions = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t d = uniform_index(rng, 1, 3);
    const auto grid = random_grid(rng, uniform_index(rng, 2, 50));
    const BarrierPair b = random_barriers(rng, grid, d, 0.15);
    const EspSolution sol = esp_solve(random_input(rng, b, std::pow(10.0, uniform(rng, -2, 3))), b);
    ++solved;
    if (!verify_esp(sol, b).passed) ++rejected_solutions;
  }
  std::size_t caught = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = uniform_index(rng, 1, 3);
    const auto grid = random_grid(rng, uniform_index(rng, 2, 50));
    const BarrierPair b = random_barriers(rng, grid, d, 0.15);
    const SampledPath y = random_input(rng, b);
    const EspSolution sol = esp_solve(y, b);
    std::vector<double> k(sol.k.data().begin(), sol.k.data().end());
    const std::size_t at = uniform_index(rng, 0, k.size() - 1);
    k[at] += (coin(rng, 0.5) ? 1.0 : -1.0) * std::pow(10.0, uniform(rng, -6, 0));
    const SampledPath bad_k(grid, std::move(k), d);
    const EspSolution mutated{trial % 2 == 0 ? y + bad_k : sol.x, bad_k, y};
    if (!verify_esp(mutated, b).passed) ++caught;
  }
  return {rejected_solutions == 0 && caught == 100,
          std::to_string(solved - rejected_solutions) + "/" + std::to_string(solved) + " solutions verified, " +
              std::to_string(caught) + "/100 mutations rejected"};
}

Outcome young_loeve() {
  Rng rng(105);
  std::size_t violations = 0;
  double worst = 0.0;
  for (auto [p, q] : std::vector<std::pair<double, double>>{{1.8, 1.1}, {1.5, 1.2}}) {
    for (int trial = 0; trial < 500; ++trial) {
      const std::size_t d = uniform_index(rng, 1, 2);
      const auto grid = random_grid(rng, uniform_index(rng, 2, 40));
      const SampledPath z = random_walk_on(rng, grid, d);
      std::vector<Matrix> rows;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (Eigen::Index e = 0; e < m.size(); ++e) m.data()[e] = uniform(rng, -3, 3);
        rows.push_back(m);
      }
      const YoungBound b = young_loeve_check(MatrixPath(grid, rows), z, p, q);
      if (!b.holds()) ++violations;
      if (b.bound > 0.0) worst = std::max(worst, b.lhs / b.bound);
    }
  }
  const double zeta = riemann_zeta(1.5);
  const bool zeta_ok = std::abs(zeta - kZeta15) <= kZetaTol;
  return {violations == 0 && zeta_ok, "1000 pairs, " + std::to_string(violations) + " violations, max lhs/bound " +
                                          num(worst) + ", zeta(3/2) = " + std::to_string(zeta)};
}

Outcome fbm_statistics() {
  const auto start = std::chrono::steady_clock::now();
  Rng rng(106);
  const auto grid = uniform_grid(63, 1.0);
  std::size_t failures = 0;
  std::size_t checks = 0;
  double worst = 0.0;
  auto check = [&](const std::vector<SampledPath>& paths, std::size_t i, std::size_t j, double expected) {
    const double n = static_cast<double>(paths.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& path : paths) {
      const double v = path.at(i, 0) * path.at(j, 0);
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / (n - 1.0));
    const double z = std::abs(mean - expected) / se;
    worst = std::max(worst, z);
    ++checks;
    if (z > kSeLimit) ++failures;
  };
  for (double h : {0.6, 0.75, 0.9}) {
    FbmConfig cfg;
    cfg.hurst = h;
    cfg.grid = grid;
    cfg.seed = 7000 + static_cast<std::uint64_t>(h * 100);
    cfg.n_paths = 10000;
    const auto paths = fbm_sample(cfg);
    for (int pair = 0; pair < 10; ++pair) {
      const std::size_t i = uniform_index(rng, 1, grid.size() - 1);
      const std::size_t j = uniform_index(rng, 1, grid.size() - 1);
      check(paths, i, j, fbm_covariance(grid[i], grid[j], h));
    }
  }
  FbmConfig bm;
  bm.hurst = 0.5;
  bm.grid = grid;
  bm.seed = 7050;
  bm.n_paths = 10000;
  const auto paths = fbm_sample(bm);
  for (std::size_t i : {1, 16, 32, 63}) check(paths, i, i, grid[i]);
  const double elapsed = seconds_since(start);
  return {failures == 0 && elapsed <= kFbmTimeLimit,
          std::to_string(checks) + " covariance checks (4 of them Var(B_t) = t at H = 0.5), max |z| " + num(worst) +
              ", " + num(elapsed) + " s"};
}

ProblemSpec registry_problem(std::uint64_t seed) {
  json doc = json::parse(R"({
    "x0": 0.5, "p": 1.5, "grid": {"n": 4096, "horizon": 1},
    "drift": {"name": "linear", "k": -1},
    "diffusion": {"name": "cos", "amp": 0.3},
    "z": {"kind": "fbm", "hurst": 0.75},
    "barriers": {"lower": 0, "upper": 1}
  })");
  doc["z"]["seed"] = seed;
  return config::parse_problem(doc);
}

Outcome euler_convergence() {
  const ProblemSpec spec = registry_problem(kConvergenceSeed);
  const std::vector<std::size_t> levels{64, 128, 256, 512, 1024, 2048};
  const auto gaps = euler_level_gaps(spec, levels);
  bool decreasing = true;
  std::string table;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (i > 0 && !(gaps[i] < gaps[i - 1])) decreasing = false;
    table += (i ? " " : "") + num(gaps[i]);
  }
  const SolveReport euler = euler_solve(spec, 4096);
  const SolveReport picard = picard_solve(spec, PicardOptions{kPicardTol, 200});
  const double cross = sup_norm_inf(resample(picard.solution.x, euler.solution.x.times()) - euler.solution.x);
  return {decreasing && cross <= kCrossSchemeTol,
          "seed " + std::to_string(kConvergenceSeed) + ", level gaps n = 64..2048: " + table +
              (decreasing ? " (strictly decreasing)" : " (NOT strictly decreasing)") + "; |Euler 4096 - Picard| " +
              num(cross) + " after " + std::to_string(picard.iterations) + " iterations"};
}

Outcome stability() {
  const std::vector<std::string> configs{
      R"({"x0": 0.5, "p": 1.5, "grid": {"n": 512},
          "drift": {"name": "linear", "k": -1}, "diffusion": {"name": "cos", "amp": 0.3},
          "z": {"kind": "fbm", "hurst": 0.75, "seed": 31},
          "barriers": {"lower": 0, "upper": 1}})",
      R"({"x0": [0.2, -0.1], "p": 1.6, "grid": {"n": 256},
          "drift": {"name": "affine", "k": -0.5, "c": 0.3}, "diffusion": {"name": "sin", "amp": 0.4, "freq": 2},
          "z": {"kind": "fbm", "hurst": 0.8, "seed": 32},
          "barriers": {"lower": {"kind": "sine", "offset": -0.6, "amp": 0.2, "freq": 1},
                       "upper": {"kind": "sine", "offset": 0.6, "amp": 0.2, "freq": 1.5}}})",
      R"({"x0": 0.1, "p": 1.4, "grid": {"n": 256},
          "drift": {"name": "table", "x": [-1, 0, 1], "y": [0.5, 0.2, -0.8]},
          "diffusion": {"name": "table", "x": [-1, 0, 1], "y": [0.2, 0.5, 0.3]},
          "a": {"kind": "values", "grid": [0, 0.3, 0.6, 1], "values": [0, 0.5, 0.2, 1.2]},
          "z": {"kind": "fbm", "hurst": 0.9, "seed": 33},
          "barriers": {"lower": {"kind": "sine", "offset": -0.2, "amp": 0.3, "freq": 1}, "upper": 0.6}})"};
  const std::vector<double> eps{1e-1, 1e-2, 1e-3};
  const std::vector<double> zero{0.0};
  std::size_t failures = 0;
  std::size_t tables = 0;
  std::string notes;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const ProblemSpec spec = config::parse_problem(json::parse(configs[c]));
    for (auto [name, kind] : std::vector<std::pair<const char*, PerturbKind>>{
             {"f", PerturbKind::drift}, {"g", PerturbKind::diffusion}, {"x0", PerturbKind::initial}}) {
      const StabilityTable exact = stability_experiment(spec, make_perturbations(spec, kind, zero));
      const StabilityTable table = stability_experiment(spec, make_perturbations(spec, kind, eps));
      ++tables;
      const bool zero_ok = exact.rows[0].error.empty() && exact.rows[0].gap_x == 0.0 && exact.rows[0].gap_k == 0.0;
      bool strictly = table.decreasing;
      for (const auto& row : table.rows) strictly = strictly && row.error.empty() && row.gap_x > 0.0;
      if (!zero_ok || !strictly) {
        ++failures;
        notes += " problem " + std::to_string(c + 1) + "/" + name;
      }
    }
  }
  return {failures == 0, std::to_string(tables) + " perturbation tables over 3 problems, " +
                             std::to_string(failures) + " not decreasing or not exact at eps = 0" + notes};
}

std::string slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "sweep_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  std::ostringstream sink;
  auto run = [&](std::vector<std::string> args) { return cli::run(args, sink, sink); };
  {
    std::ofstream cfg(root / "mc.json");
    cfg << R"({"x0": 0.5, "p": 1.5, "grid": {"n": 256},
               "drift": {"name": "linear", "k": -1}, "diffusion": {"name": "cos", "amp": 0.3},
               "barriers": {"lower": 0, "upper": 1},
               "fbm": {"hurst": 0.75, "seed": 5, "paths": 50}})";
  }
  int codes = 0;
  codes |= run({"fbm", "--hurst", "0.7", "--n", "128", "--paths", "20", "--seed", "42", "--out", (root / "f1").string()});
  codes |= run({"fbm", "--manifest", (root / "f1" / "manifest.json").string(), "--out", (root / "f2").string()});
  codes |= run({"mc", "--config", (root / "mc.json").string(), "--out", (root / "m1").string()});
  codes |= run({"mc", "--manifest", (root / "m1" / "manifest.json").string(), "--out", (root / "m2").string()});
  std::size_t files = 0;
  std::size_t identical = 0;
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{{"f1", "f2"}, {"m1", "m2"}}) {
    const json manifest = json::parse(slurp(root / a / "manifest.json"));
    for (const auto& entry : manifest["outputs"]) {
      const std::string name = entry["file"];
      ++files;
      const std::string lhs = slurp(root / a / name);
      if (!lhs.empty() && lhs == slurp(root / b / name) && entry["sha256"] == cli::sha256_hex(lhs)) ++identical;
    }
  }
  fs::remove_all(root);
  return {codes == 0 && files > 0 && identical == files,
          std::to_string(identical) + "/" + std::to_string(files) + " replayed fbm/mc outputs byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"p-variation equals exhaustive enumeration", pvar_oracle},
      {"1-d regulator Lipschitz bound in p-variation", lipschitz_1d},
      {"d-dimensional Lipschitz constants d and d + 1", lipschitz_multi},
      {"ESP verifier accepts solutions and rejects mutations", verifier},
      {"Young-Loeve bound and zeta(3/2)", young_loeve},
      {"fBm covariance statistics", fbm_statistics},
      {"Euler self-convergence and agreement with Picard", euler_convergence},
      {"stability under perturbation of f, g, x0", stability},
      {"fbm/mc reruns from manifest are byte-identical", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail
              << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
