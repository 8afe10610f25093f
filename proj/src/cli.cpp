#include "sweep/cli.hpp"

#include "sweep/config.hpp"
#include "sweep/csv.hpp"
#include "sweep/pvar.hpp"
#include "sweep/solver.hpp"
#include "sweep/young.hpp"

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifndef SWEEP_VERSION
#define SWEEP_VERSION "0.0.0"
#endif

namespace sweep::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) { return csv::format_double(v); }

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + file.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + file.string() + "'");
  out << text;
}

fs::path ensure_dir(const fs::path& dir) {
  if (dir.empty()) throw ValidationError("--out: output directory required");
  fs::create_directories(dir);
  return dir;
}

/// Parses `args` with CLI11; returns an exit code when the caller should stop.
std::optional<int> parse(CLI::App& app, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitValidation;
  }
  return std::nullopt;
}

std::uint64_t seed_of(const json& doc) {
  for (const char* key : {"z", "fbm"}) {
    if (doc.contains(key) && doc[key].is_object() && doc[key].contains("seed") && doc[key]["seed"].is_number()) {
      return doc[key]["seed"].get<std::uint64_t>();
    }
  }
  return 0;
}

/// Columns [first, first + count) of a path CSV as a path.
SampledPath columns(const SampledPath& path, std::size_t first, std::size_t count) {
  std::vector<double> values;
  values.reserve(path.size() * count);
  for (std::size_t i = 0; i < path.size(); ++i) {
    for (std::size_t j = 0; j < count; ++j) values.push_back(path.at(i, first + j));
  }
  return SampledPath(std::vector<double>(path.times().begin(), path.times().end()), std::move(values), count);
}

/// Matrix path CSV: `t,w11,w12,...,wdd` with entries row-major.
MatrixPath read_matrix_path(const fs::path& file, std::size_t d) {
  const SampledPath flat = csv::read_path(file);
  if (flat.dim() != d * d) {
    throw ValidationError("--w: expected " + std::to_string(d * d) + " value columns for a " + std::to_string(d) +
                          "x" + std::to_string(d) + " integrand, got " + std::to_string(flat.dim()));
  }
  std::vector<Matrix> rows;
  rows.reserve(flat.size());
  for (std::size_t i = 0; i < flat.size(); ++i) {
    Matrix m(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = flat.at(i, r * d + c);
      }
    }
    rows.push_back(std::move(m));
  }
  return MatrixPath(std::vector<double>(flat.times().begin(), flat.times().end()), rows);
}

/// Grid file: one time per line (first column), header line optional.
std::vector<double> read_grid_file(const fs::path& file) {
  std::istringstream in(read_file(file));
  std::vector<double> grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string cell = line.substr(0, line.find(','));
    try {
      grid.push_back(csv::parse_double(cell));
    } catch (const ValidationError&) {
      if (line_no == 1) continue;
      throw ValidationError("--grid-file: line " + std::to_string(line_no) + ": not a number");
    }
  }
  validate_grid(grid);
  return grid;
}

void write_solution(const fs::path& file, const EspSolution& sol) {
  csv::write_paths(file, {{"x", &sol.x}, {"k", &sol.k}, {"y", &sol.y}});
}

void print_warnings(const ProblemSpec& spec, std::ostream& err) {
  const double radius = std::max({1.0, sup_norm(spec.barriers.lower()), sup_norm(spec.barriers.upper())});
  const ProbeReport probe = probe_constants(spec.coeffs, spec.dim(), radius, spec.resolved_horizon());
  for (const auto& w : probe.warnings) err << "warning: " << w << "\n";
}

struct ProblemInput {
  json doc;
  fs::path base_dir;
  ProblemSpec spec;
};

ProblemInput load_problem(const fs::path& file) {
  ProblemInput in;
  in.doc = config::read_json(file);
  in.base_dir = fs::absolute(file).parent_path();
  in.spec = config::parse_problem(in.doc, in.base_dir);
  return in;
}

RunManifest manifest_for(std::string command, json config, std::uint64_t seed) {
  RunManifest m;
  m.command = std::move(command);
  m.config = std::move(config);
  m.seed = seed;
  m.version = version();
  return m;
}

void finish(RunManifest& manifest, Clock::time_point start, const fs::path& file) {
  manifest.wall_time_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  manifest.write(file);
}

int cmd_esp(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solve the extended Skorokhod problem for a step input", "sweep esp"};
  std::string input, output;
  bool check = false;
  app.add_option("--input", input, "instance JSON {grid, y, l, u, h?}")->required();
  app.add_option("--out", output, "solution CSV (t, x*, k*)")->required();
  app.add_flag("--verify", check, "run the ESP verifier on the result");
  if (auto code = parse(app, args, out, err)) return *code;

  const auto start = Clock::now();
  const json doc = config::read_json(input);
  const config::EspInstance inst = config::parse_esp_instance(doc);
  const EspSolution sol = esp_solve(inst.y, inst.barriers);
  csv::write_paths(output, {{"x", &sol.x}, {"k", &sol.k}});
  if (check) {
    const VerificationReport rep = verify_esp(sol, inst.barriers);
    out << (rep.passed ? "verify: PASS" : "verify: FAIL " + rep.reason) << "\n";
    if (!rep.passed) return kExitNumerical;
  }
  RunManifest m = manifest_for("esp", doc, 0);
  m.outputs.push_back(fs::path(output).filename());
  finish(m, start, fs::path(output).replace_extension(".manifest.json"));
  return kExitOk;
}

int cmd_pvar(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"p-variation of a sampled path", "sweep pvar"};
  std::string file;
  double p = 1.0;
  std::optional<double> from, to;
  app.add_option("--path", file, "path CSV (t, x1, ..., xd)")->required();
  app.add_option("--p", p, "exponent p >= 1")->required();
  app.add_option("--from", from, "interval start (default 0)");
  app.add_option("--to", to, "interval end (default last grid time)");
  if (auto code = parse(app, args, out, err)) return *code;

  const SampledPath path = csv::read_path(fs::path(file));
  std::optional<Interval> iv;
  if (from || to) iv = Interval{from.value_or(0.0), to.value_or(path.last_time())};
  const VariationResult r = p_variation(path, p, iv);
  out << "v_p " << fmt(r.value) << "\n";
  out << "V_p " << fmt(r.norm) << "\n";
  out << "barV_p " << fmt(r.bar_norm) << "\n";
  return kExitOk;
}

int cmd_young(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Young integral int w dz by left-point sums", "sweep young"};
  std::string wfile, zfile, output;
  std::optional<double> p, q;
  app.add_option("--w", wfile, "integrand CSV (t, w11, w12, ..., wdd), row-major")->required();
  app.add_option("--z", zfile, "integrator CSV (t, z1, ..., zd)")->required();
  app.add_option("--out", output, "integral CSV")->required();
  app.add_option("--p", p, "variation exponent of z, for the bound check");
  app.add_option("--q", q, "variation exponent of w, for the bound check");
  if (auto code = parse(app, args, out, err)) return *code;

  const auto start = Clock::now();
  const SampledPath z = csv::read_path(fs::path(zfile));
  const MatrixPath w = read_matrix_path(wfile, z.dim());
  auto [wm, zm] = merge_grids(w, z);
  const SampledPath integral = young_integral(wm, zm);
  csv::write_path(fs::path(output), integral, "i");
  out << "integral_T";
  for (std::size_t j = 0; j < integral.dim(); ++j) out << " " << fmt(integral.at(integral.size() - 1, j));
  out << "\n";
  if (p && q) {
    const YoungBound b = young_loeve_check(wm, zm, *p, *q);
    out << "lhs " << fmt(b.lhs) << "\nbound " << fmt(b.bound) << "\nholds " << (b.holds() ? "yes" : "no") << "\n";
  }
  json cfg = {{"w", wfile}, {"z", zfile}};
  if (p) cfg["p"] = *p;
  if (q) cfg["q"] = *q;
  RunManifest m = manifest_for("young", cfg, 0);
  m.outputs.push_back(fs::path(output).filename());
  finish(m, start, fs::path(output).replace_extension(".manifest.json"));
  return kExitOk;
}

int run_fbm(const json& cfg_doc, const fs::path& dir, std::ostream& out) {
  const auto start = Clock::now();
  const FbmConfig cfg = config::parse_fbm(cfg_doc, 1);
  const FbmSampler sampler(cfg);
  const auto paths = sampler.sample_all();
  ensure_dir(dir);
  RunManifest m = manifest_for("fbm", cfg_doc, cfg.seed);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "path_%06zu.csv", i);
    csv::write_path(dir / name, paths[i], "b");
    m.outputs.emplace_back(name);
  }
  m.extra["hurst"] = cfg.hurst;
  m.extra["n"] = cfg.grid.size();
  m.extra["grid_hash"] = sha256_hex(json(cfg.grid).dump());
  finish(m, start, dir / "manifest.json");
  out << "wrote " << paths.size() << " paths to " << dir.string() << "\n";
  return kExitOk;
}

json replay_config(const std::string& manifest_file, const std::string& command) {
  const json m = config::read_json(manifest_file);
  if (!m.is_object() || m.value("command", "") != command || !m.contains("config")) {
    throw ValidationError("--manifest: not a '" + command + "' run manifest");
  }
  return m["config"];
}

int cmd_fbm(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sample fractional Brownian motion paths", "sweep fbm"};
  double hurst = 0.75, horizon = 1.0;
  std::size_t n = 256, paths = 1, dim = 1;
  std::uint64_t seed = 0;
  std::string grid_file, dir, manifest;
  app.add_option("--hurst", hurst, "Hurst index in [0.5, 1)");
  app.add_option("--grid-file", grid_file, "grid CSV, one time per line");
  app.add_option("--n", n, "uniform grid k/n on [0, horizon] when no grid file is given");
  app.add_option("--horizon", horizon, "horizon of the uniform grid");
  app.add_option("--paths", paths, "number of paths");
  app.add_option("--dim", dim, "components per path");
  app.add_option("--seed", seed, "RNG seed");
  app.add_option("--manifest", manifest, "replay the run described by this manifest");
  app.add_option("--out", dir, "output directory")->required();
  if (auto code = parse(app, args, out, err)) return *code;

  json cfg;
  if (!manifest.empty()) {
    cfg = replay_config(manifest, "fbm");
  } else {
    const auto grid = grid_file.empty() ? uniform_grid(n, horizon) : read_grid_file(grid_file);
    cfg = {{"hurst", hurst}, {"grid", grid}, {"paths", paths}, {"seed", seed}, {"dim", dim}};
  }
  return run_fbm(cfg, dir, out);
}

std::string row_of(const Vector& v) {
  std::string s;
  for (Eigen::Index j = 0; j < v.size(); ++j) s += (j ? "," : "") + fmt(v[j]);
  return s;
}

int run_mc(const json& doc, const fs::path& base_dir, const fs::path& dir, std::ostream& out) {
  const auto start = Clock::now();
  const ProblemSpec spec = config::parse_problem(doc, base_dir);
  json fbm_doc = doc.value("fbm", json::object());
  if (!fbm_doc.contains("grid") && !fbm_doc.contains("n")) fbm_doc["grid"] = config::default_grid(doc);
  const FbmConfig fbm = config::parse_fbm(fbm_doc, spec.dim());
  const SigmaWeight sigma = config::parse_sigma(doc.value("sigma", json()), fbm.grid, spec.dim(), fbm.hurst, base_dir);
  std::size_t level = 512;
  if (doc.contains("grid") && doc["grid"].is_object()) level = std::max<std::size_t>(1, doc["grid"].value("n", 1024) / 2);
  level = doc.value("level", level);
  const StochasticReport rep = stochastic_solve(spec, fbm, sigma, level, true);

  ensure_dir(dir);
  const std::size_t d = spec.dim();
  std::ostringstream paths_csv;
  paths_csv << "path";
  for (std::size_t j = 1; j <= d; ++j) paths_csv << ",x" << j << "_T";
  for (std::size_t j = 1; j <= d; ++j) paths_csv << ",k" << j << "_T";
  paths_csv << ",level_gap,error\n";
  Vector mean_x = Vector::Zero(static_cast<Eigen::Index>(d));
  std::size_t ok = 0;
  for (std::size_t i = 0; i < rep.gaps.size(); ++i) {
    paths_csv << i;
    if (rep.paths[i]) {
      const EspSolution& sol = rep.paths[i]->solution;
      const Vector x_t = sol.x.value(sol.x.size() - 1);
      mean_x += x_t;
      ++ok;
      paths_csv << "," << row_of(x_t) << "," << row_of(sol.k.value(sol.k.size() - 1)) << "," << fmt(rep.gaps[i])
                << ",\n";
    } else {
      for (std::size_t j = 0; j < 2 * d + 1; ++j) paths_csv << ",nan";
      std::string msg = rep.errors[i];
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      paths_csv << "," << msg << "\n";
    }
  }
  if (ok > 0) mean_x /= static_cast<double>(ok);
  write_text(dir / "paths.csv", paths_csv.str());

  csv::Table summary{{"statistic", "value"}, {}};
  summary.rows.push_back({"paths", std::to_string(rep.gaps.size())});
  summary.rows.push_back({"failures", std::to_string(rep.failures)});
  summary.rows.push_back({"level", std::to_string(level)});
  summary.rows.push_back({"mean_level_gap", fmt(rep.mean_gap)});
  for (std::size_t j = 0; j < d; ++j) {
    summary.rows.push_back({"mean_x" + std::to_string(j + 1) + "_T", fmt(mean_x[static_cast<Eigen::Index>(j)])});
  }
  csv::write_table(dir / "summary.csv", summary);

  RunManifest m = manifest_for("mc", doc, fbm.seed);
  m.outputs = {"paths.csv", "summary.csv"};
  m.extra["base_dir"] = base_dir.string();
  finish(m, start, dir / "manifest.json");
  out << "paths " << rep.gaps.size() << " failures " << rep.failures << " mean_level_gap " << fmt(rep.mean_gap)
      << "\n";
  return rep.failures == rep.gaps.size() ? kExitNumerical : kExitOk;
}

int cmd_mc(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo Euler solves driven by weighted fBm", "sweep mc"};
  std::string cfg_file, dir, manifest;
  std::optional<std::size_t> paths, level;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", cfg_file, "problem config JSON with an \"fbm\" section");
  app.add_option("--manifest", manifest, "replay the run described by this manifest");
  app.add_option("--paths", paths, "override fbm.paths");
  app.add_option("--seed", seed, "override fbm.seed");
  app.add_option("--n", level, "override the Euler level");
  app.add_option("--out", dir, "output directory")->required();
  if (auto code = parse(app, args, out, err)) return *code;

  json doc;
  fs::path base_dir;
  if (!manifest.empty()) {
    doc = replay_config(manifest, "mc");
    const json m = config::read_json(manifest);
    base_dir = m.value("base_dir", std::string());
  } else {
    if (cfg_file.empty()) throw ValidationError("--config: required unless --manifest is given");
    doc = config::read_json(cfg_file);
    base_dir = fs::absolute(cfg_file).parent_path();
    if (!doc.is_object()) throw ValidationError("config: expected a JSON object");
    if (!doc.contains("fbm")) doc["fbm"] = json::object();
    if (paths) doc["fbm"]["paths"] = *paths;
    if (seed) doc["fbm"]["seed"] = *seed;
    if (level) doc["level"] = *level;
  }
  return run_mc(doc, base_dir, dir, out);
}

int cmd_picard(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Picard iteration on the merged grid", "sweep picard"};
  std::string cfg_file, dir;
  PicardOptions opts;
  app.add_option("--config", cfg_file, "problem config JSON")->required();
  app.add_option("--tol", opts.tol, "stop when the residual drops below tol");
  app.add_option("--max-iter", opts.max_iter, "iteration cap");
  app.add_option("--out", dir, "output directory")->required();
  if (auto code = parse(app, args, out, err)) return *code;

  const auto start = Clock::now();
  const ProblemInput in = load_problem(cfg_file);
  print_warnings(in.spec, err);
  ensure_dir(dir);
  json cfg = in.doc;
  cfg["picard"] = {{"tol", opts.tol}, {"max_iter", opts.max_iter}};
  RunManifest m = manifest_for("picard", cfg, seed_of(in.doc));
  m.outputs = {"solution.csv", "residuals.csv"};

  auto emit = [&](const SolveReport& rep) {
    write_solution(fs::path(dir) / "solution.csv", rep.solution);
    csv::Table table{{"iteration", "residual", "norm"}, {}};
    table.rows.push_back({"0", "", fmt(rep.norm_history.front())});
    for (std::size_t i = 0; i < rep.residual_history.size(); ++i) {
      table.rows.push_back({std::to_string(i + 1), fmt(rep.residual_history[i]), fmt(rep.norm_history[i + 1])});
    }
    csv::write_table(fs::path(dir) / "residuals.csv", table);
    m.extra["iterations"] = rep.iterations;
    m.extra["residual"] = rep.residual;
    finish(m, start, fs::path(dir) / "manifest.json");
  };
  try {
    const SolveReport rep = picard_solve(in.spec, opts);
    emit(rep);
    const VerificationReport check = verify_esp(rep.solution, in.spec.barriers.resampled(rep.solution.x.times()));
    out << "iterations " << rep.iterations << " residual " << fmt(rep.residual) << " barV_p " << fmt(rep.apriori_norm)
        << "\n";
    if (!check.passed) {
      err << "error: solution fails ESP verification: " << check.reason << "\n";
      return kExitNumerical;
    }
  } catch (const PicardNonConvergence& e) {
    emit(e.report());
    throw;
  }
  return kExitOk;
}

std::vector<std::size_t> size_list(const json& v, const char* field) {
  try {
    return v.get<std::vector<std::size_t>>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config.") + field + ": expected an array of positive integers");
  }
}

int cmd_euler(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Euler catching-up scheme on the uniform grid k/n", "sweep euler"};
  std::string cfg_file, dir, reference;
  std::optional<std::size_t> n;
  std::vector<std::size_t> levels;
  app.add_option("--config", cfg_file, "problem config JSON")->required();
  app.add_option("--n", n, "grid level (default: config grid.n)");
  app.add_option("--levels", levels, "comma-separated levels for a convergence table")->delimiter(',');
  app.add_option("--reference", reference, "reference for the table: finest | picard");
  app.add_option("--out", dir, "output directory")->required();
  if (auto code = parse(app, args, out, err)) return *code;

  const auto start = Clock::now();
  const ProblemInput in = load_problem(cfg_file);
  print_warnings(in.spec, err);
  ensure_dir(dir);
  if (levels.empty() && in.doc.contains("levels")) levels = size_list(in.doc["levels"], "levels");
  if (reference.empty()) reference = in.doc.value("reference", std::string("finest"));

  json cfg = in.doc;
  RunManifest m = manifest_for("euler", cfg, seed_of(in.doc));
  if (levels.empty()) {
    const std::size_t level = n.value_or(config::default_grid(in.doc).size() - 1);
    const SolveReport rep = euler_solve(in.spec, level);
    write_solution(fs::path(dir) / "solution.csv", rep.solution);
    m.config["euler"] = {{"n", level}};
    m.outputs = {"solution.csv"};
    out << "n " << level << " barV_p " << fmt(rep.apriori_norm) << "\n";
  } else {
    std::sort(levels.begin(), levels.end());
    EspSolution ref;
    if (reference == "finest") {
      ref = euler_solve(in.spec, levels.back()).solution;
    } else if (reference == "picard") {
      ref = picard_solve(in.spec).solution;
    } else {
      throw ValidationError("--reference: expected 'finest' or 'picard', got '" + reference + "'");
    }
    const ConvergenceReport rep = convergence_report(in.spec, levels, ref);
    csv::Table table{{"n", "sup_gap", "grid_gap"}, {}};
    for (const auto& row : rep.rows) table.rows.push_back({std::to_string(row.n), fmt(row.sup_gap), fmt(row.grid_gap)});
    csv::write_table(fs::path(dir) / "convergence.csv", table);
    csv::write_table(out, table);
    out << "monotone " << (rep.monotone ? "yes" : "no") << "\n";
    m.config["euler"] = {{"levels", levels}, {"reference", reference}};
    m.extra["monotone"] = rep.monotone;
    m.outputs = {"convergence.csv"};
  }
  finish(m, start, fs::path(dir) / "manifest.json");
  return kExitOk;
}

int cmd_stability(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Perturbation stability of the solution", "sweep stability"};
  std::string cfg_file, dir, kind = "all";
  std::vector<double> eps{1e-1, 1e-2, 1e-3};
  PicardOptions opts;
  app.add_option("--config", cfg_file, "problem config JSON")->required();
  app.add_option("--kind", kind, "drift | diffusion | initial | all");
  app.add_option("--eps", eps, "comma-separated perturbation sizes")->delimiter(',');
  app.add_option("--tol", opts.tol, "Picard tolerance");
  app.add_option("--out", dir, "output directory")->required();
  if (auto code = parse(app, args, out, err)) return *code;

  const auto start = Clock::now();
  const ProblemInput in = load_problem(cfg_file);
  print_warnings(in.spec, err);
  std::vector<std::pair<std::string, PerturbKind>> kinds;
  if (kind == "drift" || kind == "all") kinds.emplace_back("drift", PerturbKind::drift);
  if (kind == "diffusion" || kind == "all") kinds.emplace_back("diffusion", PerturbKind::diffusion);
  if (kind == "initial" || kind == "all") kinds.emplace_back("initial", PerturbKind::initial);
  if (kinds.empty()) throw ValidationError("--kind: expected drift, diffusion, initial or all, got '" + kind + "'");
  ensure_dir(dir);

  csv::Table table{{"kind", "eps", "gap_x", "gap_k", "error"}, {}};
  for (const auto& [name, pk] : kinds) {
    const StabilityTable st = stability_experiment(in.spec, make_perturbations(in.spec, pk, eps), opts);
    for (const auto& row : st.rows) {
      table.rows.push_back({name, fmt(row.eps), fmt(row.gap_x), fmt(row.gap_k), row.error});
    }
    out << name << " decreasing " << (st.decreasing ? "yes" : "no") << "\n";
  }
  csv::write_table(fs::path(dir) / "stability.csv", table);
  json cfg = in.doc;
  cfg["stability"] = {{"kind", kind}, {"eps", eps}, {"tol", opts.tol}};
  RunManifest m = manifest_for("stability", cfg, seed_of(in.doc));
  m.outputs = {"stability.csv"};
  finish(m, start, fs::path(dir) / "manifest.json");
  return kExitOk;
}

int cmd_verify(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Check a candidate ESP solution against its instance", "sweep verify"};
  std::string input, solution;
  VerifyOptions opts;
  app.add_option("--input", input, "instance JSON {grid, y, l, u, h?}")->required();
  app.add_option("--solution", solution, "solution CSV (t, x*, k*)")->required();
  app.add_option("--tol", opts.tol, "absolute tolerance, scaled by 1 + max(|y|, |l|, |u|)");
  app.add_option("--gap", opts.gap, "minimal barrier gap for the complementarity sums");
  if (auto code = parse(app, args, out, err)) return *code;

  const config::EspInstance inst = config::parse_esp_instance(config::read_json(input));
  const SampledPath cols = csv::read_path(fs::path(solution));
  const std::size_t d = inst.y.dim();
  if (cols.dim() < 2 * d) throw ValidationError("--solution: expected columns t, x1..x" + std::to_string(d) + ", k1..k" + std::to_string(d));
  if (!cols.same_grid(inst.y)) throw ValidationError("--solution: grid differs from the instance grid");
  const EspSolution sol{columns(cols, 0, d), columns(cols, d, d), inst.y};
  const VerificationReport rep = verify_esp(sol, inst.barriers, opts);
  if (rep.passed) {
    out << "PASS\n";
    return kExitOk;
  }
  out << "FAIL index " << rep.index.value_or(0) << " component " << rep.component << ": " << rep.reason << "\n";
  return kExitNumerical;
}

const char* kDemoConfig = R"({
  "x0": 0.5,
  "p": 1.5,
  "grid": {"n": 512, "horizon": 1},
  "drift": {"name": "linear", "k": -1},
  "diffusion": {"name": "cos", "amp": 0.3},
  "a": "identity",
  "z": {"kind": "fbm", "hurst": 0.75, "seed": 2024},
  "barriers": {"lower": 0, "upper": 1, "witness": 0.5}
})";

int cmd_demo(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bundled example: fBm-driven equation reflected in [0, 1]", "sweep demo"};
  std::string dir = "sweep-demo";
  app.add_option("--out", dir, "output directory");
  if (auto code = parse(app, args, out, err)) return *code;

  const auto start = Clock::now();
  const json doc = json::parse(kDemoConfig);
  const ProblemSpec spec = config::parse_problem(doc);
  ensure_dir(dir);
  const SolveReport picard = picard_solve(spec);
  write_solution(fs::path(dir) / "solution.csv", picard.solution);
  const std::vector<std::size_t> levels{32, 64, 128, 256, 512};
  const ConvergenceReport conv = convergence_report(spec, levels, picard.solution);
  csv::Table table{{"n", "sup_gap", "grid_gap"}, {}};
  for (const auto& row : conv.rows) table.rows.push_back({std::to_string(row.n), fmt(row.sup_gap), fmt(row.grid_gap)});
  csv::write_table(fs::path(dir) / "convergence.csv", table);
  const VerificationReport check = verify_esp(picard.solution, spec.barriers.resampled(picard.solution.x.times()));

  RunManifest m = manifest_for("demo", doc, seed_of(doc));
  m.outputs = {"solution.csv", "convergence.csv"};
  m.extra["iterations"] = picard.iterations;
  finish(m, start, fs::path(dir) / "manifest.json");
  out << "picard iterations " << picard.iterations << " residual " << fmt(picard.residual) << "\n";
  out << "x_T " << fmt(picard.solution.x.at(picard.solution.x.size() - 1, 0)) << " k_T "
      << fmt(picard.solution.k.at(picard.solution.k.size() - 1, 0)) << "\n";
  out << "euler vs picard:\n";
  csv::write_table(out, table);
  out << "verify " << (check.passed ? "PASS" : "FAIL " + check.reason) << "\n";
  out << "outputs in " << dir << "\n";
  return check.passed ? kExitOk : kExitNumerical;
}

using Command = int (*)(const std::vector<std::string>&, std::ostream&, std::ostream&);

const std::vector<std::pair<std::string, Command>>& commands() {
  static const std::vector<std::pair<std::string, Command>> table{
      {"esp", cmd_esp},       {"pvar", cmd_pvar},     {"young", cmd_young},         {"fbm", cmd_fbm},
      {"picard", cmd_picard}, {"euler", cmd_euler},   {"stability", cmd_stability}, {"mc", cmd_mc},
      {"verify", cmd_verify}, {"demo", cmd_demo},
  };
  return table;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw NumericalError("SHA-256 digest failed");
  }
  std::ostringstream hex;
  for (unsigned int i = 0; i < len; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return hex.str();
}

std::string sha256_file(const fs::path& file) { return sha256_hex(read_file(file)); }

std::string RunManifest::config_hash() const { return sha256_hex(config.dump()); }

json RunManifest::to_json(const fs::path& dir) const {
  json files = json::array();
  for (const auto& f : outputs) files.push_back({{"file", f.generic_string()}, {"sha256", sha256_file(dir / f)}});
  json j = {{"command", command},   {"config", config},   {"config_hash", config_hash()},
            {"seed", seed},         {"version", version}, {"outputs", files},
            {"wall_time_ms", wall_time_ms}};
  for (const auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

void RunManifest::write(const fs::path& file) const {
  write_text(file, to_json(file.parent_path()).dump(2) + "\n");
}

std::string version() { return std::string("sweep ") + SWEEP_VERSION; }

std::string usage() {
  std::string text = "usage: sweep <command> [options]\n\ncommands:\n";
  text +=
      "  esp        solve the extended Skorokhod problem for a JSON instance\n"
      "  pvar       p-variation of a path CSV\n"
      "  young      Young integral of a matrix path against a path\n"
      "  fbm        sample fractional Brownian motion paths\n"
      "  picard     Picard iteration for a problem config\n"
      "  euler      Euler catching-up scheme, optionally a convergence table\n"
      "  stability  perturbation stability table\n"
      "  mc         Monte Carlo Euler solves driven by weighted fBm\n"
      "  verify     check a candidate ESP solution\n"
      "  demo       bundled fBm-driven reflected example\n\n"
      "Run `sweep <command> --help` for options.\n";
  return text;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << usage();
    return kExitUsage;
  }
  if (args.front() == "--help" || args.front() == "-h" || args.front() == "help") {
    out << usage();
    return kExitOk;
  }
  if (args.front() == "--version") {
    out << version() << "\n";
    return kExitOk;
  }
  const auto& table = commands();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& c) { return c.first == args.front(); });
  if (it == table.end()) {
    err << "error: unknown command '" << args.front() << "'\n\n" << usage();
    return kExitUsage;
  }
  const std::vector<std::string> rest(args.begin() + 1, args.end());
  try {
    return it->second(rest, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace sweep::cli
