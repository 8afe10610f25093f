#include "sweep/config.hpp"

#include "sweep/csv.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace sweep::config {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* key, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) throw ValidationError(where + "." + key + ": required field missing");
  return doc[key];
}

double number_or(const json& doc, const char* key, double fallback, const std::string& where) {
  if (!doc.is_object() || !doc.contains(key)) return fallback;
  if (!doc[key].is_number()) throw ValidationError(where + "." + key + ": expected a number");
  return doc[key].get<double>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
  if (!v.is_array()) throw ValidationError(where + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(where + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

/// Rows given either as numbers (d = 1) or arrays of equal length.
std::vector<double> rows(const json& v, std::size_t& dim, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ValidationError(where + ": expected a non-empty array");
  std::vector<double> out;
  const std::size_t d = v.front().is_array() ? v.front().size() : 1;
  if (dim != 0 && dim != d) {
    throw ValidationError(where + ": rows have dimension " + std::to_string(d) + ", expected " + std::to_string(dim));
  }
  dim = d;
  for (const auto& row : v) {
    if (row.is_number() && d == 1) {
      out.push_back(row.get<double>());
    } else if (row.is_array() && row.size() == d) {
      for (const auto& e : row) {
        if (!e.is_number()) throw ValidationError(where + ": non-numeric entry");
        out.push_back(e.get<double>());
      }
    } else {
      throw ValidationError(where + ": ragged or malformed row");
    }
  }
  return out;
}

Vector vector_of(const json& v, std::size_t dim, const std::string& where) {
  if (v.is_number()) return Vector::Constant(static_cast<Eigen::Index>(dim), v.get<double>());
  const auto values = number_list(v, where);
  if (values.size() != dim) throw ValidationError(where + ": expected " + std::to_string(dim) + " components");
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(dim));
}

template <typename Fn>
SampledPath tabulate(const std::vector<double>& grid, std::size_t dim, Fn fn) {
  std::vector<double> values;
  values.reserve(grid.size() * dim);
  for (double t : grid) {
    for (std::size_t j = 0; j < dim; ++j) values.push_back(fn(t, j));
  }
  return SampledPath(grid, std::move(values), dim);
}

}  // namespace

json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ValidationError("cannot open JSON file '" + file.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in '" + file.string() + "': " + e.what());
  }
}

EspInstance parse_esp_instance(const json& doc) {
  const std::vector<double> grid = number_list(field(doc, "grid", "instance"), "instance.grid");
  std::size_t dim = 0;
  auto y = rows(field(doc, "y", "instance"), dim, "instance.y");
  auto l = rows(field(doc, "l", "instance"), dim, "instance.l");
  auto u = rows(field(doc, "u", "instance"), dim, "instance.u");
  std::optional<SampledPath> h;
  if (doc.contains("h") && !doc["h"].is_null()) h = SampledPath(grid, rows(doc["h"], dim, "instance.h"), dim);
  return EspInstance{SampledPath(grid, std::move(y), dim),
                     BarrierPair(SampledPath(grid, std::move(l), dim), SampledPath(grid, std::move(u), dim), std::move(h))};
}

std::vector<double> default_grid(const json& doc) {
  if (!doc.contains("grid")) return uniform_grid(1024, 1.0);
  const json& g = doc["grid"];
  if (g.is_array()) return number_list(g, "grid");
  const double n = number_or(g, "n", 1024, "grid");
  if (!(n >= 1.0) || n != std::floor(n)) throw ValidationError("grid.n: must be a positive integer");
  return uniform_grid(static_cast<std::size_t>(n), number_or(g, "horizon", 1.0, "grid"));
}

SampledPath parse_path(const json& spec, std::size_t dim, const std::vector<double>& grid,
                       const std::filesystem::path& base_dir, const std::string& where) {
  if (spec.is_number() || (spec.is_array() && !spec.empty() && spec.front().is_number() && spec.size() == dim &&
                           dim > 1)) {
    return SampledPath::constant(grid, vector_of(spec, dim, where));
  }
  const std::string kind = spec.is_string() ? spec.get<std::string>() : field(spec, "kind", where).get<std::string>();
  if (kind == "identity") return SampledPath::scalar(grid, grid);
  if (kind == "zero") return SampledPath::constant(grid, Vector::Zero(static_cast<Eigen::Index>(dim)));
  if (kind == "constant") return SampledPath::constant(grid, vector_of(field(spec, "value", where), dim, where + ".value"));
  if (kind == "values") {
    std::size_t d = dim;
    auto values = rows(field(spec, "values", where), d, where + ".values");
    return SampledPath(number_list(field(spec, "grid", where), where + ".grid"), std::move(values), d);
  }
  if (kind == "csv") {
    std::filesystem::path file = field(spec, "file", where).get<std::string>();
    if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
    return csv::read_path(file);
  }
  if (kind == "sine") {
    const Vector offset = vector_of(spec.value("offset", json(0.0)), dim, where + ".offset");
    const double amp = number_or(spec, "amp", 0.0, where);
    const double freq = number_or(spec, "freq", 1.0, where);
    return tabulate(grid, dim, [&](double t, std::size_t j) {
      return offset[static_cast<Eigen::Index>(j)] + amp * std::sin(2.0 * std::numbers::pi * freq * t);
    });
  }
  if (kind == "fbm") {
    FbmConfig cfg;
    cfg.hurst = number_or(spec, "hurst", 0.75, where);
    cfg.seed = static_cast<std::uint64_t>(number_or(spec, "seed", 0, where));
    cfg.dim = dim;
    cfg.grid = grid;
    const auto index = static_cast<std::size_t>(number_or(spec, "index", 0, where));
    cfg.n_paths = index + 1;
    const double sigma = number_or(spec, "sigma", 1.0, where);
    SampledPath b = FbmSampler(cfg).path(index);
    return sigma == 1.0 ? b : sigma * b;
  }
  throw ValidationError(where + ".kind: unknown path kind '" + kind + "'");
}

ProblemSpec parse_problem(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ValidationError("problem config must be a JSON object");
  const json& x0 = field(doc, "x0", "config");
  const std::size_t dim = x0.is_array() ? x0.size() : 1;
  if (dim == 0) throw ValidationError("config.x0: must be non-empty");
  const auto grid = default_grid(doc);
  ProblemSpec spec;
  spec.x0 = vector_of(x0, dim, "config.x0");
  spec.p = number_or(doc, "p", 1.5, "config");
  spec.horizon = number_or(doc, "horizon", 0.0, "config");
  spec.coeffs = make_coefficients(doc.value("drift", json("zero")), doc.value("diffusion", json("zero")), dim);
  spec.a = parse_path(doc.value("a", json("identity")), 1, grid, base_dir, "config.a");
  spec.z = parse_path(doc.value("z", json("zero")), dim, grid, base_dir, "config.z");
  const json& b = field(doc, "barriers", "config");
  SampledPath lower = parse_path(field(b, "lower", "config.barriers"), dim, grid, base_dir, "config.barriers.lower");
  SampledPath upper = parse_path(field(b, "upper", "config.barriers"), dim, grid, base_dir, "config.barriers.upper");
  std::optional<SampledPath> witness;
  if (b.contains("witness")) {
    witness = parse_path(b["witness"], dim, grid, base_dir, "config.barriers.witness");
  }
  // Barriers given on different grids are merged by càdlàg resampling.
  auto bgrid = union_grid(lower.times(), upper.times());
  if (witness) bgrid = union_grid(bgrid, witness->times());
  if (witness) witness = resample(*witness, bgrid);
  spec.barriers = BarrierPair(resample(lower, bgrid), resample(upper, bgrid), std::move(witness));
  return spec;
}

FbmConfig parse_fbm(const json& doc, std::size_t dim) {
  const std::string where = "config.fbm";
  FbmConfig cfg;
  cfg.hurst = number_or(doc, "hurst", 0.75, where);
  cfg.seed = static_cast<std::uint64_t>(number_or(doc, "seed", 0, where));
  cfg.n_paths = static_cast<std::size_t>(number_or(doc, "paths", 100, where));
  cfg.dim = static_cast<std::size_t>(number_or(doc, "dim", static_cast<double>(dim), where));
  if (doc.contains("grid") && doc["grid"].is_array()) {
    cfg.grid = number_list(doc["grid"], where + ".grid");
  } else {
    const double n = number_or(doc, "n", 1024, where);
    cfg.grid = uniform_grid(static_cast<std::size_t>(n), number_or(doc, "horizon", 1.0, where));
  }
  cfg.validate();
  return cfg;
}

SigmaWeight parse_sigma(const json& doc, const std::vector<double>& grid, std::size_t dim, double hurst,
                        const std::filesystem::path& base_dir) {
  if (doc.is_null()) return SigmaWeight::constant(grid, Vector::Ones(static_cast<Eigen::Index>(dim)), hurst);
  if (doc.is_object() && doc.contains("value") && !doc.contains("kind")) {
    return SigmaWeight::constant(grid, vector_of(doc["value"], dim, "config.sigma.value"), hurst);
  }
  return SigmaWeight::from_samples(resample(parse_path(doc, dim, grid, base_dir, "config.sigma"), grid), hurst);
}

}  // namespace sweep::config
