#include "sweep/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace sweep {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double positive_or_one(double v) { return v > 0.0 ? v : 1.0; }

std::string kind_of(const json& spec, const char* role) {
  if (spec.is_string()) return spec.get<std::string>();
  if (spec.is_object() && spec.contains("name") && spec["name"].is_string()) return spec["name"].get<std::string>();
  throw ValidationError(std::string(role) + ": expected a name or an object with field 'name'");
}

double number(const json& spec, const char* key, double fallback, const char* role) {
  if (!spec.is_object() || !spec.contains(key)) return fallback;
  const auto& v = spec[key];
  if (!v.is_number()) throw ValidationError(std::string(role) + "." + key + ": expected a number");
  return v.get<double>();
}

double required(const json& spec, const char* key, const char* role) {
  if (!spec.is_object() || !spec.contains(key)) {
    throw ValidationError(std::string(role) + "." + key + ": required field missing");
  }
  return number(spec, key, 0.0, role);
}

/// Piecewise-linear interpolation with constant extrapolation.
struct Table {
  std::vector<double> x;
  std::vector<double> y;

  static Table parse(const json& spec, const char* role) {
    Table t;
    try {
      t.x = spec.at("x").get<std::vector<double>>();
      t.y = spec.at("y").get<std::vector<double>>();
    } catch (const json::exception&) {
      throw ValidationError(std::string(role) + ": table needs numeric arrays 'x' and 'y'");
    }
    if (t.x.size() < 2 || t.x.size() != t.y.size()) {
      throw ValidationError(std::string(role) + ": table needs >= 2 points and equal-length 'x', 'y'");
    }
    for (std::size_t i = 1; i < t.x.size(); ++i) {
      if (!(t.x[i] > t.x[i - 1])) throw ValidationError(std::string(role) + ".x: must be strictly increasing");
    }
    return t;
  }

  double operator()(double v) const {
    if (v <= x.front()) return y.front();
    if (v >= x.back()) return y.back();
    const auto hi = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), v) - x.begin());
    const std::size_t lo = hi - 1;
    const double w = (v - x[lo]) / (x[hi] - x[lo]);
    return y[lo] + w * (y[hi] - y[lo]);
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : y) m = std::max(m, std::abs(v));
    return m;
  }

  double max_slope() const {
    double m = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) m = std::max(m, std::abs((y[i] - y[i - 1]) / (x[i] - x[i - 1])));
    return m;
  }
};

template <typename Scalar>
DiffusionFn diagonal(Scalar phi) {
  return [phi](double, const Vector& x) -> Matrix {
    Matrix m = Matrix::Zero(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) m(i, i) = phi(x[i]);
    return m;
  };
}

struct DriftEntry {
  DriftFn f;
  double L;
  double lipschitz;
};

DriftEntry make_drift(const json& spec, std::size_t dim) {
  const std::string kind = kind_of(spec, "drift");
  const double root_d = std::sqrt(static_cast<double>(dim));
  if (kind == "zero") {
    return {[](double, const Vector& x) -> Vector { return Vector::Zero(x.size()); }, 1.0, 1.0};
  }
  if (kind == "constant") {
    const double c = required(spec, "value", "drift");
    return {[c](double, const Vector& x) -> Vector { return Vector::Constant(x.size(), c); },
            positive_or_one(std::abs(c) * root_d), 1.0};
  }
  if (kind == "linear") {
    const double k = required(spec, "k", "drift");
    return {[k](double, const Vector& x) -> Vector { return k * x; }, positive_or_one(std::abs(k)),
            positive_or_one(std::abs(k))};
  }
  if (kind == "affine") {
    const double k = required(spec, "k", "drift");
    const double c = required(spec, "c", "drift");
    return {[k, c](double, const Vector& x) -> Vector { return (k * x).array() + c; },
            positive_or_one(std::max(std::abs(k), std::abs(c) * root_d)), positive_or_one(std::abs(k))};
  }
  if (kind == "sin") {
    const double amp = number(spec, "amp", 1.0, "drift");
    const double freq = number(spec, "freq", 1.0, "drift");
    return {[amp, freq](double, const Vector& x) -> Vector { return amp * (freq * x.array()).sin().matrix(); },
            positive_or_one(std::abs(amp) * root_d), positive_or_one(std::abs(amp * freq))};
  }
  if (kind == "table") {
    const Table table = Table::parse(spec, "drift");
    return {[table](double, const Vector& x) -> Vector { return x.unaryExpr(table); },
            positive_or_one(table.max_abs() * root_d), positive_or_one(table.max_slope())};
  }
  throw ValidationError("drift: unknown coefficient '" + kind + "'");
}

struct DiffusionEntry {
  DiffusionFn g;
  double c_beta;
  double c_n;
  bool vanishes;
};

DiffusionEntry make_diffusion(const json& spec) {
  const std::string kind = kind_of(spec, "diffusion");
  if (kind == "zero") {
    return {[](double, const Vector& x) -> Matrix { return Matrix::Zero(x.size(), x.size()); }, 1.0, 1.0, true};
  }
  if (kind == "identity") {
    return {[](double, const Vector& x) -> Matrix { return Matrix::Identity(x.size(), x.size()); }, 1.0, 1.0, false};
  }
  if (kind == "constant") {
    const double s = required(spec, "scale", "diffusion");
    return {[s](double, const Vector& x) -> Matrix { return s * Matrix::Identity(x.size(), x.size()); }, 1.0, 1.0,
            s == 0.0};
  }
  if (kind == "linear") {
    const double k = required(spec, "k", "diffusion");
    return {diagonal([k](double v) { return k * v; }), positive_or_one(std::abs(k)), 1.0, k == 0.0};
  }
  if (kind == "cos" || kind == "sin") {
    const double amp = number(spec, "amp", 1.0, "diffusion");
    const double freq = number(spec, "freq", 1.0, "diffusion");
    auto g = kind == "cos" ? diagonal([amp, freq](double v) { return amp * std::cos(freq * v); })
                           : diagonal([amp, freq](double v) { return amp * std::sin(freq * v); });
    return {std::move(g), positive_or_one(std::abs(amp * freq)), positive_or_one(std::abs(amp) * freq * freq),
            amp == 0.0};
  }
  if (kind == "table") {
    const Table table = Table::parse(spec, "diffusion");
    // Piecewise-linear tables are not differentiable at the nodes; C_N must
    // then be declared by the caller.
    return {diagonal(table), positive_or_one(table.max_slope()), 1.0, table.max_abs() == 0.0};
  }
  throw ValidationError("diffusion: unknown coefficient '" + kind + "'");
}

std::string describe(const json& spec) { return spec.is_string() ? spec.get<std::string>() : spec.dump(); }

}  // namespace

const LocalConstants& CoefficientPair::local(double radius) const {
  auto it = locals.lower_bound(radius);
  if (it == locals.end()) {
    throw ValidationError("no local constants declared for radius " + std::to_string(radius));
  }
  return it->second;
}

double CoefficientPair::growth_constant(double horizon, std::size_t dim) const {
  const auto d = static_cast<Eigen::Index>(dim);
  return c_beta * (std::pow(horizon, beta) + 1.0) + operator_norm(g(0.0, Vector::Zero(d)));
}

void CoefficientPair::validate(double p) const {
  if (!f || !g) throw ValidationError("coefficients: f and g must be set");
  if (!(L > 0.0)) throw ValidationError("coefficients.L: must be positive");
  if (!(c_beta > 0.0)) throw ValidationError("coefficients.c_beta: must be positive");
  if (!(beta > 1.0 - 1.0 / p && beta <= 1.0)) {
    throw ValidationError("coefficients.beta: must lie in (1 - 1/p, 1]");
  }
  if (locals.empty()) throw ValidationError("coefficients: no local constants declared");
  for (const auto& [radius, c] : locals) {
    if (!(c.lipschitz > 0.0) || !(c.c > 0.0)) throw ValidationError("coefficients: local constants must be positive");
    if (!(c.alpha > p - 1.0 && c.alpha <= 1.0)) throw ValidationError("coefficients.alpha_N: must lie in (p - 1, 1]");
  }
}

CoefficientPair make_coefficients(const json& drift, const json& diffusion, std::size_t dim) {
  if (dim == 0) throw ValidationError("coefficients: dimension must be positive");
  DriftEntry f = make_drift(drift, dim);
  DiffusionEntry g = make_diffusion(diffusion);
  CoefficientPair out;
  out.name = describe(drift) + " / " + describe(diffusion);
  out.f = std::move(f.f);
  out.g = std::move(g.g);
  out.L = number(drift, "L", f.L, "drift");
  out.beta = number(diffusion, "beta", 1.0, "diffusion");
  out.c_beta = number(diffusion, "c_beta", g.c_beta, "diffusion");
  out.diffusion_vanishes = g.vanishes;
  const double radius = number(drift, "N", kInf, "drift");
  out.locals[radius] = LocalConstants{number(drift, "L_N", f.lipschitz, "drift"),
                                      number(diffusion, "alpha_N", 1.0, "diffusion"),
                                      number(diffusion, "C_N", g.c_n, "diffusion")};
  return out;
}

std::vector<std::string> drift_names() { return {"zero", "constant", "linear", "affine", "sin", "table"}; }

std::vector<std::string> diffusion_names() {
  return {"zero", "identity", "constant", "linear", "cos", "sin", "table"};
}

CoefficientPair perturb_drift(const CoefficientPair& base, double eps, std::size_t dim) {
  CoefficientPair out = base;
  out.name = base.name + " [f+" + std::to_string(eps) + "]";
  out.f = [f = base.f, eps](double t, const Vector& x) -> Vector { return f(t, x).array() + eps; };
  out.L = base.L + std::abs(eps) * std::sqrt(static_cast<double>(dim));
  return out;
}

CoefficientPair perturb_diffusion(const CoefficientPair& base, double eps) {
  CoefficientPair out = base;
  out.name = base.name + " [g+" + std::to_string(eps) + "I]";
  out.g = [g = base.g, eps](double t, const Vector& x) -> Matrix {
    return g(t, x) + eps * Matrix::Identity(x.size(), x.size());
  };
  out.diffusion_vanishes = base.diffusion_vanishes && eps == 0.0;
  return out;
}

ProbeReport probe_constants(const CoefficientPair& coeffs, std::size_t dim, double radius, double horizon,
                            std::size_t samples) {
  ProbeReport report;
  const auto d = static_cast<Eigen::Index>(dim);
  std::mt19937_64 rng(0x5eed5eedULL);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  auto in_ball = [&] {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal(rng);
    const double n = v.norm();
    if (n == 0.0) return v;
    return Vector(v / n * radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim)));
  };
  for (std::size_t s = 0; s < samples; ++s) {
    const double t = horizon * unit(rng);
    const Vector x = in_ball();
    const Vector y = in_ball();
    const Vector fx = coeffs.f(t, x);
    report.growth = std::max(report.growth, fx.norm() / (1.0 + x.norm()));
    const double dist = (x - y).norm();
    if (dist > 0.0) {
      report.drift_lipschitz = std::max(report.drift_lipschitz, (fx - coeffs.f(t, y)).norm() / dist);
      report.diffusion_lipschitz =
          std::max(report.diffusion_lipschitz, operator_norm(coeffs.g(t, x) - coeffs.g(t, y)) / dist);
    }
  }
  auto exceeds = [](double estimate, double declared) { return estimate > declared * (1.0 + 1e-9) + 1e-12; };
  auto warn = [&](const char* what, double estimate, double declared) {
    std::ostringstream msg;
    msg << what << ": probe estimate " << estimate << " exceeds declared " << declared;
    report.warnings.push_back(msg.str());
  };
  if (exceeds(report.growth, coeffs.L)) warn("growth constant L", report.growth, coeffs.L);
  const double lipschitz = coeffs.local(radius).lipschitz;
  if (exceeds(report.drift_lipschitz, lipschitz)) warn("local Lipschitz constant L_N", report.drift_lipschitz, lipschitz);
  if (exceeds(report.diffusion_lipschitz, coeffs.c_beta)) {
    warn("diffusion constant c_beta", report.diffusion_lipschitz, coeffs.c_beta);
  }
  return report;
}

}  // namespace sweep
