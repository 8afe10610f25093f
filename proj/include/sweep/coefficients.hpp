#pragma once

#include "sweep/path.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace sweep {

using DriftFn = std::function<Vector(double, const Vector&)>;
using DiffusionFn = std::function<Matrix(double, const Vector&)>;

/// Local constants on the ball B(0, N): Lipschitz constant of f, Hölder
/// exponent and constant of the gradient of g.
struct LocalConstants {
  double lipschitz = 1.0;  // L_N
  double alpha = 1.0;      // alpha_N
  double c = 1.0;          // C_N
};

/// Drift f(t, x) in R^d and diffusion g(t, x) in R^{d x d} together with the
/// regularity constants the caller declares for them. The solvers trust the
/// declarations; `probe_constants` can falsify them.
struct CoefficientPair {
  std::string name;
  DriftFn f;
  DiffusionFn g;
  double L = 1.0;       ///< |f(t, x)| <= L (1 + |x|)
  double beta = 1.0;    ///< time-Hölder exponent of g
  double c_beta = 1.0;  ///< |g(t,x) - g(s,y)| <= c_beta (|t-s|^beta + |x-y|)
  std::map<double, LocalConstants> locals;  ///< keyed by radius N
  bool diffusion_vanishes = false;          ///< g == 0 identically

  /// Local constants for the smallest declared radius >= N.
  const LocalConstants& local(double radius) const;

  /// C^{beta,T} = c_beta (T^beta + 1) + |g(0, 0)|.
  double growth_constant(double horizon, std::size_t dim) const;

  /// Declared constants positive, beta in (1 - 1/p, 1], alpha_N in (p - 1, 1].
  void validate(double p) const;
};

/// Coefficients by name from the built-in registry:
///   drift:     zero | constant{value} | linear{k} | affine{k, c} | sin{amp, freq} | table{x, y}
///   diffusion: zero | identity | constant{scale} | linear{k} | cos{amp, freq} | sin{amp, freq} | table{x, y}
/// Diffusions other than identity/constant act diagonally, componentwise.
/// Declared constants may be overridden with keys L, beta, c_beta, L_N,
/// alpha_N, C_N, N.
CoefficientPair make_coefficients(const nlohmann::json& drift, const nlohmann::json& diffusion, std::size_t dim);

std::vector<std::string> drift_names();
std::vector<std::string> diffusion_names();

/// f + eps (every component).
CoefficientPair perturb_drift(const CoefficientPair& base, double eps, std::size_t dim = 1);
/// g + eps I.
CoefficientPair perturb_diffusion(const CoefficientPair& base, double eps);

struct ProbeReport {
  double growth = 0.0;              ///< max |f(t,x)| / (1 + |x|)
  double drift_lipschitz = 0.0;     ///< max |f(t,x) - f(t,y)| / |x - y| on B(0, N)
  double diffusion_lipschitz = 0.0; ///< max ||g(t,x) - g(t,y)|| / |x - y|
  std::vector<std::string> warnings;
};

/// Finite-difference probe of the declared constants on B(0, N) x [0, T].
/// Violations are reported as warnings, never thrown.
ProbeReport probe_constants(const CoefficientPair& coeffs, std::size_t dim, double radius, double horizon,
                            std::size_t samples = 2000);

}  // namespace sweep
