#pragma once

#include "sweep/drivers.hpp"
#include "sweep/esp.hpp"
#include "sweep/solver.hpp"

#include <filesystem>
#include <json.hpp>

namespace sweep::config {

/// ESP instance: {"grid": [...], "y": rows, "l": rows, "u": rows, "h": rows?}
/// where rows are either numbers (d = 1) or arrays of length d.
struct EspInstance {
  SampledPath y;
  BarrierPair barriers;
};

EspInstance parse_esp_instance(const nlohmann::json& doc);

/// Path description used inside problem configs. Kinds:
///   identity                       a_t = t on the default grid
///   zero | constant{value}         on the default grid
///   values{grid, values}           explicit samples
///   csv{file}                      path CSV, relative to `base_dir`
///   sine{offset, amp, freq}        offset + amp sin(2 pi freq t) per component
///   fbm{hurst, seed, index, sigma} one fBm path on the default grid, scaled by sigma
SampledPath parse_path(const nlohmann::json& spec, std::size_t dim, const std::vector<double>& default_grid,
                       const std::filesystem::path& base_dir, const std::string& field);

/// Problem config:
///   {"x0", "p", "horizon"?, "grid": {"n", "horizon"}, "drift", "diffusion",
///    "a", "z", "barriers": {"lower", "upper", "witness"?}}
ProblemSpec parse_problem(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});

/// Default grid of a problem config.
std::vector<double> default_grid(const nlohmann::json& doc);

/// "fbm": {"hurst", "seed", "paths", "n", "horizon", "dim"?}
FbmConfig parse_fbm(const nlohmann::json& doc, std::size_t dim);

/// "sigma": {"value": [..]} constant, or any path description, sampled on `grid`.
SigmaWeight parse_sigma(const nlohmann::json& doc, const std::vector<double>& grid, std::size_t dim, double hurst,
                        const std::filesystem::path& base_dir);

nlohmann::json read_json(const std::filesystem::path& file);

}  // namespace sweep::config
