#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace sweep::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitUsage = 64;

/// Hex SHA-256 of a byte string / file.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& file);

struct RunManifest {
  std::string command;
  nlohmann::json config;  ///< canonical config the run is reproducible from
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::filesystem::path> outputs;  ///< relative to the manifest directory
  long long wall_time_ms = 0;
  nlohmann::json extra = nlohmann::json::object();  ///< command-specific fields

  /// config_hash is the SHA-256 of config.dump() (keys sorted).
  std::string config_hash() const;
  nlohmann::json to_json(const std::filesystem::path& dir) const;
  void write(const std::filesystem::path& file) const;
};

std::string version();
std::string usage();

/// Runs one subcommand; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sweep::cli
