#pragma once

#include "sweep/path.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace sweep::csv {

/// Shortest decimal that parses back to the same double.
std::string format_double(double value);
double parse_double(std::string_view text);

/// Path CSV: header `t,x1,...,xd`, one row per grid point.
void write_path(std::ostream& out, const SampledPath& path, const std::string& prefix = "x");
void write_path(const std::filesystem::path& file, const SampledPath& path, const std::string& prefix = "x");
SampledPath read_path(std::istream& in);
SampledPath read_path(const std::filesystem::path& file);

/// Several same-grid paths side by side: `t,<p1>1..<p1>d,<p2>1..`.
void write_paths(std::ostream& out, const std::vector<std::pair<std::string, const SampledPath*>>& columns);
void write_paths(const std::filesystem::path& file,
                 const std::vector<std::pair<std::string, const SampledPath*>>& columns);

/// Generic table with a header row.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
void write_table(std::ostream& out, const Table& table);
void write_table(const std::filesystem::path& file, const Table& table);

}  // namespace sweep::csv
