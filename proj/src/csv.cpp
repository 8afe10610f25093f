#include "sweep/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sweep::csv {

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) throw NumericalError("failed to format a double");
  return std::string(buf.data(), end);
}

double parse_double(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError("malformed number '" + std::string(text) + "'");
  }
  return value;
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + file.string() + "' for writing");
  return out;
}

}  // namespace

void write_path(std::ostream& out, const SampledPath& path, const std::string& prefix) {
  write_paths(out, {{prefix, &path}});
}

void write_path(const std::filesystem::path& file, const SampledPath& path, const std::string& prefix) {
  auto out = open_out(file);
  write_path(out, path, prefix);
}

void write_paths(std::ostream& out, const std::vector<std::pair<std::string, const SampledPath*>>& columns) {
  if (columns.empty()) throw ValidationError("no columns to write");
  const SampledPath& first = *columns.front().second;
  for (const auto& [name, path] : columns) {
    if (!path->same_grid(first)) throw ValidationError("paths written together must share a grid");
  }
  out << 't';
  for (const auto& [name, path] : columns) {
    for (std::size_t j = 0; j < path->dim(); ++j) out << ',' << name << (j + 1);
  }
  out << '\n';
  for (std::size_t i = 0; i < first.size(); ++i) {
    out << format_double(first.time(i));
    for (const auto& [name, path] : columns) {
      for (std::size_t j = 0; j < path->dim(); ++j) out << ',' << format_double(path->at(i, j));
    }
    out << '\n';
  }
}

void write_paths(const std::filesystem::path& file,
                 const std::vector<std::pair<std::string, const SampledPath*>>& columns) {
  auto out = open_out(file);
  write_paths(out, columns);
}

SampledPath read_path(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("path CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split(line);
  if (header.size() < 2 || header.front() != "t") {
    throw ValidationError("path CSV header must be 't,x1,...,xd'");
  }
  const std::size_t dim = header.size() - 1;
  std::vector<double> times;
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != dim + 1) {
      throw ValidationError("path CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                            " columns, expected " + std::to_string(dim + 1));
    }
    times.push_back(parse_double(cells[0]));
    for (std::size_t j = 1; j < cells.size(); ++j) values.push_back(parse_double(cells[j]));
  }
  return SampledPath(std::move(times), std::move(values), dim);
}

SampledPath read_path(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot open path CSV '" + file.string() + "'");
  return read_path(in);
}

void write_table(std::ostream& out, const Table& table) {
  for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
}

void write_table(const std::filesystem::path& file, const Table& table) {
  auto out = open_out(file);
  write_table(out, table);
}

}  // namespace sweep::csv
