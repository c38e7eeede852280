#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "microdist/trace.hpp"

namespace microdist {

/// Selects which column of a trace CSV to read, by header name or by
/// zero-based index.
struct Column {
  std::optional<std::string> name;
  std::size_t index = 0;

  static Column by_name(std::string n) {
    Column c;
    c.name = std::move(n);
    return c;
  }
  static Column by_index(std::size_t i) {
    Column c;
    c.index = i;
    return c;
  }
  /// "2" -> index 2, anything else -> column name.
  static Column parse(const std::string& spec) {
    if (!spec.empty() &&
        spec.find_first_not_of("0123456789") == std::string::npos)
      return by_index(std::stoul(spec));
    return by_name(spec);
  }
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (cell.empty()) return false;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace detail

/// Load one column of a CSV file as a sensor trace. A single header row is
/// skipped when the first row's selected cell does not parse as a number;
/// selecting a column by name requires that header. Row numbers in error
/// messages are 1-based file line numbers.
inline SensorTrace load_trace(const std::filesystem::path& path,
                              const Column& column, double sample_period = 1.0,
                              std::string unit_label = "") {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path.string());

  SensorTrace trace;
  trace.sample_period = sample_period;
  trace.unit_label = std::move(unit_label);

  std::string line;
  std::size_t line_no = 0;
  std::size_t col_index = column.index;
  bool resolved = !column.name.has_value();
  bool first_row = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    const auto cells = detail::split_csv_line(line);

    if (first_row) {
      first_row = false;
      if (column.name) {
        bool found = false;
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (detail::trim(cells[i]) == *column.name) {
            col_index = i;
            found = true;
            break;
          }
        }
        if (!found)
          throw std::runtime_error("column '" + *column.name +
                                   "' not found in header of " + path.string());
        resolved = true;
        continue;  // header consumed
      }
      // Index selection: treat the first row as a header when its cell is
      // not numeric.
      double v = 0.0;
      if (col_index < cells.size() && detail::parse_double(cells[col_index], v)) {
        trace.values.push_back(v);
      }
      continue;
    }

    if (col_index >= cells.size())
      throw std::runtime_error("row " + std::to_string(line_no) + ": missing column " +
                               std::to_string(col_index));
    double v = 0.0;
    if (!detail::parse_double(cells[col_index], v))
      throw std::runtime_error("row " + std::to_string(line_no) +
                               ": cell is not a finite number");
    trace.values.push_back(v);
  }
  (void)resolved;

  if (trace.values.empty())
    throw std::runtime_error("no numeric rows in column of " + path.string());
  validate_trace(trace);
  return trace;
}

/// Write a series as `t,value` rows; values round-trip exactly through
/// load_trace (17 significant digits).
inline void save_trace(const std::filesystem::path& path,
                       std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path.string());
  out << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, values[i]);
    out << buf;
  }
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Minimal key=value config reader ('#' starts a comment line).
inline std::vector<std::pair<std::string, std::string>> load_key_values(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = detail::trim(line);
    if (s.empty() || s.front() == '#') continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key=value");
    kv.emplace_back(std::string(detail::trim(s.substr(0, eq))),
                    std::string(detail::trim(s.substr(eq + 1))));
  }
  return kv;
}

}  // namespace microdist
