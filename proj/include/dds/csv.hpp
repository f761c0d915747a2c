#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dds {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Shortest text that round-trips the exact double value.
inline std::string format_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string format_u64(std::uint64_t v) {
  char buf[24];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

// Strict full-token parse; returns false on empty or trailing garbage.
inline bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline bool parse_i64(std::string_view s, std::int64_t& out) {
  s = trim(s);
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == sep) {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Comma-separated rows under an exact header line. `#` comments and blank
// lines are skipped; returned row indices are 1-based data rows.
inline std::vector<std::vector<std::string>> read_csv(const std::string& path,
                                                      std::string_view expected_header) {
  std::ifstream in(path);
  if (!in) throw CsvError(path + ": cannot open file");
  const std::size_t n_cols = split_fields(expected_header).size();

  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    const std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (!have_header) {
      if (sv != expected_header)
        throw CsvError(path + ": unexpected header '" + std::string(sv) + "', expected '" +
                       std::string(expected_header) + "'");
      have_header = true;
      continue;
    }
    const auto fields = split_fields(sv);
    if (fields.size() != n_cols)
      throw CsvError(path + ": wrong column count, row " + std::to_string(rows.size() + 1) +
                     ": expected " + std::to_string(n_cols) + ", got " +
                     std::to_string(fields.size()));
    std::vector<std::string> cells;
    cells.reserve(fields.size());
    for (auto f : fields) cells.emplace_back(trim(f));
    rows.push_back(std::move(cells));
  }
  if (!have_header) throw CsvError(path + ": empty file");
  return rows;
}

inline void write_text_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open file for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open file");
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

}  // namespace dds
