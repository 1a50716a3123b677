#pragma once

// Text I/O helpers shared by the loaders and emitters: number formatting,
// RFC 4180 CSV reading/writing, and file access with library errors.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "emocult/error.hpp"

namespace emocult::io {

/// Shortest decimal representation that parses back to the same double.
inline std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf, end);
}

inline std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  return in;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
  out << text;
}

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// --------------------------------------------------------------------------
// CSV
// --------------------------------------------------------------------------

struct CsvRow {
  std::size_t line = 0;  // 1-based physical line where the record starts
  std::vector<std::string> fields;
};

inline std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(fields[i]);
  }
  line += '\n';
  return line;
}

/// Reads all records. Quoted fields may contain commas, doubled quotes, and newlines.
/// Blank lines are skipped.
inline std::vector<CsvRow> read_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() >= 3 && data.compare(0, 3, "\xEF\xBB\xBF") == 0) data.erase(0, 3);

  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = data.size();
  while (i < n) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool in_quotes = false;
    bool field_was_quoted = false;
    bool row_done = false;
    while (i < n && !row_done) {
      char c = data[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < n && data[i + 1] == '"') {
            field += '"';
            i += 2;
            continue;
          }
          in_quotes = false;
        } else {
          if (c == '\n') ++line;
          field += c;
        }
        ++i;
        continue;
      }
      switch (c) {
        case '"':
          if (!field.empty() || field_was_quoted)
            throw Error(ErrorCode::ParseError,
                        "line " + std::to_string(line) + ": stray quote inside unquoted field");
          in_quotes = true;
          field_was_quoted = true;
          break;
        case ',':
          row.fields.push_back(std::move(field));
          field.clear();
          field_was_quoted = false;
          break;
        case '\r':
          break;
        case '\n':
          ++line;
          row_done = true;
          break;
        default:
          field += c;
      }
      ++i;
    }
    if (in_quotes)
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(row.line) + ": unterminated quoted field");
    row.fields.push_back(std::move(field));
    bool blank = row.fields.size() == 1 && row.fields[0].empty() && !field_was_quoted;
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace emocult::io
