#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "newsbarrier/error.hpp"

namespace newsbarrier {

inline std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

/// ASCII case folding; bytes outside A-Z pass through untouched.
inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
  });
  return out;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Splits into lines, dropping a trailing '\r' from each.
inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos)
      nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  return lines;
}

/// One CSV record with RFC 4180 quoting. Records never span lines here.
inline std::vector<std::string> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

inline std::string csv_escape(std::string_view value) {
  if (value.find_first_of(",\"\n") == std::string_view::npos)
    return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

/// Reads a CSV file whose header must equal `expected` (case-insensitive,
/// whitespace-trimmed). Blank lines are skipped.
inline CsvTable read_csv(const std::string &path,
                         const std::vector<std::string> &expected) {
  const std::string text = read_file(path);
  CsvTable table;
  bool have_header = false;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (trim(line).empty())
      continue;
    auto fields = parse_csv_line(line);
    for (auto &f : fields)
      f = std::string(trim(f));
    if (!have_header) {
      if (line_no == 1 && fields.size() > 0 && fields[0].rfind("\xEF\xBB\xBF", 0) == 0)
        fields[0].erase(0, 3);
      std::vector<std::string> folded;
      for (const auto &f : fields)
        folded.push_back(to_lower(f));
      if (folded != expected) {
        std::string want;
        for (const auto &e : expected)
          want += (want.empty() ? "" : ",") + e;
        throw Error(ErrorCode::HeaderMismatch, path + ": expected header " + want);
      }
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header)
    throw Error(ErrorCode::HeaderMismatch, path + ": missing header");
  return table;
}

/// 64-bit FNV-1a. Stable across platforms and runs, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4)
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return out;
}

} // namespace newsbarrier
