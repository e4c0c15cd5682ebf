#pragma once

/**
 * @file text.hpp
 * @brief Small text helpers shared by the CSV readers and report writers.
 */

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace fatiguekit::text {

inline std::string_view trim(std::string_view s) {
  const auto *ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(s.substr(start)));
      break;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

/// Parses a full decimal field; rejects trailing garbage. Non-finite values
/// ("nan", "inf") parse successfully and are left to the caller to reject.
inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) {
    return std::nullopt;
  }
  if (s.front() == '+') {
    s.remove_prefix(1);
  }
  double v = 0.0;
  const auto *end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) {
    return std::nullopt;
  }
  return v;
}

/// Logical CSV line with its 1-based source line number.
struct Line {
  std::size_t number;
  std::string_view content;
};

/// Splits text into non-blank lines, dropping `#` comment lines and a
/// leading UTF-8 byte-order mark.
inline std::vector<Line> data_lines(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") {
    text.remove_prefix(3);
  }
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) {
      pos = text.size();
    }
    ++number;
    const auto line = trim(text.substr(start, pos - start));
    if (!line.empty() && line.front() != '#') {
      out.push_back({number, line});
    }
    start = pos + 1;
  }
  return out;
}

/// Fixed 9-significant-digit rendering used by every numeric output.
inline std::string fmt9(double v) {
  if (v == 0.0) {
    return "0";
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Rounds to 9 significant digits (the value fmt9 would print).
inline double round9(double v) {
  if (!std::isfinite(v) || v == 0.0) {
    return v == 0.0 ? 0.0 : v;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path, "cannot open for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError(path, "cannot open for writing");
  }
  out << content;
  if (!out) {
    throw IoError(path, "write failed");
  }
}

} // namespace fatiguekit::text
