#pragma once

// RFC 4180 style CSV: '\n' line endings, '.' decimal point, doubles with 17
// significant digits (exact round trip), header row always present.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "kreinx/errors.hpp"

namespace kreinx {

using CsvCell = std::variant<std::string, double, std::int64_t>;

/// Locale-independent shortest form with 17 significant digits.
inline std::string format_double(double v) {
  if (!std::isfinite(v)) throw Error(ErrorKind::IoError, "refusing to write a non-finite value");
  if (v == 0.0) v = 0.0;  // no "-0"
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (res.ec != std::errc()) throw Error(ErrorKind::IoError, "number formatting failed");
  return {buf, res.ptr};
}

inline std::string quote_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {
    if (columns_.empty()) throw Error(ErrorKind::IoError, "CSV schema has no columns");
  }

  void add_row(std::vector<CsvCell> row) {
    if (row.size() != columns_.size())
      throw Error(ErrorKind::IoError, "row has " + std::to_string(row.size()) + " cells, schema has " +
                                          std::to_string(columns_.size()));
    rows_.push_back(std::move(row));
  }

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return rows_.size(); }

  std::string str() const {
    std::string out;
    append_line(out, columns_);
    std::vector<std::string> cells;
    for (const auto& row : rows_) {
      cells.clear();
      for (const auto& cell : row) {
        if (const auto* s = std::get_if<std::string>(&cell)) cells.push_back(*s);
        else if (const auto* d = std::get_if<double>(&cell)) cells.push_back(format_double(*d));
        else cells.push_back(std::to_string(std::get<std::int64_t>(cell)));
      }
      append_line(out, cells);
    }
    return out;
  }

  /// Writes the whole table; the file is left untouched if formatting fails.
  void write(const std::string& path) const {
    const std::string text = str();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
    f << text;
    f.flush();
    if (!f) throw Error(ErrorKind::IoError, "write to " + path + " failed");
  }

 private:
  static void append_line(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += quote_field(cells[i]);
    }
    out += '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::vector<CsvCell>> rows_;
};

}  // namespace kreinx
