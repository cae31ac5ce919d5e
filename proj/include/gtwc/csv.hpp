// CSV output with a stable schema: one fixed header row, values with 12
// significant digits, newline-terminated rows.

#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

namespace gtwc {

inline std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  template <class... Cols>
  void header(Cols&&... cols) {
    emit_row(std::forward<Cols>(cols)...);
  }

  template <class... Cells>
  void row(Cells&&... cells) {
    emit_row(std::forward<Cells>(cells)...);
  }

 private:
  static std::string cell(const char* s) { return s; }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(double v) { return csv_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(std::uint64_t v) { return std::to_string(v); }

  template <class... Cells>
  void emit_row(Cells&&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << "\n";
  }

  std::ostream& out_;
};

}  // namespace gtwc
