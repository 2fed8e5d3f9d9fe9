#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <vector>

namespace tracerank {

// Minimal RFC 4180 reader: comma-separated, double-quote quoting with ""
// escapes, quoted fields may contain commas and newlines. CRLF and LF both
// accepted. Rows keep their 1-based starting line number for error reports.
class CsvReader {
public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  struct Row {
    std::vector<std::string> fields;
    size_t line = 0;
  };

  // Returns false at end of input. Throws Error(Parse) on a lone quote or an
  // unterminated quoted field.
  bool next(Row& row);

private:
  std::istream& in_;
  size_t line_ = 1;
  bool eof_ = false;
};

std::string csv_quote(const std::string& field);

}  // namespace tracerank
