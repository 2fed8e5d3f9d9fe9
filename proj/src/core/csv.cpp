#include "core/csv.hpp"

#include "core/errors.hpp"

namespace tracerank {

bool CsvReader::next(Row& row) {
  row.fields.clear();
  row.line = line_;
  if (eof_) return false;

  int c = in_.get();
  if (c == EOF) {
    eof_ = true;
    return false;
  }

  std::string field;
  bool quoted = false;
  bool any = false;
  for (;;) {
    if (quoted) {
      if (c == EOF) fail(ErrorCode::Parse, "line " + std::to_string(row.line) + ": unterminated quoted field");
      if (c == '"') {
        int peek = in_.get();
        if (peek == '"') {
          field.push_back('"');
        } else {
          quoted = false;
          c = peek;
          continue;  // reprocess the char after the closing quote
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(static_cast<char>(c));
      }
    } else {
      if (c == EOF || c == '\n') {
        if (c == '\n') ++line_;
        else eof_ = true;
        if (!field.empty() && field.back() == '\r') field.pop_back();
        row.fields.push_back(std::move(field));
        any = true;
        break;
      }
      if (c == ',') {
        row.fields.push_back(std::move(field));
        field.clear();
        any = true;
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else {
        field.push_back(static_cast<char>(c));
      }
    }
    c = in_.get();
  }
  // A single empty final line is treated as end of input.
  if (row.fields.size() == 1 && row.fields[0].empty() && in_.peek() == EOF) {
    eof_ = true;
    return any && false;
  }
  return true;
}

std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out += "\"";
  return out;
}

}  // namespace tracerank
