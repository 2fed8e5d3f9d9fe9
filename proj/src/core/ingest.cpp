#include "core/ingest.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/timestamps.hpp"
#include "json.hpp"

namespace tracerank {
namespace {

[[noreturn]] void parse_fail(const std::string& source, size_t line, const std::string& what) {
  fail(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + what);
}

double parse_value(const std::string& source, size_t line, const std::string& text) {
  if (text.empty()) parse_fail(source, line, "empty value_usd");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(text.c_str(), &end);
  if (errno != 0 || end != text.c_str() + text.size() || !std::isfinite(v))
    parse_fail(source, line, "value_usd is not a decimal number: '" + text + "'");
  if (v < 0.0) parse_fail(source, line, "value_usd must be nonnegative, got '" + text + "'");
  return v;
}

int64_t parse_ts(const std::string& source, size_t line, const std::string& text) {
  auto ts = parse_timestamp(text);
  if (!ts) parse_fail(source, line, "unparseable timestamp: '" + text + "'");
  return *ts;
}

void add_record(GraphBuilder& b, const std::string& source, size_t line, const std::string& payer,
                const std::string& payee, double value, int64_t ts) {
  try {
    b.add(payer, payee, value, ts);
  } catch (const Error& e) {
    parse_fail(source, line, e.what());
  }
}

PaymentsFormat sniff_format(std::istream& in) {
  int c;
  while ((c = in.peek ()) != EOF && std::isspace(c)) in.get();
  return c == '{' ? PaymentsFormat::JsonLines : PaymentsFormat::Csv;
}

PaymentGraph ingest_csv(std::istream& in, GraphBuilder& builder, const std::string& source) {
  CsvReader reader(in);
  CsvReader::Row row;
  if (!reader.next(row)) fail(ErrorCode::Parse, source + ": missing CSV header row");

  int col_payer = -1, col_payee = -1, col_value = -1, col_ts = -1;
  for (size_t i = 0; i < row.fields.size(); ++i) {
    std::string h = row.fields[i];
    for (char& ch : h) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (h == "payer") col_payer = static_cast<int>(i);
    else if (h == "payee") col_payee = static_cast<int>(i);
    else if (h == "value_usd" || h == "value") col_value = static_cast<int>(i);
    else if (h == "timestamp") col_ts = static_cast<int>(i);
  }
  if (col_payer < 0 || col_payee < 0 || col_value < 0 || col_ts < 0)
    fail(ErrorCode::Parse,
         source + ": header must name payer, payee, value_usd and timestamp columns");

  size_t width = row.fields.size();
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;  // blank line
    if (row.fields.size() != width)
      parse_fail(source, row.line,
                 "expected " + std::to_string(width) + " fields, got " +
                     std::to_string(row.fields.size()));
    double v = parse_value(source, row.line, row.fields[col_value]);
    int64_t ts = parse_ts(source, row.line, row.fields[col_ts]);
    add_record(builder, source, row.line, row.fields[col_payer], row.fields[col_payee], v, ts);
  }
  return builder.finish();
}

PaymentGraph ingest_jsonl(std::istream& in, GraphBuilder& builder, const std::string& source) {
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // Allow blank lines.
    bool blank = true;
    for (char ch : line)
      if (!std::isspace(static_cast<unsigned char>(ch))) {
        blank = false;
        break;
      }
    if (blank) continue;

    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) parse_fail(source, lineno, "invalid JSON object");
    for (const char* key : {"payer", "payee", "value_usd", "timestamp"})
      if (!j.contains(key)) parse_fail(source, lineno, std::string("missing field '") + key + "'");

    if (!j["payer"].is_string() || !j["payee"].is_string())
      parse_fail(source, lineno, "payer/payee must be strings");

    double value;
    if (j["value_usd"].is_string())
      value = parse_value(source, lineno, j["value_usd"].get<std::string>());
    else if (j["value_usd"].is_number())
      value = j["value_usd"].get<double>();
    else
      parse_fail(source, lineno, "value_usd must be a number or decimal string");
    if (!std::isfinite(value) || value < 0.0)
      parse_fail(source, lineno, "value_usd must be nonnegative");

    int64_t ts;
    if (j["timestamp"].is_string())
      ts = parse_ts(source, lineno, j["timestamp"].get<std::string>());
    else if (j["timestamp"].is_number_integer())
      ts = j["timestamp"].get<int64_t>();
    else
      parse_fail(source, lineno, "timestamp must be Unix seconds or an RFC 3339 string");

    add_record(builder, source, lineno, j["payer"].get<std::string>(),
               j["payee"].get<std::string>(), value, ts);
  }
  return builder.finish();
}

}  // namespace

PaymentGraph ingest_payments(std::istream& in, const IngestOptions& opts,
                             const std::string& source) {
  GraphBuilder builder;
  builder.window(opts.window_start, opts.window_end);
  PaymentsFormat fmt = opts.format;
  if (fmt == PaymentsFormat::Auto) fmt = sniff_format(in);
  return fmt == PaymentsFormat::Csv ? ingest_csv(in, builder, source)
                                    : ingest_jsonl(in, builder, source);
}

PaymentGraph ingest_payments_file(const std::string& path, const IngestOptions& opts) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open payments file: " + path);
  IngestOptions o = opts;
  if (o.format == PaymentsFormat::Auto) {
    if (path.ends_with(".jsonl") || path.ends_with(".ndjson")) o.format = PaymentsFormat::JsonLines;
    else if (path.ends_with(".csv")) o.format = PaymentsFormat::Csv;
  }
  return ingest_payments(in, o, path);
}

SeedVector ingest_seeds(std::istream& in, const std::string& source) {
  CsvReader reader(in);
  CsvReader::Row row;
  if (!reader.next(row)) fail(ErrorCode::Parse, source + ": missing CSV header row");

  int col_addr = -1, col_seed = -1;
  for (size_t i = 0; i < row.fields.size(); ++i) {
    std::string h = row.fields[i];
    for (char& ch : h) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (h == "address") col_addr = static_cast<int>(i);
    else if (h == "seed") col_seed = static_cast<int>(i);
  }
  if (col_addr < 0 || col_seed < 0)
    fail(ErrorCode::Parse, source + ": header must name address and seed columns");

  SeedVector seeds;
  size_t width = row.fields.size();
  while (reader.next(row)) {
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != width)
      parse_fail(source, row.line, "expected " + std::to_string(width) + " fields");
    const std::string& text = row.fields[col_seed];
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(text.c_str(), &end);
    if (errno != 0 || text.empty() || end != text.c_str() + text.size())
      parse_fail(source, row.line, "seed is not a number: '" + text + "'");
    try {
      seeds.set(row.fields[col_addr], v);
    } catch (const Error& e) {
      parse_fail(source, row.line, e.what());
    }
  }
  return seeds;
}

SeedVector ingest_seeds_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open seeds file: " + path);
  return ingest_seeds(in, path);
}

}  // namespace tracerank
