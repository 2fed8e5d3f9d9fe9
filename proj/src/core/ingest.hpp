#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "core/graph.hpp"

namespace tracerank {

enum class PaymentsFormat { Auto, Csv, JsonLines };

struct IngestOptions {
  std::optional<int64_t> window_start;
  std::optional<int64_t> window_end;
  PaymentsFormat format = PaymentsFormat::Auto;
};

// Payments file: CSV with a required header naming payer/payee/value_usd/
// timestamp columns (any order), or JSON-lines objects with those keys.
// value_usd accepts a decimal string or number, timestamp accepts Unix
// seconds or RFC 3339. Parse failures throw Error(Parse) naming the line.
PaymentGraph ingest_payments(std::istream& in, const IngestOptions& opts,
                             const std::string& source_name = "payments");
PaymentGraph ingest_payments_file(const std::string& path, const IngestOptions& opts);

// Seeds file: CSV with header address,seed.
SeedVector ingest_seeds(std::istream& in, const std::string& source_name = "seeds");
SeedVector ingest_seeds_file(const std::string& path);

}  // namespace tracerank
