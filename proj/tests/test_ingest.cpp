#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "core/errors.hpp"
#include "core/ingest.hpp"
#include "helpers.hpp"

using namespace tracerank;

namespace {

PaymentGraph from_csv(const std::string& text, IngestOptions opts = {}) {
  std::istringstream in(text);
  return ingest_payments(in, opts, "test.csv");
}

PaymentGraph from_jsonl(const std::string& text) {
  std::istringstream in(text);
  IngestOptions opts;
  opts.format = PaymentsFormat::JsonLines;
  return ingest_payments(in, opts, "test.jsonl");
}

}  // namespace

TEST_CASE("three-record csv builds the expected graph") {
  auto g = from_csv(
      "payer,payee,value_usd,timestamp\n"
      "Alice,bob,10,100\n"
      "alice,carol,2.5,2025-01-01T00:00:00Z\n"
      "bob,carol,0.25,200\n");
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 3);
  CHECK(g.addresses()->find("alice").has_value());  // lowercased
  CHECK(g.addresses()->find("Alice") == std::nullopt);
  CHECK(g.max_timestamp() == 1735689600);
  CHECK(g.self_loops_dropped() == 0);
}

TEST_CASE("header columns may be reordered and value aliased") {
  auto g = from_csv(
      "timestamp,VALUE,payee,payer\n"
      "100,3,svc,payer1\n");
  CHECK(g.edge_count() == 1);
  CHECK(g.edges()[0].value_usd == 3.0);
}

TEST_CASE("quoted fields with commas and embedded newlines") {
  auto g = from_csv(
      "payer,payee,value_usd,timestamp\n"
      "\"a,comma\",\"multi\nline\",1,100\n");
  CHECK(g.node_count() == 2);
  CHECK(g.addresses()->find("a,comma").has_value());
  CHECK(g.addresses()->find("multi\nline").has_value());
}

TEST_CASE("self-loops are counted and dropped, not errors") {
  auto g = from_csv(
      "payer,payee,value_usd,timestamp\n"
      "a,a,5,100\n"
      "a,b,5,100\n");
  CHECK(g.edge_count() == 1);
  CHECK(g.self_loops_dropped() == 1);
}

TEST_CASE("observation window drops records outside it") {
  IngestOptions opts;
  opts.window_start = 100;
  opts.window_end = 200;
  auto g = from_csv(
      "payer,payee,value_usd,timestamp\n"
      "a,b,1,99\n"
      "a,b,1,100\n"
      "a,b,1,200\n"
      "a,b,1,201\n",
      opts);
  CHECK(g.edge_count() == 2);  // boundaries inclusive
  CHECK(g.outside_window() == 2);
  REQUIRE(g.window().has_value());
  CHECK(g.window()->first == 100);
  CHECK(g.window()->second == 200);
}

TEST_CASE("parse errors carry source and line") {
  auto check_throws = [](const std::string& body, const char* needle) {
    try {
      from_csv(body);
      FAIL_CHECK("expected a parse error for: " << needle);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  check_throws("payer,payee,value_usd,timestamp\na,b,oops,100\n", "test.csv:2");
  check_throws("payer,payee,value_usd,timestamp\na,b,-3,100\n", "nonnegative");
  check_throws("payer,payee,value_usd,timestamp\na,b,1,yesterday\n", "timestamp");
  check_throws("payer,payee,value_usd,timestamp\na,b,1\n", "expected 4 fields");
  check_throws("payer,payee,value_usd,timestamp\n,b,1,100\n", "test.csv:2");
  check_throws("payer,value_usd,timestamp\na,1,100\n", "header");
  check_throws("", "header");
}

TEST_CASE("json lines ingestion") {
  auto g = from_jsonl(
      "{\"payer\":\"a\",\"payee\":\"b\",\"value_usd\":10,\"timestamp\":100}\n"
      "\n"
      "{\"payer\":\"a\",\"payee\":\"c\",\"value_usd\":\"2.5\",\"timestamp\":\"1970-01-01T00:05:00Z\"}\n");
  CHECK(g.edge_count() == 2);
  CHECK(g.max_timestamp() == 300);
}

TEST_CASE("json lines errors name the line") {
  auto bad = [](const std::string& body, const char* needle) {
    std::istringstream in(body);
    IngestOptions opts;
    opts.format = PaymentsFormat::JsonLines;
    try {
      ingest_payments(in, opts, "test.jsonl");
      FAIL_CHECK("expected a parse error for: " << needle);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Parse);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  bad("not json\n", "test.jsonl:1");
  bad("{\"payer\":\"a\",\"payee\":\"b\",\"value_usd\":1}\n", "timestamp");
  bad("{\"payer\":\"a\",\"payee\":\"b\",\"value_usd\":-1,\"timestamp\":1}\n", "nonnegative");
}

TEST_CASE("format sniffing by extension and content") {
  trtest::TempDir dir;
  trtest::spit(dir.file("p.jsonl"),
               "{\"payer\":\"a\",\"payee\":\"b\",\"value_usd\":1,\"timestamp\":1}\n");
  CHECK(ingest_payments_file(dir.file("p.jsonl"), {}).edge_count() == 1);

  // No extension hint: content sniffing sees '{'.
  trtest::spit(dir.file("payments"),
               "{\"payer\":\"a\",\"payee\":\"b\",\"value_usd\":1,\"timestamp\":1}\n");
  CHECK(ingest_payments_file(dir.file("payments"), {}).edge_count() == 1);

  CHECK_THROWS_AS(ingest_payments_file(dir.file("missing.csv"), {}), Error);
}

TEST_CASE("input order does not matter") {
  auto a = from_csv(
      "payer,payee,value_usd,timestamp\n"
      "a,b,1,100\n"
      "c,d,2,200\n");
  auto b = from_csv(
      "payer,payee,value_usd,timestamp\n"
      "c,d,2,200\n"
      "a,b,1,100\n");
  REQUIRE(a.edge_count() == b.edge_count());
  for (size_t i = 0; i < a.edge_count(); ++i) {
    CHECK(a.edges()[i].payer == b.edges()[i].payer);
    CHECK(a.edges()[i].payee == b.edges()[i].payee);
    CHECK(a.edges()[i].value_usd == b.edges()[i].value_usd);
  }
  CHECK(a.summary_json() == b.summary_json());
}

TEST_CASE("seeds csv") {
  std::istringstream in(
      "address,seed\n"
      "Walle,0.5\n"
      "deep,0.9\n"
      "walle,0.7\n");
  SeedVector seeds = ingest_seeds(in, "seeds.csv");
  CHECK(seeds.entries().size() == 2);
  CHECK(seeds.get("walle") == 0.7);  // last write wins, normalized
  CHECK(seeds.get("deep") == 0.9);
  CHECK(seeds.get("absent") == 0.0);
  CHECK(seeds.total() == doctest::Approx(1.6));
}

TEST_CASE("seed validation") {
  auto bad = [](const std::string& body, const char* needle) {
    std::istringstream in(body);
    try {
      ingest_seeds(in, "seeds.csv");
      FAIL_CHECK("expected error: " << needle);
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  bad("address,seed\na,not-a-number\n", "seeds.csv:2");
  bad("address,seed\na,-0.5\n", "seeds.csv:2");
  bad("address\na\n", "header");
}
