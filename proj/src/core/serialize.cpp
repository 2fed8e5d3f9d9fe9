#include "core/serialize.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "json.hpp"

namespace tracerank {
namespace {

double parse_double_field(const std::string& field, const std::string& path, size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size())
    fail(ErrorCode::Parse, path + ":" + std::to_string(line) + ": bad number '" + field + "'");
  return v;
}

void expect_header(const CsvReader::Row& row, std::initializer_list<const char*> names,
                   const std::string& path) {
  bool ok = row.fields.size() == names.size();
  size_t i = 0;
  for (const char* n : names)
    if (ok && row.fields[i++] != n) ok = false;
  if (!ok) {
    std::string want;
    for (const char* n : names) want += (want.empty() ? "" : ",") + std::string(n);
    fail(ErrorCode::Parse, path + ":1: expected header '" + want + "'");
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "error reading " + path);
  return std::move(out).str();
}

void write_text_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) fail(ErrorCode::Io, "error writing " + path);
}

void write_payments_csv(const std::string& path, const PaymentGraph& graph) {
  std::string text = "payer,payee,value_usd,timestamp\n";
  const auto& table = *graph.addresses();
  for (const PaymentEdge& e : graph.edges()) {
    text += csv_quote(table.name(e.payer));
    text += ',';
    text += csv_quote(table.name(e.payee));
    text += ',';
    text += format_g12(e.value_usd);
    text += ',';
    text += std::to_string(e.timestamp);
    text += '\n';
  }
  write_text_file(path, text);
}

void write_seeds_csv(const std::string& path, const SeedVector& seeds) {
  std::string text = "address,seed\n";
  for (const auto& [address, value] : seeds.entries()) {
    text += csv_quote(address);
    text += ',';
    text += format_g12(value);
    text += '\n';
  }
  write_text_file(path, text);
}

void write_profiles_jsonl(const std::string& path, const std::vector<ServiceProfile>& profiles) {
  std::string text;
  for (const ServiceProfile& p : profiles) {
    nlohmann::ordered_json j;
    j["address"] = p.address;
    j["description"] = p.description;
    j["tags"] = p.tags;
    if (!p.chain.empty()) j["chain"] = p.chain;
    text += j.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

void write_flows_csv(const std::string& path, const FlowMatrix& flows) {
  std::string text = "payer,payee,flow\n";
  const auto& table = *flows.addresses();
  for (const FlowEntry& e : flows.entries()) {
    text += csv_quote(table.name(e.payer));
    text += ',';
    text += csv_quote(table.name(e.payee));
    text += ',';
    text += format_g12(e.flow);
    text += '\n';
  }
  write_text_file(path, text);
}

FlowMatrix read_flows_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  CsvReader reader(in);
  CsvReader::Row row;
  if (!reader.next(row)) fail(ErrorCode::Parse, path + ": empty file");
  expect_header(row, {"payer", "payee", "flow"}, path);

  std::vector<FlowMatrix::RawEntry> entries;
  std::vector<std::string> names;
  while (reader.next(row)) {
    if (row.fields.size() != 3)
      fail(ErrorCode::Parse, path + ":" + std::to_string(row.line) + ": expected 3 fields");
    FlowMatrix::RawEntry e;
    e.payer = normalize_address(row.fields[0]);
    e.payee = normalize_address(row.fields[1]);
    e.flow = parse_double_field(row.fields[2], path, row.line);
    names.push_back(e.payer);
    names.push_back(e.payee);
    entries.push_back(std::move(e));
  }
  auto table = std::make_shared<const AddressTable>(AddressTable::from_names(std::move(names)));
  return FlowMatrix::from_entries(std::move(table), std::move(entries));
}

void write_scores_csv(const std::string& path, const SolveResult& result) {
  std::string text = "address,tracerank,seed\n";
  const auto& table = *result.addresses;
  for (uint32_t i = 0; i < table.size(); ++i) {
    text += csv_quote(table.name(i));
    text += ',';
    text += format_g12(result.scores[i]);
    text += ',';
    text += format_g12(result.seeds[i]);
    text += '\n';
  }
  write_text_file(path, text);
}

double ScoresArtifact::score_of(std::string_view address) const {
  auto it = std::lower_bound(addresses.begin(), addresses.end(), address);
  if (it == addresses.end() || *it != address) return 0.0;
  return scores[static_cast<size_t>(it - addresses.begin())];
}

ScoresArtifact read_scores_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path);
  CsvReader reader(in);
  CsvReader::Row row;
  if (!reader.next(row)) fail(ErrorCode::Parse, path + ": empty file");
  expect_header(row, {"address", "tracerank", "seed"}, path);

  ScoresArtifact art;
  while (reader.next(row)) {
    if (row.fields.size() != 3)
      fail(ErrorCode::Parse, path + ":" + std::to_string(row.line) + ": expected 3 fields");
    art.addresses.push_back(normalize_address(row.fields[0]));
    art.scores.push_back(parse_double_field(row.fields[1], path, row.line));
    art.seeds.push_back(parse_double_field(row.fields[2], path, row.line));
  }
  if (!std::is_sorted(art.addresses.begin(), art.addresses.end()) ||
      std::adjacent_find(art.addresses.begin(), art.addresses.end()) != art.addresses.end())
    fail(ErrorCode::Parse, path + ": addresses must be sorted and unique");
  return art;
}

std::vector<uint32_t> ranked_order(std::span<const std::string> addresses,
                                   std::span<const double> scores) {
  std::vector<uint32_t> order(addresses.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return addresses[a] < addresses[b];
  });
  return order;
}

void write_scores_jsonl(const std::string& path, const SolveResult& result) {
  std::string text;
  auto order = ranked_order(result.addresses->names(), result.scores);
  for (size_t pos = 0; pos < order.size(); ++pos) {
    uint32_t i = order[pos];
    nlohmann::ordered_json j;
    j["rank"] = pos + 1;
    j["address"] = result.addresses->name(i);
    j["tracerank"] = round12(result.scores[i]);
    j["seed"] = round12(result.seeds[i]);
    text += j.dump();
    text += '\n';
  }
  write_text_file(path, text);
}

void write_residuals_csv(const std::string& path, const SolveResult& result) {
  std::string text = "iteration,residual_l1,residual_linf\n";
  for (size_t t = 0; t < result.residual_l1_log.size(); ++t) {
    text += std::to_string(t + 1);
    text += ',';
    text += format_g12(result.residual_l1_log[t]);
    text += ',';
    text += format_g12(result.residual_linf_log[t]);
    text += '\n';
  }
  write_text_file(path, text);
}

}  // namespace tracerank
