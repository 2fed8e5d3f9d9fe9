#include "core/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <tuple>

#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "core/timestamps.hpp"
#include "json.hpp"

namespace tracerank {

std::string normalize_address(std::string_view raw) {
  if (raw.empty()) fail(ErrorCode::InvalidArgument, "empty address");
  std::string out(raw);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

AddressTable AddressTable::from_names(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  AddressTable t;
  t.names_ = std::move(names);
  t.index_.reserve(t.names_.size());
  for (uint32_t i = 0; i < t.names_.size(); ++i) t.index_.emplace(t.names_[i], i);
  return t;
}

std::optional<uint32_t> AddressTable::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

AddressTablePtr merge_tables(const AddressTable& a, std::span<const std::string> extra_names) {
  bool all_known = true;
  for (const auto& n : extra_names) {
    if (!a.find(n)) {
      all_known = false;
      break;
    }
  }
  std::vector<std::string> names(a.names().begin(), a.names().end());
  if (!all_known) {
    names.insert(names.end(), extra_names.begin(), extra_names.end());
  }
  return std::make_shared<const AddressTable>(AddressTable::from_names(std::move(names)));
}

std::optional<int64_t> PaymentGraph::max_timestamp() const {
  if (edges_.empty()) return std::nullopt;
  int64_t m = edges_.front().timestamp;
  for (const auto& e : edges_) m = std::max(m, e.timestamp);
  return m;
}

std::string PaymentGraph::summary_json() const {
  nlohmann::ordered_json j;
  j["nodes"] = node_count();
  j["edges"] = edge_count();
  j["self_loops_dropped"] = self_loops_dropped_;
  j["outside_window"] = outside_window_;
  if (window_) {
    j["window"] = {{"start", window_->first},
                   {"start_rfc3339", format_rfc3339(window_->first)},
                   {"end", window_->second},
                   {"end_rfc3339", format_rfc3339(window_->second)}};
  } else {
    j["window"] = nullptr;
  }
  return j.dump();
}

GraphBuilder& GraphBuilder::window(std::optional<int64_t> start, std::optional<int64_t> end) {
  if (start && end && *start > *end)
    fail(ErrorCode::InvalidArgument, "window start after window end");
  win_start_ = start;
  win_end_ = end;
  return *this;
}

void GraphBuilder::add(std::string_view payer, std::string_view payee, double value_usd,
                       int64_t timestamp) {
  std::string p = normalize_address(payer);
  std::string q = normalize_address(payee);
  if (!std::isfinite(value_usd) || value_usd < 0.0)
    fail(ErrorCode::InvalidArgument, "value_usd must be a finite nonnegative number");
  if (p == q) {
    ++self_loops_;
    return;
  }
  if ((win_start_ && timestamp < *win_start_) || (win_end_ && timestamp > *win_end_)) {
    ++outside_window_;
    return;
  }
  raw_.push_back(RawEdge{std::move(p), std::move(q), value_usd, timestamp});
}

PaymentGraph GraphBuilder::finish() {
  std::vector<std::string> names;
  names.reserve(raw_.size() * 2);
  for (const auto& e : raw_) {
    names.push_back(e.payer);
    names.push_back(e.payee);
  }
  auto table = std::make_shared<const AddressTable>(AddressTable::from_names(std::move(names)));

  PaymentGraph g;
  g.addrs_ = table;
  g.edges_.reserve(raw_.size());
  for (const auto& e : raw_) {
    g.edges_.push_back(PaymentEdge{*table->find(e.payer), *table->find(e.payee), e.value, e.ts});
  }
  std::sort(g.edges_.begin(), g.edges_.end(), [](const PaymentEdge& a, const PaymentEdge& b) {
    return std::tie(a.payer, a.payee, a.timestamp, a.value_usd) <
           std::tie(b.payer, b.payee, b.timestamp, b.value_usd);
  });
  if (win_start_ || win_end_) {
    int64_t lo = win_start_.value_or(std::numeric_limits<int64_t>::min());
    int64_t hi = win_end_.value_or(std::numeric_limits<int64_t>::max());
    g.window_ = {lo, hi};
  }
  g.self_loops_dropped_ = self_loops_;
  g.outside_window_ = outside_window_;
  raw_.clear();
  return g;
}

void SeedVector::set(std::string_view address, double value) {
  std::string a = normalize_address(address);
  if (!std::isfinite(value) || value < 0.0)
    fail(ErrorCode::InvalidArgument, "seed for '" + a + "' must be finite and >= 0");
  scores_[std::move(a)] = value;
}

double SeedVector::get(std::string_view name) const {
  auto it = scores_.find(std::string(name));
  return it == scores_.end() ? 0.0 : it->second;
}

double SeedVector::total() const {
  KahanSum s;
  for (const auto& [_, v] : scores_) s.add(v);
  return s.value();
}

}  // namespace tracerank
