#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tracerank {

// Lowercases and validates an address string. Throws on empty input.
std::string normalize_address(std::string_view raw);

// Immutable, lexicographically ordered address universe. Node ids are dense
// indices into the sorted name list, so id order == canonical address order
// and every downstream structure inherits input-order independence.
class AddressTable {
public:
  AddressTable() = default;
  static AddressTable from_names(std::vector<std::string> names);  // sorts + uniques

  std::optional<uint32_t> find(std::string_view normalized_name) const;
  const std::string& name(uint32_t id) const { return names_[id]; }
  uint32_t size() const { return static_cast<uint32_t>(names_.size()); }
  std::span<const std::string> names() const { return names_; }

private:
  std::vector<std::string> names_;
  std::unordered_map<std::string_view, uint32_t> index_;  // views into names_
};

using AddressTablePtr = std::shared_ptr<const AddressTable>;

// Merged sorted universe of two tables (used when seeds mention addresses the
// graph has never seen).
AddressTablePtr merge_tables(const AddressTable& a, std::span<const std::string> extra_names);

struct PaymentEdge {
  uint32_t payer;
  uint32_t payee;
  double value_usd;
  int64_t timestamp;  // Unix seconds, UTC
};

class PaymentGraph {
public:
  const AddressTablePtr& addresses() const { return addrs_; }
  std::span<const PaymentEdge> edges() const { return edges_; }
  uint32_t node_count() const { return addrs_->size(); }
  size_t edge_count() const { return edges_.size(); }
  uint64_t self_loops_dropped() const { return self_loops_dropped_; }
  uint64_t outside_window() const { return outside_window_; }
  const std::optional<std::pair<int64_t, int64_t>>& window() const { return window_; }

  // Max edge timestamp; nullopt for an edgeless graph.
  std::optional<int64_t> max_timestamp() const;

  std::string summary_json() const;

private:
  friend class GraphBuilder;
  AddressTablePtr addrs_;
  std::vector<PaymentEdge> edges_;  // sorted (payer, payee, timestamp, value)
  std::optional<std::pair<int64_t, int64_t>> window_;
  uint64_t self_loops_dropped_ = 0;
  uint64_t outside_window_ = 0;
};

// Single-writer construction; the finished graph is immutable.
class GraphBuilder {
public:
  GraphBuilder& window(std::optional<int64_t> start, std::optional<int64_t> end);

  // Validates one payment record. Self-loops and out-of-window records are
  // counted and dropped, not errors. Throws Error(InvalidArgument) on empty
  // addresses or negative/non-finite value.
  void add(std::string_view payer, std::string_view payee, double value_usd, int64_t timestamp);

  PaymentGraph finish();

private:
  struct RawEdge {
    std::string payer, payee;
    double value;
    int64_t ts;
  };
  std::vector<RawEdge> raw_;
  std::optional<int64_t> win_start_, win_end_;
  uint64_t self_loops_ = 0;
  uint64_t outside_window_ = 0;
};

// Nonnegative per-address seed reputation; absent addresses read as 0.
class SeedVector {
public:
  void set(std::string_view address, double value);  // validates >= 0, finite
  double get(std::string_view normalized_address) const;
  const std::map<std::string, double>& entries() const { return scores_; }
  double total() const;

private:
  std::map<std::string, double> scores_;
};

}  // namespace tracerank
