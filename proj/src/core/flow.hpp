#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/graph.hpp"

namespace tracerank {

// Aggregated pairwise flow: for each (payer j, payee i),
//   F[j->i] = sum over payments e of log(1 + value_usd(e)) * exp(-lambda * age_days(e)),
// age_days = (as_of - timestamp) / 86400 as a real number.
//
// Each entry carries two values. `flow` is the plain aggregate above.
// `column_relative_flow` evaluates the same sum with ages re-referenced to the
// column's youngest inbound payment (an exact int64 subtraction), which is the
// value normalization divides by. Per column the two differ only by the common
// factor exp(-lambda * min_age), so the resulting weights are identical up to
// rounding; the relative form keeps normalization exact under uniform age
// shifts and immune to exp() underflow on very old columns.
struct FlowEntry {
  uint32_t payer;
  uint32_t payee;
  double flow;
  double column_relative_flow;
};

class FlowMatrix {
public:
  // as_of defaults to the graph's max edge timestamp. Payments newer than
  // as_of are an error unless clamp_future, which clamps their age to 0.
  static FlowMatrix aggregate(const PaymentGraph& graph, double lambda_per_day,
                              std::optional<int64_t> as_of, bool clamp_future = false);

  // Direct construction from flow values (column_relative_flow == flow).
  struct RawEntry {
    std::string payer, payee;
    double flow;
  };
  static FlowMatrix from_entries(AddressTablePtr addrs, std::vector<RawEntry> entries);

  // Copy with every flow into `payee` multiplied by `factor` (> 0).
  FlowMatrix with_scaled_column(std::string_view payee, double factor) const;

  const AddressTablePtr& addresses() const { return addrs_; }
  std::span<const FlowEntry> entries() const { return entries_; }  // sorted (payee, payer)
  double lambda_per_day() const { return lambda_; }
  int64_t as_of() const { return as_of_; }

  // Absolute flow for a pair; 0 when no entry exists.
  double flow(std::string_view payer, std::string_view payee) const;

  // Sum of absolute flows out of each payer (row sums), for out-normalized uses.
  std::vector<double> out_flow_sums() const;

private:
  AddressTablePtr addrs_;
  std::vector<FlowEntry> entries_;
  double lambda_ = 0.0;
  int64_t as_of_ = 0;
};

// Column-normalized inbound-flow matrix: w[j][i] = F[j->i] / S_i for columns
// with S_i > 0; columns with no inbound flow are sinks and stay all-zero.
// Stored column-major (CSC by payee) with entries in canonical payer order,
// which fixes the reduction order of every matrix-vector product.
class TransitionMatrix {
public:
  static TransitionMatrix normalize(const FlowMatrix& flows);

  const AddressTablePtr& addresses() const { return addrs_; }
  uint32_t size() const { return addrs_->size(); }
  size_t entry_count() const { return weights_.size(); }
  std::span<const uint32_t> sink_columns() const { return sinks_; }
  bool is_sink(uint32_t payee) const;

  double column_sum(uint32_t payee) const;  // compensated
  double weight(std::string_view payer, std::string_view payee) const;

  // y = W^T x, i.e. y[i] = sum_j w[j][i] x[j]. Deterministic entry order.
  void apply_transposed(std::span<const double> x, std::span<double> y) const;

  // Column accessor for oracles/serialization: (payer id, weight) pairs.
  struct ColEntry {
    uint32_t payer;
    double weight;
  };
  std::vector<ColEntry> column(uint32_t payee) const;

private:
  AddressTablePtr addrs_;
  std::vector<size_t> col_offsets_;  // size n+1
  std::vector<uint32_t> payers_;
  std::vector<double> weights_;
  std::vector<uint32_t> sinks_;  // sorted payee ids with zero inbound flow
};

}  // namespace tracerank
