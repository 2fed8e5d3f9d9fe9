#include "core/flow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "core/timestamps.hpp"

namespace tracerank {

FlowMatrix FlowMatrix::aggregate(const PaymentGraph& graph, double lambda_per_day,
                                 std::optional<int64_t> as_of, bool clamp_future) {
  if (!std::isfinite(lambda_per_day) || lambda_per_day < 0.0)
    fail(ErrorCode::InvalidArgument, "lambda must be finite and >= 0");

  FlowMatrix m;
  m.addrs_ = graph.addresses();
  m.lambda_ = lambda_per_day;
  m.as_of_ = as_of.value_or(graph.max_timestamp().value_or(0));

  const uint32_t n = graph.node_count();

  // Ages in integer seconds; exact, and exactly shifted by uniform timestamp
  // shifts. Zero-value payments contribute log1p(0) == 0 and never create
  // entries, so they are skipped outright.
  struct Term {
    uint32_t payer;
    double log_value;
    int64_t age_s;
  };
  std::vector<std::vector<Term>> by_payee(n);
  for (const PaymentEdge& e : graph.edges()) {
    if (e.value_usd <= 0.0) continue;
    int64_t age_s = m.as_of_ - e.timestamp;
    if (age_s < 0) {
      if (!clamp_future)
        fail(ErrorCode::InvalidArgument,
             "payment at " + format_rfc3339(e.timestamp) + " is newer than as_of " +
                 format_rfc3339(m.as_of_) + " (use clamp-future to clamp ages to 0)");
      age_s = 0;
    }
    by_payee[e.payee].push_back(Term{e.payer, std::log1p(e.value_usd), age_s});
  }

  for (uint32_t payee = 0; payee < n; ++payee) {
    auto& terms = by_payee[payee];
    if (terms.empty()) continue;
    int64_t min_age = terms.front().age_s;
    for (const Term& t : terms) min_age = std::min(min_age, t.age_s);

    // Edges arrive sorted by (payer, payee, timestamp, value); stable
    // accumulation per payer keeps the reduction order canonical.
    std::map<uint32_t, std::pair<KahanSum, KahanSum>> per_payer;  // abs, rel
    for (const Term& t : terms) {
      double days = static_cast<double>(t.age_s) / static_cast<double>(kSecondsPerDay);
      double rel_days =
          static_cast<double>(t.age_s - min_age) / static_cast<double>(kSecondsPerDay);
      auto& [abs_sum, rel_sum] = per_payer[t.payer];
      abs_sum.add(t.log_value * std::exp(-lambda_per_day * days));
      rel_sum.add(t.log_value * std::exp(-lambda_per_day * rel_days));
    }
    for (auto& [payer, sums] : per_payer) {
      m.entries_.push_back(FlowEntry{payer, payee, sums.first.value(), sums.second.value()});
    }
  }
  // by_payee iteration already yields (payee, payer) order.
  return m;
}

FlowMatrix FlowMatrix::from_entries(AddressTablePtr addrs, std::vector<RawEntry> raw) {
  FlowMatrix m;
  m.addrs_ = std::move(addrs);
  for (const RawEntry& e : raw) {
    if (!std::isfinite(e.flow) || e.flow < 0.0)
      fail(ErrorCode::InvalidArgument, "flow entries must be finite and >= 0");
    if (e.flow == 0.0) continue;
    auto p = m.addrs_->find(e.payer);
    auto q = m.addrs_->find(e.payee);
    if (!p || !q) fail(ErrorCode::UnknownAddress, "flow entry names an unknown address");
    m.entries_.push_back(FlowEntry{*p, *q, e.flow, e.flow});
  }
  std::sort(m.entries_.begin(), m.entries_.end(), [](const FlowEntry& a, const FlowEntry& b) {
    return std::tie(a.payee, a.payer) < std::tie(b.payee, b.payer);
  });
  for (size_t i = 1; i < m.entries_.size(); ++i) {
    if (m.entries_[i].payer == m.entries_[i - 1].payer &&
        m.entries_[i].payee == m.entries_[i - 1].payee)
      fail(ErrorCode::InvalidArgument, "duplicate flow entry for a payer/payee pair");
  }
  return m;
}

FlowMatrix FlowMatrix::with_scaled_column(std::string_view payee, double factor) const {
  if (!(factor > 0.0) || !std::isfinite(factor))
    fail(ErrorCode::InvalidArgument, "scale factor must be finite and > 0");
  auto id = addrs_->find(payee);
  if (!id) fail(ErrorCode::UnknownAddress, "unknown payee: " + std::string(payee));
  FlowMatrix m = *this;
  for (FlowEntry& e : m.entries_) {
    if (e.payee == *id) {
      e.flow *= factor;
      e.column_relative_flow *= factor;
    }
  }
  return m;
}

double FlowMatrix::flow(std::string_view payer, std::string_view payee) const {
  auto p = addrs_->find(payer);
  auto q = addrs_->find(payee);
  if (!p || !q) return 0.0;
  for (const FlowEntry& e : entries_) {
    if (e.payer == *p && e.payee == *q) return e.flow;
  }
  return 0.0;
}

std::vector<double> FlowMatrix::out_flow_sums() const {
  std::vector<KahanSum> sums(addrs_->size());
  for (const FlowEntry& e : entries_) sums[e.payer].add(e.flow);
  std::vector<double> out(addrs_->size());
  for (size_t i = 0; i < out.size(); ++i) out[i] = sums[i].value();
  return out;
}

TransitionMatrix TransitionMatrix::normalize(const FlowMatrix& flows) {
  TransitionMatrix t;
  t.addrs_ = flows.addresses();
  const uint32_t n = t.addrs_->size();
  t.col_offsets_.assign(n + 1, 0);

  auto entries = flows.entries();
  size_t pos = 0;
  for (uint32_t payee = 0; payee < n; ++payee) {
    size_t begin = pos;
    KahanSum col_sum;
    while (pos < entries.size() && entries[pos].payee == payee) {
      col_sum.add(entries[pos].column_relative_flow);
      ++pos;
    }
    double s = col_sum.value();
    t.col_offsets_[payee] = t.payers_.size();
    if (s > 0.0) {
      for (size_t k = begin; k < pos; ++k) {
        t.payers_.push_back(entries[k].payer);
        t.weights_.push_back(entries[k].column_relative_flow / s);
      }
    } else {
      t.sinks_.push_back(payee);
    }
  }
  t.col_offsets_[n] = t.payers_.size();
  return t;
}

bool TransitionMatrix::is_sink(uint32_t payee) const {
  return std::binary_search(sinks_.begin(), sinks_.end(), payee);
}

double TransitionMatrix::column_sum(uint32_t payee) const {
  KahanSum s;
  for (size_t k = col_offsets_[payee]; k < col_offsets_[payee + 1]; ++k) s.add(weights_[k]);
  return s.value();
}

double TransitionMatrix::weight(std::string_view payer, std::string_view payee) const {
  auto p = addrs_->find(payer);
  auto q = addrs_->find(payee);
  if (!p || !q) return 0.0;
  for (size_t k = col_offsets_[*q]; k < col_offsets_[*q + 1]; ++k) {
    if (payers_[k] == *p) return weights_[k];
  }
  return 0.0;
}

void TransitionMatrix::apply_transposed(std::span<const double> x, std::span<double> y) const {
  const uint32_t n = size();
  for (uint32_t payee = 0; payee < n; ++payee) {
    KahanSum acc;
    for (size_t k = col_offsets_[payee]; k < col_offsets_[payee + 1]; ++k) {
      acc.add(weights_[k] * x[payers_[k]]);
    }
    y[payee] = acc.value();
  }
}

std::vector<TransitionMatrix::ColEntry> TransitionMatrix::column(uint32_t payee) const {
  std::vector<ColEntry> out;
  for (size_t k = col_offsets_[payee]; k < col_offsets_[payee + 1]; ++k)
    out.push_back(ColEntry{payers_[k], weights_[k]});
  return out;
}

}  // namespace tracerank
