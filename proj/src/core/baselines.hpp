#pragma once

#include <string>
#include <vector>

#include "core/flow.hpp"
#include "core/graph.hpp"

namespace tracerank {

enum class BaselineMethod { Count, Volume, PageRank };

const char* baseline_method_name(BaselineMethod m);

struct BaselineResult {
  AddressTablePtr addresses;
  BaselineMethod method;
  std::vector<double> scores;
  int iterations_used = 0;
  bool converged = true;

  double score_of(std::string_view address) const;
};

// score(i) = number of inbound payments.
BaselineResult count_rank(const PaymentGraph& graph);

// score(i) = sum of inbound payment values in USD.
BaselineResult volume_rank(const PaymentGraph& graph);

struct PageRankConfig {
  double damping = 0.85;
  double tol = 1e-9;
  int max_iter = 200;
  bool weighted = true;  // out-normalized aggregated flows; false = plain adjacency
};

// Classic unseeded PageRank with uniform teleportation over the payment
// graph; dangling mass is redistributed uniformly, so scores always sum to 1.
// Weighted mode distributes each payer's step mass proportionally to its
// outgoing aggregated flows; unweighted mode splits it evenly over the
// distinct payees it has paid (pairs with positive aggregated flow).
BaselineResult pagerank_unseeded(const FlowMatrix& flows, const PageRankConfig& cfg);

}  // namespace tracerank
