#include "core/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "core/errors.hpp"
#include "core/numeric.hpp"

namespace tracerank {

const char* baseline_method_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::Count: return "count";
    case BaselineMethod::Volume: return "volume";
    case BaselineMethod::PageRank: return "pagerank";
  }
  return "?";
}

double BaselineResult::score_of(std::string_view address) const {
  auto id = addresses->find(address);
  if (!id) fail(ErrorCode::UnknownAddress, "unknown address: " + std::string(address));
  return scores[*id];
}

BaselineResult count_rank(const PaymentGraph& graph) {
  BaselineResult r{graph.addresses(), BaselineMethod::Count, {}};
  r.scores.assign(graph.node_count(), 0.0);
  for (const PaymentEdge& e : graph.edges()) r.scores[e.payee] += 1.0;
  return r;
}

BaselineResult volume_rank(const PaymentGraph& graph) {
  BaselineResult r{graph.addresses(), BaselineMethod::Volume, {}};
  std::vector<KahanSum> sums(graph.node_count());
  for (const PaymentEdge& e : graph.edges()) sums[e.payee].add(e.value_usd);
  r.scores.resize(graph.node_count());
  for (size_t i = 0; i < sums.size(); ++i) r.scores[i] = sums[i].value();
  return r;
}

BaselineResult pagerank_unseeded(const FlowMatrix& flows, const PageRankConfig& cfg) {
  if (!(cfg.damping > 0.0) || !(cfg.damping < 1.0))
    fail(ErrorCode::InvalidArgument, "damping must lie in (0,1)");
  if (!(cfg.tol > 0.0)) fail(ErrorCode::InvalidArgument, "tol must be positive");
  if (cfg.max_iter < 1) fail(ErrorCode::InvalidArgument, "max_iter must be >= 1");
  const uint32_t n = flows.addresses()->size();
  if (n == 0) fail(ErrorCode::InvalidArgument, "pagerank requires a nonempty node set");

  // Out-normalized step weights per (payer -> payee) pair.
  struct Link {
    uint32_t payer, payee;
    double weight;
  };
  std::vector<Link> links;
  std::vector<double> out = flows.out_flow_sums();
  std::vector<uint32_t> outdeg(n, 0);
  for (const FlowEntry& e : flows.entries()) ++outdeg[e.payer];
  for (const FlowEntry& e : flows.entries()) {
    double w = cfg.weighted ? (out[e.payer] > 0.0 ? e.flow / out[e.payer] : 0.0)
                            : 1.0 / static_cast<double>(outdeg[e.payer]);
    if (w > 0.0) links.push_back(Link{e.payer, e.payee, w});
  }
  std::sort(links.begin(), links.end(), [](const Link& a, const Link& b) {
    return std::tie(a.payee, a.payer) < std::tie(b.payee, b.payer);
  });
  // Nodes whose whole step mass teleports: no out-links, or (weighted mode)
  // out-flows that underflowed to zero.
  std::vector<char> dangling(n, 1);
  for (const Link& l : links) dangling[l.payer] = 0;

  const double d = cfg.damping;
  std::vector<double> rank(n, 1.0 / n), next(n);

  BaselineResult result{flows.addresses(), BaselineMethod::PageRank, {}};
  for (int t = 1; t <= cfg.max_iter; ++t) {
    KahanSum dangling_mass;
    for (uint32_t i = 0; i < n; ++i)
      if (dangling[i]) dangling_mass.add(rank[i]);
    double base = (1.0 - d) / n + d * dangling_mass.value() / n;
    for (uint32_t i = 0; i < n; ++i) next[i] = base;
    for (const Link& l : links) next[l.payee] += d * l.weight * rank[l.payer];

    double res = sum_l1(next, rank);
    rank.swap(next);
    result.iterations_used = t;
    if (res <= cfg.tol) {
      result.converged = true;
      result.scores = rank;
      return result;
    }
  }
  result.converged = false;
  result.scores = rank;
  return result;
}

}  // namespace tracerank
