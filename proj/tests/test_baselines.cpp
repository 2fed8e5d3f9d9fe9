#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "core/baselines.hpp"
#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/graph.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace tracerank;
using trtest::TestRng;

namespace {

// Dense long double PageRank by definition: uniform teleport, uniform
// redistribution of dangling mass, step weights out-normalized per payer.
std::vector<double> reference_pagerank(const FlowMatrix& flows, double d, bool weighted) {
  const uint32_t n = flows.addresses()->size();
  std::vector<long double> out(n, 0.0L);
  std::vector<uint32_t> outdeg(n, 0);
  for (const FlowEntry& e : flows.entries()) {
    out[e.payer] += static_cast<long double>(e.flow);
    ++outdeg[e.payer];
  }
  std::vector<long double> w(static_cast<size_t>(n) * n, 0.0L);  // w[payer][payee]
  std::vector<char> dangling(n, 1);
  for (const FlowEntry& e : flows.entries()) {
    long double wt = weighted ? (out[e.payer] > 0.0L ? e.flow / out[e.payer] : 0.0L)
                              : 1.0L / static_cast<long double>(outdeg[e.payer]);
    if (wt > 0.0L) {
      w[static_cast<size_t>(e.payer) * n + e.payee] = wt;
      dangling[e.payer] = 0;
    }
  }
  std::vector<long double> r(n, 1.0L / n), next(n);
  for (int t = 0; t < 100000; ++t) {
    long double dangling_mass = 0.0L;
    for (uint32_t i = 0; i < n; ++i)
      if (dangling[i]) dangling_mass += r[i];
    long double base = (1.0L - d) / n + d * dangling_mass / n;
    long double step = 0.0L;
    for (uint32_t i = 0; i < n; ++i) {
      long double acc = 0.0L;
      for (uint32_t j = 0; j < n; ++j) acc += w[static_cast<size_t>(j) * n + i] * r[j];
      next[i] = base + static_cast<long double>(d) * acc;
      long double diff = next[i] >= r[i] ? next[i] - r[i] : r[i] - next[i];
      step = std::max(step, diff);
    }
    r.swap(next);
    if (step <= 1e-18L) break;
  }
  return std::vector<double>(r.begin(), r.end());
}

double sum_of(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total;
}

}  // namespace

TEST_CASE("count rank tallies inbound payments") {
  GraphBuilder builder;
  builder.add("a", "x", 10.0, 1000);
  builder.add("a", "x", 20.0, 2000);
  builder.add("b", "x", 5.0, 3000);
  builder.add("b", "y", 7.0, 4000);
  builder.add("b", "b", 99.0, 5000);  // self-loop, dropped
  PaymentGraph graph = builder.finish();

  BaselineResult r = count_rank(graph);
  CHECK(r.method == BaselineMethod::Count);
  CHECK(std::string(baseline_method_name(r.method)) == "count");
  CHECK(r.converged);
  CHECK(r.score_of("x") == 3.0);
  CHECK(r.score_of("y") == 1.0);
  CHECK(r.score_of("a") == 0.0);
  CHECK(r.score_of("b") == 0.0);
  CHECK_THROWS_AS((void)r.score_of("ghost"), Error);
}

TEST_CASE("volume rank sums inbound value") {
  GraphBuilder builder;
  builder.window(1000, 4000);
  builder.add("a", "x", 10.5, 1000);
  builder.add("a", "x", 20.25, 2000);
  builder.add("b", "y", 7.0, 4000);
  builder.add("c", "y", 100.0, 9999);  // outside window, dropped
  PaymentGraph graph = builder.finish();

  BaselineResult r = volume_rank(graph);
  CHECK(std::string(baseline_method_name(r.method)) == "volume");
  CHECK(r.score_of("x") == doctest::Approx(30.75).epsilon(1e-12));
  CHECK(r.score_of("y") == doctest::Approx(7.0).epsilon(1e-12));
  // the dropped record never registers its payer
  CHECK_THROWS_AS((void)r.score_of("c"), Error);
}

TEST_CASE("two-node pagerank matches the closed form") {
  auto addrs = std::make_shared<AddressTable>(AddressTable::from_names({"a", "b"}));
  FlowMatrix flows = FlowMatrix::from_entries(addrs, {{"a", "b", 4.0}});
  PageRankConfig cfg;
  cfg.tol = 1e-14;
  cfg.max_iter = 2000;
  BaselineResult r = pagerank_unseeded(flows, cfg);
  REQUIRE(r.converged);

  // r_a = (1-d)/2 + d r_b / 2 (b is dangling), r_b = that same base + d r_a.
  const double d = 0.85;
  double expect_b = (0.075 + d * 0.075) / (1.0 - d / 2.0 - d * d / 2.0);
  double expect_a = 0.075 + d * expect_b / 2.0;
  CHECK(r.score_of("a") == doctest::Approx(expect_a).epsilon(1e-10));
  CHECK(r.score_of("b") == doctest::Approx(expect_b).epsilon(1e-10));
  CHECK(sum_of(r.scores) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pagerank matches an independent long double oracle") {
  TestRng rng(314);
  for (int trial = 0; trial < 25; ++trial) {
    PaymentGraph graph = trtest::random_graph(rng, {});
    FlowMatrix flows = FlowMatrix::aggregate(graph, 0.01, std::nullopt);
    PageRankConfig cfg;
    cfg.tol = 1e-13;
    cfg.max_iter = 20000;
    cfg.weighted = trial % 2 == 0;
    BaselineResult r = pagerank_unseeded(flows, cfg);
    REQUIRE(r.converged);
    CHECK(sum_of(r.scores) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> expected = reference_pagerank(flows, cfg.damping, cfg.weighted);
    double dist = 0.0;
    for (size_t i = 0; i < expected.size(); ++i) dist += std::fabs(r.scores[i] - expected[i]);
    CHECK(dist <= 1e-10);
  }
}

TEST_CASE("weighted mode follows the money while unweighted splits evenly") {
  GraphBuilder builder;
  builder.add("p", "x", 900.0, 1000);
  builder.add("p", "x", 90.0, 2000);
  builder.add("p", "y", 1.0, 3000);
  PaymentGraph graph = builder.finish();
  FlowMatrix flows = FlowMatrix::aggregate(graph, 0.0, std::nullopt);

  PageRankConfig cfg;
  cfg.tol = 1e-13;
  cfg.max_iter = 2000;
  BaselineResult weighted = pagerank_unseeded(flows, cfg);
  cfg.weighted = false;
  BaselineResult unweighted = pagerank_unseeded(flows, cfg);

  // teleport and dangling redistribution dilute the link term, so the money
  // advantage shows up as a clear but not extreme ratio (about 1.7 here)
  CHECK(weighted.score_of("x") > 1.5 * weighted.score_of("y"));
  CHECK(unweighted.score_of("x") == doctest::Approx(unweighted.score_of("y")).epsilon(1e-10));
}

TEST_CASE("pagerank is independent of payment input order") {
  std::vector<std::tuple<std::string, std::string, double, int64_t>> records = {
      {"a", "b", 3.5, 1000}, {"b", "c", 1.25, 2000}, {"c", "a", 9.0, 3000},
      {"a", "c", 0.5, 4000}, {"d", "a", 2.0, 5000},
  };
  auto build = [&](std::span<const size_t> order) {
    GraphBuilder builder;
    for (size_t idx : order) {
      const auto& [payer, payee, value, ts] = records[idx];
      builder.add(payer, payee, value, ts);
    }
    return builder.finish();
  };
  std::vector<size_t> fwd{0, 1, 2, 3, 4}, rev{4, 3, 2, 1, 0};
  FlowMatrix f1 = FlowMatrix::aggregate(build(fwd), 0.01, std::nullopt);
  FlowMatrix f2 = FlowMatrix::aggregate(build(rev), 0.01, std::nullopt);

  BaselineResult c1 = count_rank(build(fwd)), c2 = count_rank(build(rev));
  BaselineResult v1 = volume_rank(build(fwd)), v2 = volume_rank(build(rev));
  BaselineResult p1 = pagerank_unseeded(f1, {}), p2 = pagerank_unseeded(f2, {});
  CHECK(c1.scores == c2.scores);  // bitwise
  CHECK(v1.scores == v2.scores);
  CHECK(p1.scores == p2.scores);
}

TEST_CASE("pagerank configuration is validated") {
  auto addrs = std::make_shared<AddressTable>(AddressTable::from_names({"a", "b"}));
  FlowMatrix flows = FlowMatrix::from_entries(addrs, {{"a", "b", 1.0}});
  for (double damping : {0.0, 1.0, 1.2}) {
    PageRankConfig cfg;
    cfg.damping = damping;
    CHECK_THROWS_AS(pagerank_unseeded(flows, cfg), Error);
  }
  PageRankConfig bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(pagerank_unseeded(flows, bad), Error);
  bad = {};
  bad.max_iter = 0;
  CHECK_THROWS_AS(pagerank_unseeded(flows, bad), Error);

  auto empty = std::make_shared<AddressTable>(AddressTable::from_names({}));
  FlowMatrix none = FlowMatrix::from_entries(empty, {});
  CHECK_THROWS_AS(pagerank_unseeded(none, {}), Error);
}

TEST_CASE("pagerank reports non-convergence but still returns a distribution") {
  // asymmetric on purpose: the uniform start vector of a plain cycle is
  // already the fixed point, which would converge in one step
  auto addrs = std::make_shared<AddressTable>(AddressTable::from_names({"x", "y", "z"}));
  FlowMatrix flows = FlowMatrix::from_entries(addrs, {{"x", "y", 1.0}, {"y", "z", 1.0}});
  PageRankConfig cfg;
  cfg.max_iter = 1;
  cfg.tol = 1e-15;
  BaselineResult r = pagerank_unseeded(flows, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations_used == 1);
  CHECK(sum_of(r.scores) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("each baseline prefers the service its metric favors") {
  // 30 tiny spam payments against 3 large legitimate ones, one shared window.
  GraphBuilder builder;
  for (int i = 0; i < 30; ++i)
    builder.add(trtest::node_name(i), "spamsvc", 1.0, trtest::kTestBaseTime);
  for (int i = 100; i < 103; ++i)
    builder.add(trtest::node_name(i), "legitsvc", 100.0, trtest::kTestBaseTime);
  PaymentGraph graph = builder.finish();
  FlowMatrix flows = FlowMatrix::aggregate(graph, 0.01, std::nullopt);

  BaselineResult count = count_rank(graph);
  CHECK(count.score_of("spamsvc") == 30.0);
  CHECK(count.score_of("legitsvc") == 3.0);
  CHECK(count.score_of("spamsvc") > count.score_of("legitsvc"));

  BaselineResult volume = volume_rank(graph);
  CHECK(volume.score_of("spamsvc") == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(volume.score_of("legitsvc") == doctest::Approx(300.0).epsilon(1e-12));
  CHECK(volume.score_of("legitsvc") > volume.score_of("spamsvc"));

  // Unseeded PageRank rewards in-degree: thirty 1/30 teleport shares beat
  // three, so the spam service outranks the legitimate one.
  BaselineResult pr = pagerank_unseeded(flows, {});
  REQUIRE(pr.converged);
  CHECK(pr.score_of("spamsvc") > pr.score_of("legitsvc"));
}
