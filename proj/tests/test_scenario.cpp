#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/scenario.hpp"
#include "core/solver.hpp"
#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"

using namespace tracerank;
using trtest::TempDir;

namespace {

ScenarioParams small_params() {
  ScenarioParams p;
  p.n_spam_payers = 40;
  p.n_legit_payers = 8;
  p.legit_total = 800.0;
  return p;
}

double inbound_volume(const PaymentGraph& graph, const std::string& payee) {
  uint32_t id = *graph.addresses()->find(payee);
  double total = 0.0;
  for (const PaymentEdge& e : graph.edges())
    if (e.payee == id) total += e.value_usd;
  return total;
}

size_t inbound_count(const PaymentGraph& graph, const std::string& payee) {
  uint32_t id = *graph.addresses()->find(payee);
  size_t count = 0;
  for (const PaymentEdge& e : graph.edges())
    if (e.payee == id) ++count;
  return count;
}

}  // namespace

TEST_CASE("default economy shape: 10000 one-dollar spams against 50 seeded payers") {
  ScenarioData data = scenario_spam({});
  CHECK(data.graph.edge_count() == 10050);
  CHECK(data.graph.node_count() == 10052);
  CHECK(inbound_count(data.graph, data.service_spam) == 10000);
  CHECK(inbound_count(data.graph, data.service_legit) == 50);
  CHECK(inbound_volume(data.graph, data.service_spam) == doctest::Approx(10000.0).epsilon(1e-9));
  CHECK(inbound_volume(data.graph, data.service_legit) == doctest::Approx(5000.0).epsilon(1e-9));
  CHECK(data.seeds.total() == doctest::Approx(45.0).epsilon(1e-9));

  // All payments precede base_time and stay within their windows.
  int64_t lo_spam = ScenarioParams{}.base_time - 3 * 86400;
  int64_t lo_legit = ScenarioParams{}.base_time - 30 * 86400;
  uint32_t spam_id = *data.graph.addresses()->find(data.service_spam);
  for (const PaymentEdge& e : data.graph.edges()) {
    CHECK(e.timestamp <= ScenarioParams{}.base_time);
    CHECK(e.timestamp >= (e.payee == spam_id ? lo_spam : lo_legit));
  }

  CHECK(data.profiles.size() == 2);
  std::set<std::string> profiled;
  for (const ServiceProfile& p : data.profiles) profiled.insert(p.address);
  CHECK(profiled.count(data.service_spam) == 1);
  CHECK(profiled.count(data.service_legit) == 1);
}

TEST_CASE("spam wallet count does not move the spam service score") {
  // Unseeded wallets contribute nothing regardless of how many there are: the
  // spam service's score is exactly zero for any N.
  double legit_score = -1.0;
  for (int n : {1, 10, 10000}) {
    ScenarioParams p;
    p.n_spam_payers = n;
    ScenarioData data = scenario_spam(p);
    TransitionMatrix w =
        TransitionMatrix::normalize(FlowMatrix::aggregate(data.graph, 0.01, std::nullopt));
    SolveResult r = tracerank_power(w, data.seeds, {});
    REQUIRE(r.converged);
    CHECK(r.score_of(data.service_spam) == 0.0);  // exact
    if (legit_score < 0.0)
      legit_score = r.score_of(data.service_legit);
    else
      CHECK(r.score_of(data.service_legit) == doctest::Approx(legit_score).epsilon(1e-12));
  }
  CHECK(legit_score == doctest::Approx(0.85 * 0.9).epsilon(1e-12));
}

TEST_CASE("generation is deterministic and rng_seed matters") {
  ScenarioParams p = small_params();
  ScenarioData a = scenario_spam(p);
  ScenarioData b = scenario_spam(p);
  REQUIRE(a.graph.edge_count() == b.graph.edge_count());
  for (size_t i = 0; i < a.graph.edge_count(); ++i) {
    CHECK(a.graph.edges()[i].value_usd == b.graph.edges()[i].value_usd);
    CHECK(a.graph.edges()[i].timestamp == b.graph.edges()[i].timestamp);
  }
  CHECK(std::equal(a.graph.addresses()->names().begin(), a.graph.addresses()->names().end(),
                   b.graph.addresses()->names().begin()));

  p.rng_seed = 43;
  ScenarioData c = scenario_spam(p);
  bool any_difference = a.graph.node_count() != c.graph.node_count();
  if (!any_difference)
    any_difference = !std::equal(a.graph.addresses()->names().begin(),
                                 a.graph.addresses()->names().end(),
                                 c.graph.addresses()->names().begin());
  CHECK(any_difference);
}

TEST_CASE("written artifacts are byte-identical across runs") {
  ScenarioParams p = small_params();
  ScenarioData data = scenario_spam(p);
  TempDir dir_a, dir_b;
  scenario_write(data, p, dir_a.path());
  scenario_write(data, p, dir_b.path());
  for (const char* name : {"payments.csv", "seeds.csv", "profiles.jsonl", "scenario.json"}) {
    std::string a = trtest::slurp(dir_a.file(name));
    CHECK(a == trtest::slurp(dir_b.file(name)));
    CHECK_FALSE(a.empty());
  }
  auto meta = nlohmann::json::parse(trtest::slurp(dir_a.file("scenario.json")));
  CHECK(meta.at("name") == "spam_service");
  CHECK(meta.at("parameters").at("n_spam_payers") == p.n_spam_payers);
  CHECK(meta.at("services").contains("spam"));
  CHECK(meta.at("graph").at("edges") == static_cast<int>(data.graph.edge_count()));
}

TEST_CASE("verdict shows the inversion on defaults") {
  ScenarioData data = scenario_spam({});
  ScenarioVerdict v = scenario_verdict(data, {}, 0.01);
  CHECK(v.tracerank_spam == 0.0);
  CHECK(v.tracerank_legit == doctest::Approx(0.765).epsilon(1e-12));
  CHECK(v.count_spam == 10000.0);
  CHECK(v.count_legit == 50.0);
  CHECK(v.volume_spam == doctest::Approx(10000.0).epsilon(1e-9));
  CHECK(v.volume_legit == doctest::Approx(5000.0).epsilon(1e-9));
  CHECK(v.pagerank_spam > v.pagerank_legit);
  CHECK(v.tracerank_prefers_legit);
  CHECK(v.baselines_prefer_spam);
  CHECK(v.inversion_demonstrated);

  auto j = nlohmann::json::parse(v.to_json(data));
  CHECK(j.at("tracerank").at("winner") == data.service_legit);
  CHECK(j.at("count").at("winner") == data.service_spam);
  CHECK(j.at("volume").at("winner") == data.service_spam);
  CHECK(j.at("pagerank").at("winner") == data.service_spam);
  CHECK(j.at("inversion_demonstrated") == true);
}

TEST_CASE("seeding the spammer or defunding the legit service kills the inversion") {
  SUBCASE("legit seed zero: tracerank ties at zero") {
    ScenarioParams p = small_params();
    p.legit_seed = 0.0;
    ScenarioData data = scenario_spam(p);
    ScenarioVerdict v = scenario_verdict(data, {}, 0.01);
    CHECK(v.tracerank_spam == 0.0);
    CHECK(v.tracerank_legit == 0.0);
    CHECK_FALSE(v.tracerank_prefers_legit);
    CHECK_FALSE(v.inversion_demonstrated);
    auto j = nlohmann::json::parse(v.to_json(data));
    CHECK(j.at("tracerank").at("winner") == "tie");
  }
  SUBCASE("fully seeded spam wallets outscore the legit service") {
    ScenarioParams p = small_params();
    p.spam_seed = 1.0;
    ScenarioData data = scenario_spam(p);
    ScenarioVerdict v = scenario_verdict(data, {}, 0.01);
    CHECK(v.tracerank_spam > v.tracerank_legit);
    CHECK_FALSE(v.inversion_demonstrated);
  }
}

TEST_CASE("value spread preserves the legit total and stays positive") {
  ScenarioParams p = small_params();
  p.legit_value_spread = 0.8;
  ScenarioData data = scenario_spam(p);
  CHECK(inbound_volume(data.graph, data.service_legit) ==
        doctest::Approx(p.legit_total).epsilon(1e-9));
  uint32_t legit_id = *data.graph.addresses()->find(data.service_legit);
  double lo = 1e300, hi = 0.0;
  for (const PaymentEdge& e : data.graph.edges()) {
    if (e.payee != legit_id) continue;
    CHECK(e.value_usd > 0.0);
    lo = std::min(lo, e.value_usd);
    hi = std::max(hi, e.value_usd);
  }
  CHECK(hi > lo);  // the spread actually varies the payments

  SUBCASE("out-of-range spread is rejected") {
    ScenarioParams bad = small_params();
    bad.legit_value_spread = 1.0;
    CHECK_THROWS_AS(scenario_spam(bad), Error);
    bad.legit_value_spread = -0.1;
    CHECK_THROWS_AS(scenario_spam(bad), Error);
  }
}

TEST_CASE("multiple payments per spam wallet multiply the flood") {
  ScenarioParams p = small_params();
  p.spam_payments_per_wallet = 3;
  ScenarioData data = scenario_spam(p);
  CHECK(inbound_count(data.graph, data.service_spam) ==
        static_cast<size_t>(p.n_spam_payers) * 3);
  ScenarioVerdict v = scenario_verdict(data, {}, 0.01);
  CHECK(v.tracerank_spam == 0.0);  // still exactly zero

  SUBCASE("zero payments per wallet is rejected") {
    ScenarioParams bad = small_params();
    bad.spam_payments_per_wallet = 0;
    CHECK_THROWS_AS(scenario_spam(bad), Error);
  }
}

TEST_CASE("degenerate economies still produce a verdict") {
  ScenarioParams p = small_params();
  p.n_spam_payers = 0;
  ScenarioData data = scenario_spam(p);
  CHECK(inbound_count(data.graph, data.service_legit) == static_cast<size_t>(p.n_legit_payers));
  ScenarioVerdict v = scenario_verdict(data, {}, 0.01);
  CHECK(v.tracerank_spam == 0.0);
  CHECK(v.tracerank_legit > 0.0);
  CHECK(v.count_spam == 0.0);
  CHECK_FALSE(v.baselines_prefer_spam);

  SUBCASE("negative counts are rejected") {
    ScenarioParams bad = small_params();
    bad.n_spam_payers = -1;
    CHECK_THROWS_AS(scenario_spam(bad), Error);
    bad = small_params();
    bad.n_legit_payers = -2;
    CHECK_THROWS_AS(scenario_spam(bad), Error);
  }
}

TEST_CASE("scenario profiles describe the two services distinctly") {
  ScenarioData data = scenario_spam(small_params());
  const ServiceProfile* spam = nullptr;
  const ServiceProfile* legit = nullptr;
  for (const ServiceProfile& p : data.profiles) {
    if (p.address == data.service_spam) spam = &p;
    if (p.address == data.service_legit) legit = &p;
  }
  REQUIRE(spam != nullptr);
  REQUIRE(legit != nullptr);
  CHECK_FALSE(spam->description.empty());
  CHECK_FALSE(legit->description.empty());
  CHECK(spam->description != legit->description);
  CHECK_FALSE(spam->tags.empty());
  CHECK_FALSE(legit->tags.empty());
}
