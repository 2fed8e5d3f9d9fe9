#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/graph.hpp"
#include "core/retrieval.hpp"
#include "core/solver.hpp"

namespace tracerank {

// The spam-vs-legitimate economy used throughout the test harness: one
// service flooded by cheap one-off payments from fresh wallets, one paid by a
// small set of seeded payers. Defaults reproduce 10,000 x $1 against 50
// payments totaling $5,000.
struct ScenarioParams {
  int n_spam_payers = 10000;
  double spam_value = 1.0;
  int spam_payments_per_wallet = 1;
  double spam_seed = 0.0;
  int n_legit_payers = 50;
  double legit_total = 5000.0;
  double legit_seed = 0.9;
  double legit_value_spread = 0.0;  // 0 = uniform; in [0,1), scales per-payment variation
  uint64_t rng_seed = 42;
  int64_t base_time = 1735689600;  // 2025-01-01T00:00:00Z, keeps runs reproducible
};

struct ScenarioData {
  PaymentGraph graph;
  SeedVector seeds;
  std::vector<ServiceProfile> profiles;
  std::string service_spam;   // "Service A"
  std::string service_legit;  // "Service B"
};

// Deterministic: identical params (including rng_seed) produce bit-identical
// graphs, seeds and profiles. Spam payments land in a 3-day window, legit
// payments in a 30-day window, both ending at base_time.
ScenarioData scenario_spam(const ScenarioParams& params);

// Writes payments.csv, seeds.csv, profiles.jsonl and scenario.json into dir
// so generated economies flow through the normal ingest path.
std::string scenario_write(const ScenarioData& data, const ScenarioParams& params,
                           const std::string& dir);

struct ScenarioVerdict {
  double tracerank_spam = 0.0, tracerank_legit = 0.0;
  double count_spam = 0.0, count_legit = 0.0;
  double volume_spam = 0.0, volume_legit = 0.0;
  double pagerank_spam = 0.0, pagerank_legit = 0.0;
  bool tracerank_prefers_legit = false;
  bool baselines_prefer_spam = false;  // all three rank spam strictly first
  bool inversion_demonstrated = false;
  std::string to_json(const ScenarioData& data) const;
};

// Runs TraceRank and all three baselines on the generated economy and reports
// which service each method prefers. Reports only; asserts nothing.
ScenarioVerdict scenario_verdict(const ScenarioData& data, const SolverConfig& solver_cfg,
                                 double lambda_per_day);

}  // namespace tracerank
