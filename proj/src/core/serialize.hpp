#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "core/flow.hpp"
#include "core/graph.hpp"
#include "core/retrieval.hpp"
#include "core/solver.hpp"

namespace tracerank {

// File-backed artifact formats shared by the pipeline commands and the
// scenario generator. Writers are deterministic: fixed headers, canonical row
// order, %.12g floats, LF line endings, so byte equality of artifacts is the
// determinism contract.

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

// payments.csv / graph.csv: payer,payee,value_usd,timestamp in canonical edge
// order. Readable back through the normal ingest path.
void write_payments_csv(const std::string& path, const PaymentGraph& graph);

// seeds.csv: address,seed sorted by address.
void write_seeds_csv(const std::string& path, const SeedVector& seeds);

// profiles.jsonl: one object per line; embeddings are derived, never stored.
void write_profiles_jsonl(const std::string& path, const std::vector<ServiceProfile>& profiles);

// flows.csv: payer,payee,flow sorted by (payee, payer).
void write_flows_csv(const std::string& path, const FlowMatrix& flows);
FlowMatrix read_flows_csv(const std::string& path);

// scores.csv: address,tracerank,seed sorted by address.
void write_scores_csv(const std::string& path, const SolveResult& result);

struct ScoresArtifact {
  std::vector<std::string> addresses;  // sorted
  std::vector<double> scores;
  std::vector<double> seeds;

  // 0 for addresses outside the computed universe.
  double score_of(std::string_view address) const;
};
ScoresArtifact read_scores_csv(const std::string& path);

// scores.jsonl: one object per line in rank order (score desc, address asc).
void write_scores_jsonl(const std::string& path, const SolveResult& result);

// residuals.csv: iteration,residual_l1,residual_linf with 1-based iterations.
void write_residuals_csv(const std::string& path, const SolveResult& result);

// Permutation of [0, n) ordering scores descending, ties by address ascending.
std::vector<uint32_t> ranked_order(std::span<const std::string> addresses,
                                   std::span<const double> scores);

}  // namespace tracerank
