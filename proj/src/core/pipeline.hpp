#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/ingest.hpp"
#include "core/retrieval.hpp"
#include "core/scenario.hpp"
#include "core/solver.hpp"

namespace tracerank {

// Decay default: half-life ~69 days. Overridable everywhere lambda appears.
inline constexpr double kDefaultLambdaPerDay = 0.01;

// File-backed command pipeline. Each command reads and writes only its own
// directories; results meant for the terminal come back as strings. Errors
// surface as Error exceptions; numerical non-convergence is reported through
// `converged` flags after artifacts are persisted, so callers can both keep
// the best iterate and signal the failure.

struct IngestRun {
  std::string summary_json;
  std::string manifest_json;
  std::vector<std::string> warnings;
};

// Writes graph.csv, seeds.csv, summary.json, manifest_ingest.json under
// out_dir. An empty seeds_path defaults every seed to zero with a warning.
IngestRun cmd_ingest(const std::string& payments_path, const std::string& seeds_path,
                     const std::string& out_dir, const IngestOptions& opts = {});

struct ComputeOptions {
  double alpha = 0.85;
  double lambda_per_day = kDefaultLambdaPerDay;
  std::optional<int64_t> as_of;  // default: newest payment timestamp
  bool clamp_future = false;
  double tol = 1e-9;
  int max_iter = 200;
};

struct ComputeRun {
  bool converged = false;
  int iterations_used = 0;
  double residual_l1 = 0.0;
  std::string solver_json;
  std::string manifest_json;
};

// Reads graph.csv + seeds.csv from in_dir; writes flows.csv, transition.json,
// scores.csv, scores.jsonl, residuals.csv, solver.json, manifest_compute.json
// under out_dir. A non-converged solve still persists everything.
ComputeRun cmd_compute(const std::string& in_dir, const std::string& out_dir,
                       const ComputeOptions& opts = {});

enum class RankMethod { TraceRank, Count, Volume, PageRank };

// Accepts "tracerank", "count", "volume", "pagerank".
RankMethod parse_rank_method(std::string_view name);

struct RankOptions {
  RankMethod method = RankMethod::TraceRank;
  int top_n = 10;
  // PageRank settings, ignored by the other methods.
  bool unweighted_pagerank = false;
  double damping = 0.85;
  double tol = 1e-9;
  int max_iter = 200;
};

struct RankRun {
  std::string json;  // {"method", "converged", "results": [...]}
  bool converged = true;
};

// tracerank ranks the persisted scores; count/volume rank graph.csv;
// pagerank runs fresh over flows.csv.
RankRun cmd_rank(const std::string& in_dir, const RankOptions& opts);

struct QueryArgs {
  std::string text;
  unsigned k = 10;
  QueryFilters filters;
  double epsilon = 0.0;
  bool force = false;
  unsigned dim = 256;
};

// Fusion query over in_dir's profiles.jsonl and scores.csv.
std::string cmd_query(const std::string& in_dir, const QueryArgs& args);

struct CompareRun {
  std::string table;  // fixed-width text
  std::string json;
  bool inversion = false;  // TraceRank's winner differs from every baseline's
  bool converged = true;
};

// Side-by-side scores and ranks for every service (address with inbound
// payments; the whole universe when there are none) across all four methods.
CompareRun cmd_compare(const std::string& in_dir, const RankOptions& pagerank_opts = {});

struct ScenarioRun {
  std::string scenario_json;
  std::string verdict_json;
};

// Generates the scenario into out_dir (payments.csv, seeds.csv,
// profiles.jsonl, scenario.json) and writes verdict.json alongside.
ScenarioRun cmd_scenario(const ScenarioParams& params, const std::string& out_dir,
                         const SolverConfig& solver_cfg = {},
                         double lambda_per_day = kDefaultLambdaPerDay);

}  // namespace tracerank
