#include "tracerank.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <utility>

#include "core/baselines.hpp"
#include "core/embedding.hpp"
#include "core/errors.hpp"
#include "core/flow.hpp"
#include "core/graph.hpp"
#include "core/ingest.hpp"
#include "core/pipeline.hpp"
#include "core/retrieval.hpp"
#include "core/scenario.hpp"
#include "core/solver.hpp"
#include "core/timestamps.hpp"
#include "core/version.hpp"

using namespace tracerank;

// Handle definitions behind the opaque typedefs.
struct tr_graph_builder {
  GraphBuilder builder;
};
struct tr_graph {
  PaymentGraph graph;
};
struct tr_seeds {
  SeedVector seeds;
};
struct tr_flows {
  FlowMatrix flows;
};
struct tr_matrix {
  TransitionMatrix matrix;
};
struct tr_scores {
  SolveResult result;
};
struct tr_index {
  ProfileIndex index;
  explicit tr_index(ProfileIndex ix) : index(std::move(ix)) {}
};

namespace {

thread_local std::string g_last_error;

tr_status status_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return TR_ERR_INVALID_ARGUMENT;
    case ErrorCode::Parse: return TR_ERR_PARSE;
    case ErrorCode::Io: return TR_ERR_IO;
    case ErrorCode::NotConverged: return TR_ERR_NOT_CONVERGED;
    case ErrorCode::UnknownAddress: return TR_ERR_UNKNOWN_ADDRESS;
    case ErrorCode::DimensionMismatch: return TR_ERR_DIMENSION_MISMATCH;
    case ErrorCode::TooLarge: return TR_ERR_TOO_LARGE;
    case ErrorCode::EmptyIndex: return TR_ERR_EMPTY_INDEX;
  }
  return TR_ERR_INTERNAL;
}

template <typename F>
tr_status guarded(F&& f) {
  try {
    f();
    return TR_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return TR_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return TR_ERR_INTERNAL;
  }
}

tr_status null_arg(const char* what) {
  g_last_error = std::string("null argument: ") + what;
  return TR_ERR_INVALID_ARGUMENT;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<int64_t> opt_i64(int64_t v, int has) {
  return has ? std::optional<int64_t>(v) : std::nullopt;
}

}  // namespace

extern "C" {

const char* tr_version(void) { return kToolVersion; }

const char* tr_last_error(void) { return g_last_error.c_str(); }

void tr_string_free(char* s) { std::free(s); }

tr_status tr_parse_timestamp(const char* text, int64_t* out) {
  if (!text || !out) return null_arg("text/out");
  return guarded([&] {
    auto ts = parse_timestamp(text);
    if (!ts)
      fail(ErrorCode::Parse,
           std::string("bad timestamp '") + text + "' (want Unix seconds or RFC 3339)");
    *out = *ts;
  });
}

/* ------------------------------------------------------------------ graph */

tr_graph_builder* tr_graph_builder_new(void) { return new (std::nothrow) tr_graph_builder; }

void tr_graph_builder_free(tr_graph_builder* b) { delete b; }

tr_status tr_graph_builder_window(tr_graph_builder* b, int64_t start, int has_start, int64_t end,
                                  int has_end) {
  if (!b) return null_arg("builder");
  return guarded([&] { b->builder.window(opt_i64(start, has_start), opt_i64(end, has_end)); });
}

tr_status tr_graph_builder_add(tr_graph_builder* b, const char* payer, const char* payee,
                               double value_usd, int64_t timestamp) {
  if (!b) return null_arg("builder");
  if (!payer || !payee) return null_arg("payer/payee");
  return guarded([&] { b->builder.add(payer, payee, value_usd, timestamp); });
}

tr_status tr_graph_builder_finish(tr_graph_builder* b, tr_graph** out) {
  if (!b) return null_arg("builder");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new tr_graph{b->builder.finish()}; });
}

tr_status tr_graph_load_payments(const char* path, tr_graph** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new tr_graph{ingest_payments_file(path, IngestOptions{})}; });
}

void tr_graph_free(tr_graph* g) { delete g; }

uint32_t tr_graph_node_count(const tr_graph* g) { return g ? g->graph.node_count() : 0; }

uint64_t tr_graph_edge_count(const tr_graph* g) { return g ? g->graph.edge_count() : 0; }

tr_status tr_graph_summary_json(const tr_graph* g, char** out_json) {
  if (!g) return null_arg("graph");
  if (!out_json) return null_arg("out_json");
  return guarded([&] { *out_json = dup_string(g->graph.summary_json()); });
}

tr_seeds* tr_seeds_new(void) { return new (std::nothrow) tr_seeds; }

void tr_seeds_free(tr_seeds* s) { delete s; }

tr_status tr_seeds_set(tr_seeds* s, const char* address, double value) {
  if (!s) return null_arg("seeds");
  if (!address) return null_arg("address");
  return guarded([&] { s->seeds.set(address, value); });
}

tr_status tr_seeds_load(const char* path, tr_seeds** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new tr_seeds{ingest_seeds_file(path)}; });
}

/* ------------------------------------------------------- flows and matrix */

tr_status tr_flows_aggregate(const tr_graph* g, double lambda_per_day, int64_t as_of,
                             int has_as_of, int clamp_future, tr_flows** out) {
  if (!g) return null_arg("graph");
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new tr_flows{FlowMatrix::aggregate(g->graph, lambda_per_day,
                                              opt_i64(as_of, has_as_of), clamp_future != 0)};
  });
}

void tr_flows_free(tr_flows* f) { delete f; }

tr_status tr_flows_get(const tr_flows* f, const char* payer, const char* payee, double* out) {
  if (!f) return null_arg("flows");
  if (!payer || !payee || !out) return null_arg("payer/payee/out");
  return guarded([&] { *out = f->flows.flow(normalize_address(payer), normalize_address(payee)); });
}

tr_status tr_matrix_normalize(const tr_flows* f, tr_matrix** out) {
  if (!f) return null_arg("flows");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new tr_matrix{TransitionMatrix::normalize(f->flows)}; });
}

void tr_matrix_free(tr_matrix* m) { delete m; }

uint32_t tr_matrix_size(const tr_matrix* m) { return m ? m->matrix.size() : 0; }

tr_status tr_matrix_column_sum(const tr_matrix* m, const char* payee, double* out) {
  if (!m) return null_arg("matrix");
  if (!payee || !out) return null_arg("payee/out");
  return guarded([&] {
    auto id = m->matrix.addresses()->find(normalize_address(payee));
    if (!id) fail(ErrorCode::UnknownAddress, std::string("unknown address: ") + payee);
    *out = m->matrix.column_sum(*id);
  });
}

tr_status tr_matrix_weight(const tr_matrix* m, const char* payer, const char* payee,
                           double* out) {
  if (!m) return null_arg("matrix");
  if (!payer || !payee || !out) return null_arg("payer/payee/out");
  return guarded(
      [&] { *out = m->matrix.weight(normalize_address(payer), normalize_address(payee)); });
}

/* ----------------------------------------------------------------- solver */

tr_status tr_tracerank_power(const tr_matrix* m, const tr_seeds* s, double alpha, double tol,
                             int max_iter, tr_scores** out) {
  if (!m || !s) return null_arg("matrix/seeds");
  if (!out) return null_arg("out");
  return guarded([&] {
    SolverConfig cfg;
    cfg.alpha = alpha;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    *out = new tr_scores{tracerank_power(m->matrix, s->seeds, cfg)};
  });
}

tr_status tr_tracerank_direct(const tr_matrix* m, const tr_seeds* s, double alpha,
                              tr_scores** out) {
  if (!m || !s) return null_arg("matrix/seeds");
  if (!out) return null_arg("out");
  return guarded([&] { *out = new tr_scores{tracerank_direct(m->matrix, s->seeds, alpha)}; });
}

void tr_scores_free(tr_scores* r) { delete r; }

uint32_t tr_scores_size(const tr_scores* r) {
  return r ? static_cast<uint32_t>(r->result.scores.size()) : 0;
}

int tr_scores_converged(const tr_scores* r) { return r && r->result.converged ? 1 : 0; }

int tr_scores_iterations(const tr_scores* r) { return r ? r->result.iterations_used : 0; }

tr_status tr_scores_get(const tr_scores* r, const char* address, double* out) {
  if (!r) return null_arg("scores");
  if (!address || !out) return null_arg("address/out");
  return guarded([&] { *out = r->result.score_of(normalize_address(address)); });
}

const char* tr_scores_address(const tr_scores* r, uint32_t index) {
  if (!r || index >= r->result.addresses->size()) {
    g_last_error = "score index out of range";
    return nullptr;
  }
  return r->result.addresses->name(index).c_str();
}

tr_status tr_scores_at(const tr_scores* r, uint32_t index, double* out) {
  if (!r) return null_arg("scores");
  if (!out) return null_arg("out");
  if (index >= r->result.scores.size()) {
    g_last_error = "score index out of range";
    return TR_ERR_INVALID_ARGUMENT;
  }
  *out = r->result.scores[index];
  return TR_OK;
}

tr_status tr_sybil_check(const tr_matrix* m, const tr_seeds* s, const char* service,
                         double alpha, double tol, int max_iter, char** out_json) {
  if (!m || !s) return null_arg("matrix/seeds");
  if (!service || !out_json) return null_arg("service/out_json");
  return guarded([&] {
    SolverConfig cfg;
    cfg.alpha = alpha;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    SybilReport report = sybil_check(m->matrix, s->seeds, normalize_address(service), cfg);
    *out_json = dup_string(report.to_json());
  });
}

/* -------------------------------------------------------------- retrieval */

tr_status tr_embed_text(const char* text, unsigned dim, double* out) {
  if (!text || !out) return null_arg("text/out");
  return guarded([&] {
    std::vector<double> v = embed_text(text, dim);
    std::memcpy(out, v.data(), v.size() * sizeof(double));
  });
}

tr_status tr_cosine(const double* a, const double* b, size_t n, double* out) {
  if (!a || !b || !out) return null_arg("a/b/out");
  return guarded([&] {
    *out = cosine(std::span<const double>(a, n), std::span<const double>(b, n));
  });
}

tr_status tr_index_load(const char* profiles_jsonl_path, unsigned dim, tr_index** out) {
  if (!profiles_jsonl_path) return null_arg("profiles_jsonl_path");
  if (!out) return null_arg("out");
  return guarded(
      [&] { *out = new tr_index(ProfileIndex::load_jsonl_file(profiles_jsonl_path, dim)); });
}

void tr_index_free(tr_index* ix) { delete ix; }

size_t tr_index_size(const tr_index* ix) { return ix ? ix->index.size() : 0; }

tr_status tr_index_query(const tr_index* ix, const char* text, unsigned k,
                         const tr_scores* reputation, const char* chain, const char* const* tags,
                         size_t n_tags, double epsilon, int force, char** out_json) {
  if (!ix || !reputation) return null_arg("index/reputation");
  if (!text || !out_json) return null_arg("text/out_json");
  if (n_tags > 0 && !tags) return null_arg("tags");
  return guarded([&] {
    QueryOptions opts;
    if (chain) opts.filters.chain = chain;
    for (size_t i = 0; i < n_tags; ++i) {
      if (!tags[i]) fail(ErrorCode::InvalidArgument, "null tag");
      opts.filters.tags.emplace_back(tags[i]);
    }
    opts.epsilon = epsilon;
    opts.force = force != 0;
    auto results = query_index(ix->index, text, k, reputation->result, opts);
    *out_json = dup_string(ranked_results_json(results));
  });
}

/* --------------------------------------------------------------- pipeline */

tr_status tr_cmd_ingest(const char* payments_path, const char* seeds_path_or_null,
                        const char* out_dir, int64_t window_start, int has_start,
                        int64_t window_end, int has_end, char** out_summary_json) {
  if (!payments_path || !out_dir) return null_arg("payments_path/out_dir");
  return guarded([&] {
    IngestOptions opts;
    opts.window_start = opt_i64(window_start, has_start);
    opts.window_end = opt_i64(window_end, has_end);
    IngestRun run = cmd_ingest(payments_path, seeds_path_or_null ? seeds_path_or_null : "",
                               out_dir, opts);
    if (out_summary_json) *out_summary_json = dup_string(run.summary_json);
  });
}

void tr_compute_opts_default(tr_compute_opts* opts) {
  if (!opts) return;
  opts->alpha = 0.85;
  opts->lambda_per_day = kDefaultLambdaPerDay;
  opts->as_of = 0;
  opts->has_as_of = 0;
  opts->clamp_future = 0;
  opts->tol = 1e-9;
  opts->max_iter = 200;
}

tr_status tr_cmd_compute(const char* in_dir, const char* out_dir, const tr_compute_opts* opts,
                         int* out_converged, char** out_solver_json) {
  if (!in_dir || !out_dir) return null_arg("in_dir/out_dir");
  if (!opts) return null_arg("opts");
  return guarded([&] {
    ComputeOptions co;
    co.alpha = opts->alpha;
    co.lambda_per_day = opts->lambda_per_day;
    co.as_of = opt_i64(opts->as_of, opts->has_as_of);
    co.clamp_future = opts->clamp_future != 0;
    co.tol = opts->tol;
    co.max_iter = opts->max_iter;
    ComputeRun run = cmd_compute(in_dir, out_dir, co);
    if (out_converged) *out_converged = run.converged ? 1 : 0;
    if (out_solver_json) *out_solver_json = dup_string(run.solver_json);
  });
}

tr_status tr_cmd_rank(const char* in_dir, const char* method, int top_n, int unweighted,
                      double damping, double tol, int max_iter, int* out_converged,
                      char** out_json) {
  if (!in_dir || !method) return null_arg("in_dir/method");
  return guarded([&] {
    RankOptions opts;
    opts.method = parse_rank_method(method);
    opts.top_n = top_n;
    opts.unweighted_pagerank = unweighted != 0;
    opts.damping = damping;
    opts.tol = tol;
    opts.max_iter = max_iter;
    RankRun run = cmd_rank(in_dir, opts);
    if (out_converged) *out_converged = run.converged ? 1 : 0;
    if (out_json) *out_json = dup_string(run.json);
  });
}

tr_status tr_cmd_query(const char* in_dir, const char* text, unsigned k, const char* chain,
                       const char* const* tags, size_t n_tags, double epsilon, int force,
                       unsigned dim, char** out_json) {
  if (!in_dir || !text) return null_arg("in_dir/text");
  if (n_tags > 0 && !tags) return null_arg("tags");
  return guarded([&] {
    QueryArgs args;
    args.text = text;
    args.k = k;
    if (chain) args.filters.chain = chain;
    for (size_t i = 0; i < n_tags; ++i) {
      if (!tags[i]) fail(ErrorCode::InvalidArgument, "null tag");
      args.filters.tags.emplace_back(tags[i]);
    }
    args.epsilon = epsilon;
    args.force = force != 0;
    args.dim = dim;
    std::string json = cmd_query(in_dir, args);
    if (out_json) *out_json = dup_string(json);
  });
}

tr_status tr_cmd_compare(const char* in_dir, int unweighted, double damping, double tol,
                         int max_iter, int as_json, int* out_converged, char** out_text) {
  if (!in_dir) return null_arg("in_dir");
  return guarded([&] {
    RankOptions opts;
    opts.method = RankMethod::PageRank;
    opts.unweighted_pagerank = unweighted != 0;
    opts.damping = damping;
    opts.tol = tol;
    opts.max_iter = max_iter;
    CompareRun run = cmd_compare(in_dir, opts);
    if (out_converged) *out_converged = run.converged ? 1 : 0;
    if (out_text) *out_text = dup_string(as_json ? run.json : run.table);
  });
}

void tr_scenario_params_default(tr_scenario_params* params) {
  if (!params) return;
  ScenarioParams d;
  params->n_spam_payers = d.n_spam_payers;
  params->spam_value = d.spam_value;
  params->spam_payments_per_wallet = d.spam_payments_per_wallet;
  params->spam_seed = d.spam_seed;
  params->n_legit_payers = d.n_legit_payers;
  params->legit_total = d.legit_total;
  params->legit_seed = d.legit_seed;
  params->legit_value_spread = d.legit_value_spread;
  params->rng_seed = d.rng_seed;
  params->base_time = d.base_time;
}

tr_status tr_cmd_scenario(const tr_scenario_params* params, const char* out_dir, double alpha,
                          double lambda_per_day, double tol, int max_iter,
                          char** out_verdict_json) {
  if (!params || !out_dir) return null_arg("params/out_dir");
  return guarded([&] {
    ScenarioParams sp;
    sp.n_spam_payers = params->n_spam_payers;
    sp.spam_value = params->spam_value;
    sp.spam_payments_per_wallet = params->spam_payments_per_wallet;
    sp.spam_seed = params->spam_seed;
    sp.n_legit_payers = params->n_legit_payers;
    sp.legit_total = params->legit_total;
    sp.legit_seed = params->legit_seed;
    sp.legit_value_spread = params->legit_value_spread;
    sp.rng_seed = params->rng_seed;
    sp.base_time = params->base_time;
    SolverConfig cfg;
    cfg.alpha = alpha;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    ScenarioRun run = cmd_scenario(sp, out_dir, cfg, lambda_per_day);
    if (out_verdict_json) *out_verdict_json = dup_string(run.verdict_json);
  });
}

}  // extern "C"
