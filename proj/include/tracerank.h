/* TraceRank public C API.
 *
 * Seeded, value- and time-weighted reputation over payment graphs, plus the
 * baselines, retrieval fusion, scenario generator and file pipeline behind
 * the `tracerank` CLI.
 *
 * Conventions:
 *   - Every fallible function returns tr_status; TR_OK is 0.
 *   - On failure, tr_last_error() returns a thread-local message describing
 *     the most recent failing call on this thread.
 *   - Out-parameters are written only on TR_OK unless documented otherwise.
 *   - Strings returned through char** are heap-allocated; release them with
 *     tr_string_free. Handles are released with their matching *_free, all
 *     of which accept NULL.
 *   - Addresses are case-insensitive; they are normalized to lowercase.
 */
#ifndef TRACERANK_H
#define TRACERANK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TR_API __declspec(dllexport)
#else
#define TR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tr_status {
  TR_OK = 0,
  TR_ERR_INVALID_ARGUMENT = 1,
  TR_ERR_PARSE = 2,
  TR_ERR_IO = 3,
  TR_ERR_NOT_CONVERGED = 4,
  TR_ERR_UNKNOWN_ADDRESS = 5,
  TR_ERR_DIMENSION_MISMATCH = 6,
  TR_ERR_TOO_LARGE = 7,
  TR_ERR_EMPTY_INDEX = 8,
  TR_ERR_INTERNAL = 9
} tr_status;

TR_API const char* tr_version(void);
TR_API const char* tr_last_error(void);
TR_API void tr_string_free(char* s);

/* Unix seconds or RFC 3339 (e.g. 2025-01-01T00:00:00Z) to Unix seconds. */
TR_API tr_status tr_parse_timestamp(const char* text, int64_t* out);

/* ------------------------------------------------------------------ graph */

typedef struct tr_graph_builder tr_graph_builder;
typedef struct tr_graph tr_graph;
typedef struct tr_seeds tr_seeds;

TR_API tr_graph_builder* tr_graph_builder_new(void);
TR_API void tr_graph_builder_free(tr_graph_builder* b);

/* Pass has_start/has_end = 0 to leave that side of the window open. */
TR_API tr_status tr_graph_builder_window(tr_graph_builder* b, int64_t start, int has_start,
                                         int64_t end, int has_end);
TR_API tr_status tr_graph_builder_add(tr_graph_builder* b, const char* payer, const char* payee,
                                      double value_usd, int64_t timestamp);
/* Consumes the builder's contents; the builder itself still needs freeing. */
TR_API tr_status tr_graph_builder_finish(tr_graph_builder* b, tr_graph** out);

/* Payments file (CSV with header, or JSON lines); format is sniffed. */
TR_API tr_status tr_graph_load_payments(const char* path, tr_graph** out);
TR_API void tr_graph_free(tr_graph* g);
TR_API uint32_t tr_graph_node_count(const tr_graph* g);
TR_API uint64_t tr_graph_edge_count(const tr_graph* g);
TR_API tr_status tr_graph_summary_json(const tr_graph* g, char** out_json);

TR_API tr_seeds* tr_seeds_new(void);
TR_API void tr_seeds_free(tr_seeds* s);
TR_API tr_status tr_seeds_set(tr_seeds* s, const char* address, double value);
TR_API tr_status tr_seeds_load(const char* path, tr_seeds** out);

/* ------------------------------------------------------- flows and matrix */

typedef struct tr_flows tr_flows;
typedef struct tr_matrix tr_matrix;

/* Aggregated pairwise flow, log-scaled by value and exponentially decayed by
 * age. as_of defaults to the newest payment when has_as_of = 0. */
TR_API tr_status tr_flows_aggregate(const tr_graph* g, double lambda_per_day, int64_t as_of,
                                    int has_as_of, int clamp_future, tr_flows** out);
TR_API void tr_flows_free(tr_flows* f);
/* Aggregated flow for one payer/payee pair; 0 when absent. Address arguments
 * here and in every other lookup are normalized like ingested ones. */
TR_API tr_status tr_flows_get(const tr_flows* f, const char* payer, const char* payee,
                              double* out);

/* Column-stochastic normalization; zero-inbound columns stay zero (sinks). */
TR_API tr_status tr_matrix_normalize(const tr_flows* f, tr_matrix** out);
TR_API void tr_matrix_free(tr_matrix* m);
TR_API uint32_t tr_matrix_size(const tr_matrix* m);
TR_API tr_status tr_matrix_column_sum(const tr_matrix* m, const char* payee, double* out);
TR_API tr_status tr_matrix_weight(const tr_matrix* m, const char* payer, const char* payee,
                                  double* out);

/* ----------------------------------------------------------------- solver */

typedef struct tr_scores tr_scores;

/* Fixed point of r = s + alpha W^T r by power iteration. A run that hits
 * max_iter returns TR_OK with the best iterate; check tr_scores_converged. */
TR_API tr_status tr_tracerank_power(const tr_matrix* m, const tr_seeds* s, double alpha,
                                    double tol, int max_iter, tr_scores** out);
/* Dense direct solve of (I - alpha W^T) r = s; oracle for small systems. */
TR_API tr_status tr_tracerank_direct(const tr_matrix* m, const tr_seeds* s, double alpha,
                                     tr_scores** out);
TR_API void tr_scores_free(tr_scores* r);
TR_API uint32_t tr_scores_size(const tr_scores* r);
TR_API int tr_scores_converged(const tr_scores* r);
TR_API int tr_scores_iterations(const tr_scores* r);
TR_API tr_status tr_scores_get(const tr_scores* r, const char* address, double* out);
/* Address at a dense index in canonical (sorted) order; borrowed pointer,
 * valid while the handle lives. */
TR_API const char* tr_scores_address(const tr_scores* r, uint32_t index);
TR_API tr_status tr_scores_at(const tr_scores* r, uint32_t index, double* out);

/* Reachability-based Sybil explanation for one service, as JSON. */
TR_API tr_status tr_sybil_check(const tr_matrix* m, const tr_seeds* s, const char* service,
                                double alpha, double tol, int max_iter, char** out_json);

/* -------------------------------------------------------------- retrieval */

typedef struct tr_index tr_index;

/* Deterministic hashed bag-of-words embedding, L2-normalized. out must hold
 * dim doubles. */
TR_API tr_status tr_embed_text(const char* text, unsigned dim, double* out);
TR_API tr_status tr_cosine(const double* a, const double* b, size_t n, double* out);

TR_API tr_status tr_index_load(const char* profiles_jsonl_path, unsigned dim, tr_index** out);
TR_API void tr_index_free(tr_index* ix);
TR_API size_t tr_index_size(const tr_index* ix);

/* Fusion query: cosine similarity times (TraceRank + epsilon), top k, as a
 * JSON array. chain NULL matches any chain; tags is a conjunctive filter. */
TR_API tr_status tr_index_query(const tr_index* ix, const char* text, unsigned k,
                                const tr_scores* reputation, const char* chain,
                                const char* const* tags, size_t n_tags, double epsilon,
                                int force, char** out_json);

/* --------------------------------------------------------------- pipeline */

/* File-backed commands. Paths are created as needed; summaries/rankings come
 * back as JSON text. Non-convergence is reported through out_converged after
 * artifacts are persisted (it is not an error status). */

TR_API tr_status tr_cmd_ingest(const char* payments_path, const char* seeds_path_or_null,
                               const char* out_dir, int64_t window_start, int has_start,
                               int64_t window_end, int has_end, char** out_summary_json);

typedef struct tr_compute_opts {
  double alpha;          /* (0,1), default 0.85 */
  double lambda_per_day; /* >= 0, default 0.01 */
  int64_t as_of;
  int has_as_of;    /* 0: newest payment */
  int clamp_future; /* clamp negative ages to 0 instead of failing */
  double tol;       /* default 1e-9 */
  int max_iter;     /* default 200 */
} tr_compute_opts;
TR_API void tr_compute_opts_default(tr_compute_opts* opts);

TR_API tr_status tr_cmd_compute(const char* in_dir, const char* out_dir,
                                const tr_compute_opts* opts, int* out_converged,
                                char** out_solver_json);

/* method: "tracerank" | "count" | "volume" | "pagerank". damping/tol/max_iter
 * configure the pagerank method only. */
TR_API tr_status tr_cmd_rank(const char* in_dir, const char* method, int top_n, int unweighted,
                             double damping, double tol, int max_iter, int* out_converged,
                             char** out_json);

TR_API tr_status tr_cmd_query(const char* in_dir, const char* text, unsigned k,
                              const char* chain, const char* const* tags, size_t n_tags,
                              double epsilon, int force, unsigned dim, char** out_json);

/* as_json = 0 renders the fixed-width table. */
TR_API tr_status tr_cmd_compare(const char* in_dir, int unweighted, double damping, double tol,
                                int max_iter, int as_json, int* out_converged, char** out_text);

typedef struct tr_scenario_params {
  int n_spam_payers;           /* default 10000 */
  double spam_value;           /* default 1.0 */
  int spam_payments_per_wallet; /* default 1 */
  double spam_seed;            /* default 0.0 */
  int n_legit_payers;          /* default 50 */
  double legit_total;          /* default 5000.0 */
  double legit_seed;           /* default 0.9 */
  double legit_value_spread;   /* [0,1), default 0.0 */
  uint64_t rng_seed;           /* default 42 */
  int64_t base_time;           /* default 1735689600 (2025-01-01T00:00:00Z) */
} tr_scenario_params;
TR_API void tr_scenario_params_default(tr_scenario_params* params);

TR_API tr_status tr_cmd_scenario(const tr_scenario_params* params, const char* out_dir,
                                 double alpha, double lambda_per_day, double tol, int max_iter,
                                 char** out_verdict_json);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* TRACERANK_H */
