// tracerank: payment-graph reputation pipeline.
//
// Exit codes: 0 success, 2 input/parameter error, 3 numerical non-convergence
// (best iterate still persisted/printed).

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tracerank.h"

namespace {

std::string default_dir() {
  const char* env = std::getenv("TRACERANK_OUT");
  return (env && *env) ? env : "./tracerank_out";
}

int fail_with(tr_status st) {
  std::fprintf(stderr, "error: %s\n", tr_last_error());
  return st == TR_ERR_NOT_CONVERGED ? 3 : 2;
}

void emit(char* text) {
  if (!text) return;
  std::fputs(text, stdout);
  tr_string_free(text);
}

// "" means unset; otherwise Unix seconds or RFC 3339.
bool parse_ts_flag(const std::string& text, int64_t& out, int& has, int& exit_code) {
  has = 0;
  if (text.empty()) return true;
  tr_status st = tr_parse_timestamp(text.c_str(), &out);
  if (st != TR_OK) {
    exit_code = fail_with(st);
    return false;
  }
  has = 1;
  return true;
}

std::vector<const char*> c_ptrs(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  out.reserve(v.size());
  for (const std::string& s : v) out.push_back(s.c_str());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TraceRank: seeded, value- and time-weighted reputation for payment graphs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tr_version()));

  // ---- ingest ----
  std::string in_payments, in_seeds, ingest_out = default_dir();
  std::string win_start_text, win_end_text;
  auto* ingest = app.add_subcommand("ingest", "Validate and persist a payment graph and seeds");
  ingest->add_option("payments", in_payments, "Payments file (CSV or JSON lines)")->required();
  ingest->add_option("--seeds", in_seeds, "Seed scores CSV (default: all seeds 0)");
  ingest->add_option("--out", ingest_out, "Output directory (default: $TRACERANK_OUT)");
  ingest->add_option("--window-start", win_start_text, "Drop payments before this timestamp");
  ingest->add_option("--window-end", win_end_text, "Drop payments after this timestamp");

  // ---- compute ----
  std::string compute_in = default_dir(), compute_out = default_dir();
  double alpha = 0.85, lambda = 0.01, tol = 1e-9;
  int max_iter = 200;
  std::string as_of_text;
  bool clamp_future = false;
  auto* compute = app.add_subcommand("compute", "Aggregate flows, normalize, and solve TraceRank");
  compute->add_option("--in", compute_in, "Ingested artifact directory");
  compute->add_option("--out", compute_out, "Output directory");
  compute->add_option("--alpha", alpha, "Propagation strength in (0,1)")->capture_default_str();
  compute->add_option("--lambda", lambda, "Decay rate per day")->capture_default_str();
  compute->add_option("--as-of", as_of_text, "Age reference time (default: newest payment)");
  compute->add_option("--tol", tol, "L1 convergence threshold")->capture_default_str();
  compute->add_option("--max-iter", max_iter, "Iteration cap")->capture_default_str();
  compute->add_flag("--clamp-future", clamp_future, "Clamp ages of post-as-of payments to 0");

  // ---- rank ----
  std::string rank_in = default_dir(), method = "tracerank";
  int top_n = 10;
  bool unweighted = false;
  double pr_alpha = 0.85, pr_tol = 1e-9;
  int pr_max_iter = 200;
  auto* rank = app.add_subcommand("rank", "Top addresses under one scoring method");
  rank->add_option("--in", rank_in, "Artifact directory");
  rank->add_option("--method", method, "tracerank|count|volume|pagerank")->capture_default_str();
  rank->add_option("--top-n", top_n, "Rows to print")->capture_default_str();
  rank->add_flag("--unweighted", unweighted, "PageRank over plain adjacency instead of flows");
  rank->add_option("--alpha", pr_alpha, "PageRank damping")->capture_default_str();
  rank->add_option("--tol", pr_tol, "PageRank tolerance")->capture_default_str();
  rank->add_option("--max-iter", pr_max_iter, "PageRank iteration cap")->capture_default_str();

  // ---- query ----
  std::string query_in = default_dir(), query_text, chain;
  std::vector<std::string> tags;
  unsigned k = 10, dim = 256;
  double epsilon = 0.0;
  bool force = false;
  auto* query = app.add_subcommand("query", "Semantic search fused with TraceRank");
  query->add_option("text", query_text, "Query text")->required();
  query->add_option("--in", query_in, "Artifact directory (needs profiles.jsonl + scores)");
  query->add_option("-k,--top-k", k, "Results to return")->capture_default_str();
  query->add_option("--chain", chain, "Only profiles on this chain");
  query->add_option("--tag", tags, "Required tag (repeatable, all must match)");
  query->add_option("--epsilon", epsilon, "Reputation floor added before fusion")
      ->capture_default_str();
  query->add_flag("--force", force, "Rank even if reputation did not converge");
  query->add_option("--dim", dim, "Embedding dimension")->capture_default_str();

  // ---- compare ----
  std::string compare_in = default_dir(), format = "table";
  bool cmp_unweighted = false;
  double cmp_alpha = 0.85, cmp_tol = 1e-9;
  int cmp_max_iter = 200;
  auto* compare = app.add_subcommand("compare", "All four methods side by side per service");
  compare->add_option("--in", compare_in, "Artifact directory");
  compare->add_option("--format", format, "table|json")->capture_default_str();
  compare->add_flag("--unweighted", cmp_unweighted, "PageRank over plain adjacency");
  compare->add_option("--alpha", cmp_alpha, "PageRank damping")->capture_default_str();
  compare->add_option("--tol", cmp_tol, "PageRank tolerance")->capture_default_str();
  compare->add_option("--max-iter", cmp_max_iter, "PageRank iteration cap")
      ->capture_default_str();

  // ---- scenario ----
  std::string scen_out = default_dir();
  tr_scenario_params sp;
  tr_scenario_params_default(&sp);
  double scen_alpha = 0.85, scen_lambda = 0.01, scen_tol = 1e-9;
  int scen_max_iter = 200;
  auto* scenario =
      app.add_subcommand("scenario", "Generate the spam-service economy and its verdict");
  scenario->add_option("--out", scen_out, "Output directory");
  scenario->add_option("--n-spam", sp.n_spam_payers, "Spam wallets")->capture_default_str();
  scenario->add_option("--spam-value", sp.spam_value, "USD per spam payment")
      ->capture_default_str();
  scenario->add_option("--payments-per-wallet", sp.spam_payments_per_wallet,
                       "Payments each spam wallet sends")
      ->capture_default_str();
  scenario->add_option("--spam-seed", sp.spam_seed, "Seed score of spam wallets")
      ->capture_default_str();
  scenario->add_option("--n-legit", sp.n_legit_payers, "Legit payers")->capture_default_str();
  scenario->add_option("--legit-total", sp.legit_total, "Total USD paid to the legit service")
      ->capture_default_str();
  scenario->add_option("--legit-seed", sp.legit_seed, "Seed score of legit payers")
      ->capture_default_str();
  scenario->add_option("--legit-spread", sp.legit_value_spread,
                       "Relative payment-size variation in [0,1)")
      ->capture_default_str();
  scenario->add_option("--seed", sp.rng_seed, "RNG seed")->capture_default_str();
  scenario->add_option("--base-time", sp.base_time, "Newest payment timestamp (Unix seconds)")
      ->capture_default_str();
  scenario->add_option("--alpha", scen_alpha, "Verdict propagation strength")
      ->capture_default_str();
  scenario->add_option("--lambda", scen_lambda, "Verdict decay rate per day")
      ->capture_default_str();
  scenario->add_option("--tol", scen_tol, "Verdict solver tolerance")->capture_default_str();
  scenario->add_option("--max-iter", scen_max_iter, "Verdict iteration cap")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  int exit_code = 0;
  if (*ingest) {
    int64_t ws = 0, we = 0;
    int has_ws = 0, has_we = 0;
    if (!parse_ts_flag(win_start_text, ws, has_ws, exit_code)) return exit_code;
    if (!parse_ts_flag(win_end_text, we, has_we, exit_code)) return exit_code;
    if (in_seeds.empty())
      std::fprintf(stderr, "warning: no seeds file given; every address gets seed 0\n");
    char* summary = nullptr;
    tr_status st = tr_cmd_ingest(in_payments.c_str(), in_seeds.empty() ? nullptr : in_seeds.c_str(),
                                 ingest_out.c_str(), ws, has_ws, we, has_we, &summary);
    if (st != TR_OK) return fail_with(st);
    emit(summary);
  } else if (*compute) {
    tr_compute_opts opts;
    tr_compute_opts_default(&opts);
    opts.alpha = alpha;
    opts.lambda_per_day = lambda;
    if (!parse_ts_flag(as_of_text, opts.as_of, opts.has_as_of, exit_code)) return exit_code;
    opts.clamp_future = clamp_future ? 1 : 0;
    opts.tol = tol;
    opts.max_iter = max_iter;
    int converged = 0;
    char* solver = nullptr;
    tr_status st = tr_cmd_compute(compute_in.c_str(), compute_out.c_str(), &opts, &converged,
                                  &solver);
    if (st != TR_OK) return fail_with(st);
    emit(solver);
    if (!converged) {
      std::fprintf(stderr, "error: solver did not converge; best iterate persisted\n");
      return 3;
    }
  } else if (*rank) {
    int converged = 0;
    char* json = nullptr;
    tr_status st = tr_cmd_rank(rank_in.c_str(), method.c_str(), top_n, unweighted ? 1 : 0,
                               pr_alpha, pr_tol, pr_max_iter, &converged, &json);
    if (st != TR_OK) return fail_with(st);
    emit(json);
    if (!converged) {
      std::fprintf(stderr, "error: scores did not converge\n");
      return 3;
    }
  } else if (*query) {
    auto tag_ptrs = c_ptrs(tags);
    char* json = nullptr;
    tr_status st = tr_cmd_query(query_in.c_str(), query_text.c_str(), k,
                                chain.empty() ? nullptr : chain.c_str(), tag_ptrs.data(),
                                tag_ptrs.size(), epsilon, force ? 1 : 0, dim, &json);
    if (st != TR_OK) return fail_with(st);
    emit(json);
  } else if (*compare) {
    if (format != "table" && format != "json") {
      std::fprintf(stderr, "error: --format must be table or json\n");
      return 2;
    }
    int converged = 0;
    char* text = nullptr;
    tr_status st = tr_cmd_compare(compare_in.c_str(), cmp_unweighted ? 1 : 0, cmp_alpha, cmp_tol,
                                  cmp_max_iter, format == "json" ? 1 : 0, &converged, &text);
    if (st != TR_OK) return fail_with(st);
    emit(text);
    if (!converged) {
      std::fprintf(stderr, "error: scores did not converge\n");
      return 3;
    }
  } else if (*scenario) {
    char* verdict = nullptr;
    tr_status st = tr_cmd_scenario(&sp, scen_out.c_str(), scen_alpha, scen_lambda, scen_tol,
                                   scen_max_iter, &verdict);
    if (st != TR_OK) return fail_with(st);
    emit(verdict);
  }
  return exit_code;
}
