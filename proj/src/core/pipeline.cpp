#include "core/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>

#include "core/baselines.hpp"
#include "core/errors.hpp"
#include "core/manifest.hpp"
#include "core/numeric.hpp"
#include "core/serialize.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace tracerank {
namespace {

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

std::string basename_of(const std::string& path) {
  return fs::path(path).filename().string();
}

void require_file(const std::string& path, const char* hint) {
  if (!fs::exists(path)) fail(ErrorCode::Io, path + " not found (" + hint + ")");
}

PaymentGraph load_graph_artifact(const std::string& in_dir) {
  std::string path = join(in_dir, "graph.csv");
  require_file(path, "run ingest first");
  IngestOptions opts;
  opts.format = PaymentsFormat::Csv;
  return ingest_payments_file(path, opts);
}

bool solver_converged_flag(const std::string& in_dir) {
  std::string path = join(in_dir, "solver.json");
  require_file(path, "run compute first");
  auto j = nlohmann::json::parse(read_text_file(path));
  return j.value("converged", false);
}

ordered_json opt_ts(const std::optional<int64_t>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

}  // namespace

IngestRun cmd_ingest(const std::string& payments_path, const std::string& seeds_path,
                     const std::string& out_dir, const IngestOptions& opts) {
  PaymentGraph graph = ingest_payments_file(payments_path, opts);
  IngestRun run;
  SeedVector seeds;
  if (seeds_path.empty()) {
    run.warnings.push_back("no seeds file given; every address gets seed 0");
  } else {
    seeds = ingest_seeds_file(seeds_path);
  }

  ensure_dir(out_dir);
  std::string graph_out = join(out_dir, "graph.csv");
  std::string seeds_out = join(out_dir, "seeds.csv");
  std::string summary_out = join(out_dir, "summary.json");
  write_payments_csv(graph_out, graph);
  write_seeds_csv(seeds_out, seeds);

  ordered_json summary;
  summary["graph"] = ordered_json::parse(graph.summary_json());
  summary["seeds"] = {{"entries", seeds.entries().size()}, {"total", round12(seeds.total())}};
  summary["warnings"] = run.warnings;
  run.summary_json = summary.dump(2) + "\n";
  write_text_file(summary_out, run.summary_json);

  Manifest m;
  m.command = "ingest";
  m.parameters["payments"] = basename_of(payments_path);
  m.parameters["seeds"] =
      seeds_path.empty() ? ordered_json(nullptr) : ordered_json(basename_of(seeds_path));
  m.parameters["window_start"] = opt_ts(opts.window_start);
  m.parameters["window_end"] = opt_ts(opts.window_end);
  m.add_input(payments_path);
  if (!seeds_path.empty()) m.add_input(seeds_path);
  m.add_output(graph_out);
  m.add_output(seeds_out);
  m.add_output(summary_out);
  run.manifest_json = m.to_json();
  write_manifest(join(out_dir, "manifest_ingest.json"), m);
  return run;
}

ComputeRun cmd_compute(const std::string& in_dir, const std::string& out_dir,
                       const ComputeOptions& opts) {
  std::string graph_path = join(in_dir, "graph.csv");
  std::string seeds_path = join(in_dir, "seeds.csv");
  require_file(graph_path, "run ingest first");
  require_file(seeds_path, "run ingest first");
  IngestOptions io;
  io.format = PaymentsFormat::Csv;
  PaymentGraph graph = ingest_payments_file(graph_path, io);
  SeedVector seeds = ingest_seeds_file(seeds_path);

  FlowMatrix flows =
      FlowMatrix::aggregate(graph, opts.lambda_per_day, opts.as_of, opts.clamp_future);
  TransitionMatrix w = TransitionMatrix::normalize(flows);
  SolverConfig cfg;
  cfg.alpha = opts.alpha;
  cfg.tol = opts.tol;
  cfg.max_iter = opts.max_iter;
  SolveResult r = tracerank_power(w, seeds, cfg);

  ensure_dir(out_dir);
  std::string flows_out = join(out_dir, "flows.csv");
  std::string transition_out = join(out_dir, "transition.json");
  std::string scores_out = join(out_dir, "scores.csv");
  std::string scores_jsonl_out = join(out_dir, "scores.jsonl");
  std::string residuals_out = join(out_dir, "residuals.csv");
  std::string solver_out = join(out_dir, "solver.json");

  write_flows_csv(flows_out, flows);

  double max_col_err = 0.0;
  for (uint32_t i = 0; i < w.size(); ++i)
    if (!w.is_sink(i)) max_col_err = std::max(max_col_err, std::abs(w.column_sum(i) - 1.0));
  ordered_json tj;
  tj["addresses"] = w.size();
  tj["entries"] = w.entry_count();
  tj["sinks"] = w.sink_columns().size();
  tj["max_column_sum_error"] = round12(max_col_err);
  tj["lambda"] = round12(opts.lambda_per_day);
  tj["as_of"] = flows.as_of();
  write_text_file(transition_out, tj.dump(2) + "\n");

  write_scores_csv(scores_out, r);
  write_scores_jsonl(scores_jsonl_out, r);
  write_residuals_csv(residuals_out, r);

  KahanSum seed_sum, score_sum;
  for (double v : r.seeds) seed_sum.add(v);
  for (double v : r.scores) score_sum.add(v);
  ordered_json sj;
  sj["alpha"] = round12(opts.alpha);
  sj["lambda"] = round12(opts.lambda_per_day);
  sj["as_of"] = flows.as_of();
  sj["tol"] = round12(opts.tol);
  sj["max_iter"] = opts.max_iter;
  sj["clamp_future"] = opts.clamp_future;
  sj["addresses"] = r.addresses->size();
  sj["converged"] = r.converged;
  sj["iterations_used"] = r.iterations_used;
  sj["residual_l1"] = round12(r.residual_l1);
  sj["sum_seeds"] = round12(seed_sum.value());
  sj["sum_scores"] = round12(score_sum.value());

  ComputeRun run;
  run.solver_json = sj.dump(2) + "\n";
  write_text_file(solver_out, run.solver_json);

  Manifest m;
  m.command = "compute";
  m.parameters["alpha"] = round12(opts.alpha);
  m.parameters["lambda"] = round12(opts.lambda_per_day);
  m.parameters["as_of"] = flows.as_of();
  m.parameters["tol"] = round12(opts.tol);
  m.parameters["max_iter"] = opts.max_iter;
  m.parameters["clamp_future"] = opts.clamp_future;
  m.add_input(graph_path);
  m.add_input(seeds_path);
  for (const std::string& p :
       {flows_out, transition_out, scores_out, scores_jsonl_out, residuals_out, solver_out})
    m.add_output(p);
  run.manifest_json = m.to_json();
  write_manifest(join(out_dir, "manifest_compute.json"), m);

  run.converged = r.converged;
  run.iterations_used = r.iterations_used;
  run.residual_l1 = r.residual_l1;
  return run;
}

RankMethod parse_rank_method(std::string_view name) {
  if (name == "tracerank") return RankMethod::TraceRank;
  if (name == "count") return RankMethod::Count;
  if (name == "volume") return RankMethod::Volume;
  if (name == "pagerank") return RankMethod::PageRank;
  fail(ErrorCode::InvalidArgument,
       "unknown method '" + std::string(name) + "' (expected tracerank|count|volume|pagerank)");
}

RankRun cmd_rank(const std::string& in_dir, const RankOptions& opts) {
  if (opts.top_n < 1) fail(ErrorCode::InvalidArgument, "top_n must be >= 1");

  std::vector<std::string> addresses;
  std::vector<double> scores;
  bool converged = true;
  const char* method = "";
  switch (opts.method) {
    case RankMethod::TraceRank: {
      std::string path = join(in_dir, "scores.csv");
      require_file(path, "run compute first");
      ScoresArtifact art = read_scores_csv(path);
      addresses = std::move(art.addresses);
      scores = std::move(art.scores);
      converged = solver_converged_flag(in_dir);
      method = "tracerank";
      break;
    }
    case RankMethod::Count:
    case RankMethod::Volume: {
      PaymentGraph graph = load_graph_artifact(in_dir);
      BaselineResult b =
          opts.method == RankMethod::Count ? count_rank(graph) : volume_rank(graph);
      addresses.assign(b.addresses->names().begin(), b.addresses->names().end());
      scores = std::move(b.scores);
      method = opts.method == RankMethod::Count ? "count" : "volume";
      break;
    }
    case RankMethod::PageRank: {
      std::string path = join(in_dir, "flows.csv");
      require_file(path, "run compute first");
      FlowMatrix flows = read_flows_csv(path);
      PageRankConfig pc;
      pc.damping = opts.damping;
      pc.tol = opts.tol;
      pc.max_iter = opts.max_iter;
      pc.weighted = !opts.unweighted_pagerank;
      BaselineResult b = pagerank_unseeded(flows, pc);
      addresses.assign(b.addresses->names().begin(), b.addresses->names().end());
      scores = std::move(b.scores);
      converged = b.converged;
      method = "pagerank";
      break;
    }
  }

  auto order = ranked_order(addresses, scores);
  size_t shown = std::min(static_cast<size_t>(opts.top_n), order.size());
  ordered_json out;
  out["method"] = method;
  out["converged"] = converged;
  out["results"] = ordered_json::array();
  for (size_t pos = 0; pos < shown; ++pos) {
    uint32_t i = order[pos];
    out["results"].push_back(
        {{"rank", pos + 1}, {"address", addresses[i]}, {"score", round12(scores[i])}});
  }
  RankRun run;
  run.json = out.dump(2) + "\n";
  run.converged = converged;
  return run;
}

std::string cmd_query(const std::string& in_dir, const QueryArgs& args) {
  std::string profiles_path = join(in_dir, "profiles.jsonl");
  std::string scores_path = join(in_dir, "scores.csv");
  require_file(profiles_path, "a profiles.jsonl is required for query");
  require_file(scores_path, "run compute first");

  ProfileIndex index = ProfileIndex::load_jsonl_file(profiles_path, args.dim);
  ScoresArtifact art = read_scores_csv(scores_path);
  SolveResult rep;
  rep.addresses =
      std::make_shared<const AddressTable>(AddressTable::from_names(art.addresses));
  rep.scores = std::move(art.scores);
  rep.seeds = std::move(art.seeds);
  rep.converged = solver_converged_flag(in_dir);

  QueryOptions qo;
  qo.filters = args.filters;
  qo.epsilon = args.epsilon;
  qo.force = args.force;
  auto results = query_index(index, args.text, args.k, rep, qo);

  ordered_json out;
  out["query"] = args.text;
  out["k"] = args.k;
  out["results"] = ordered_json::parse(ranked_results_json(results));
  return out.dump(2) + "\n";
}

CompareRun cmd_compare(const std::string& in_dir, const RankOptions& pagerank_opts) {
  PaymentGraph graph = load_graph_artifact(in_dir);
  std::string scores_path = join(in_dir, "scores.csv");
  std::string flows_path = join(in_dir, "flows.csv");
  require_file(scores_path, "run compute first");
  require_file(flows_path, "run compute first");
  ScoresArtifact art = read_scores_csv(scores_path);
  FlowMatrix flows = read_flows_csv(flows_path);
  bool tr_converged = solver_converged_flag(in_dir);

  BaselineResult count = count_rank(graph);
  BaselineResult volume = volume_rank(graph);
  PageRankConfig pc;
  pc.damping = pagerank_opts.damping;
  pc.tol = pagerank_opts.tol;
  pc.max_iter = pagerank_opts.max_iter;
  pc.weighted = !pagerank_opts.unweighted_pagerank;
  // An edgeless graph has no nodes to rank; keep an empty all-zero baseline.
  BaselineResult pagerank{flows.addresses(), BaselineMethod::PageRank, {}};
  if (flows.addresses()->size() > 0) pagerank = pagerank_unseeded(flows, pc);

  // Services are the addresses somebody actually paid. On an edgeless graph
  // there are none, so fall back to the scored universe and rank by seeds.
  std::set<std::string> payees;
  for (const PaymentEdge& e : graph.edges()) payees.insert(graph.addresses()->name(e.payee));
  std::vector<std::string> services(payees.begin(), payees.end());
  if (services.empty()) services = art.addresses;

  auto lookup = [](const BaselineResult& b, const std::string& addr) {
    auto id = b.addresses->find(addr);
    return id ? b.scores[*id] : 0.0;
  };
  const size_t n = services.size();
  std::vector<double> tr_s(n), cnt_s(n), vol_s(n), pr_s(n);
  for (size_t i = 0; i < n; ++i) {
    tr_s[i] = art.score_of(services[i]);
    cnt_s[i] = lookup(count, services[i]);
    vol_s[i] = lookup(volume, services[i]);
    pr_s[i] = lookup(pagerank, services[i]);
  }
  auto ranks_of = [&](const std::vector<double>& s) {
    auto order = ranked_order(services, s);
    std::vector<size_t> rank(n);
    for (size_t pos = 0; pos < n; ++pos) rank[order[pos]] = pos + 1;
    return rank;
  };
  auto tr_rank = ranks_of(tr_s);
  auto cnt_rank = ranks_of(cnt_s);
  auto vol_rank = ranks_of(vol_s);
  auto pr_rank = ranks_of(pr_s);

  auto winner_of = [&](const std::vector<size_t>& rank) {
    for (size_t i = 0; i < n; ++i)
      if (rank[i] == 1) return services[i];
    return std::string();
  };
  std::string tr_win = winner_of(tr_rank);
  std::string cnt_win = winner_of(cnt_rank);
  std::string vol_win = winner_of(vol_rank);
  std::string pr_win = winner_of(pr_rank);

  CompareRun run;
  run.converged = tr_converged && pagerank.converged;
  run.inversion =
      n >= 2 && tr_win != cnt_win && tr_win != vol_win && tr_win != pr_win;

  std::vector<uint32_t> row_order = ranked_order(services, tr_s);
  size_t addr_w = 7;
  for (const std::string& s : services) addr_w = std::max(addr_w, s.size());

  std::string table;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %16s %4s  %16s %4s  %16s %4s  %16s %4s\n",
                static_cast<int>(addr_w), "address", "tracerank", "rk", "count", "rk", "volume",
                "rk", "pagerank", "rk");
  table += line;
  table += std::string(addr_w + 2 + 4 * 23 - 1, '-') + "\n";
  for (uint32_t i : row_order) {
    std::snprintf(line, sizeof line, "%-*s  %16s %4zu  %16s %4zu  %16s %4zu  %16s %4zu\n",
                  static_cast<int>(addr_w), services[i].c_str(), format_g12(tr_s[i]).c_str(),
                  tr_rank[i], format_g12(cnt_s[i]).c_str(), cnt_rank[i],
                  format_g12(vol_s[i]).c_str(), vol_rank[i], format_g12(pr_s[i]).c_str(),
                  pr_rank[i]);
    table += line;
  }
  table += "\nwinners: tracerank=" + tr_win + " count=" + cnt_win + " volume=" + vol_win +
           " pagerank=" + pr_win + "\n";
  table += std::string("inversion: ") +
           (run.inversion ? "yes (TraceRank's winner differs from every baseline's)" : "no") +
           "\n";
  run.table = table;

  ordered_json j;
  j["services"] = ordered_json::array();
  for (uint32_t i : row_order) {
    ordered_json row;
    row["address"] = services[i];
    row["tracerank"] = {{"score", round12(tr_s[i])}, {"rank", tr_rank[i]}};
    row["count"] = {{"score", round12(cnt_s[i])}, {"rank", cnt_rank[i]}};
    row["volume"] = {{"score", round12(vol_s[i])}, {"rank", vol_rank[i]}};
    row["pagerank"] = {{"score", round12(pr_s[i])}, {"rank", pr_rank[i]}};
    j["services"].push_back(std::move(row));
  }
  j["winners"] = {{"tracerank", tr_win}, {"count", cnt_win}, {"volume", vol_win},
                  {"pagerank", pr_win}};
  j["inversion"] = run.inversion;
  j["converged"] = run.converged;
  run.json = j.dump(2) + "\n";
  return run;
}

ScenarioRun cmd_scenario(const ScenarioParams& params, const std::string& out_dir,
                         const SolverConfig& solver_cfg, double lambda_per_day) {
  ensure_dir(out_dir);
  ScenarioData data = scenario_spam(params);
  ScenarioRun run;
  run.scenario_json = scenario_write(data, params, out_dir);
  ScenarioVerdict verdict = scenario_verdict(data, solver_cfg, lambda_per_day);
  run.verdict_json = verdict.to_json(data);
  write_text_file(join(out_dir, "verdict.json"), run.verdict_json);
  return run;
}

}  // namespace tracerank
