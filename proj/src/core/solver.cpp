#include "core/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "json.hpp"

namespace tracerank {
namespace {

void check_config(double alpha, double tol, int max_iter) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "alpha must lie in (0,1), got " + format_g12(alpha));
  if (!(tol > 0.0) || !std::isfinite(tol))
    fail(ErrorCode::InvalidArgument, "tol must be positive");
  if (max_iter < 1) fail(ErrorCode::InvalidArgument, "max_iter must be >= 1");
}

// Aligns the solve universe: matrix addresses plus seed-only extras.
struct Universe {
  AddressTablePtr addrs;
  std::vector<double> seeds;          // over addrs
  std::vector<uint32_t> matrix_to_u;  // matrix id -> universe id
};

Universe build_universe(const TransitionMatrix& w, const SeedVector& seeds) {
  std::vector<std::string> extra;
  for (const auto& [name, value] : seeds.entries()) {
    if (!w.addresses()->find(name)) extra.push_back(name);
  }
  Universe u;
  u.addrs = extra.empty() ? w.addresses() : merge_tables(*w.addresses(), extra);
  u.seeds.assign(u.addrs->size(), 0.0);
  for (const auto& [name, value] : seeds.entries()) u.seeds[*u.addrs->find(name)] = value;
  u.matrix_to_u.resize(w.size());
  for (uint32_t i = 0; i < w.size(); ++i) u.matrix_to_u[i] = *u.addrs->find(w.addresses()->name(i));
  return u;
}

}  // namespace

double SolveResult::score_of(std::string_view address) const {
  auto id = addresses->find(address);
  if (!id) fail(ErrorCode::UnknownAddress, "unknown address: " + std::string(address));
  return scores[*id];
}

SolveResult tracerank_power(const TransitionMatrix& w, const SeedVector& seeds,
                            const SolverConfig& cfg) {
  check_config(cfg.alpha, cfg.tol, cfg.max_iter);
  Universe u = build_universe(w, seeds);
  const uint32_t n = w.size();

  // Solve on the matrix universe; isolated seed-only nodes are fixed points
  // r_i = s_i and never enter the iteration.
  std::vector<double> s(n);
  for (uint32_t i = 0; i < n; ++i) s[i] = u.seeds[u.matrix_to_u[i]];

  std::vector<double> r = s;
  std::vector<double> y(n), r_next(n);

  SolveResult out;
  out.addresses = u.addrs;
  out.seeds = u.seeds;

  for (int t = 1; t <= cfg.max_iter; ++t) {
    w.apply_transposed(r, y);
    for (uint32_t i = 0; i < n; ++i) r_next[i] = s[i] + cfg.alpha * y[i];
    double res_l1 = sum_l1(r_next, r);
    double res_inf = max_abs_diff(r_next, r);
    out.residual_l1_log.push_back(res_l1);
    out.residual_linf_log.push_back(res_inf);
    r.swap(r_next);
    out.iterations_used = t;
    out.residual_l1 = res_l1;
    if (res_l1 <= cfg.tol) {
      out.converged = true;
      break;
    }
  }

  out.scores.assign(u.addrs->size(), 0.0);
  for (uint32_t i = 0; i < u.addrs->size(); ++i) out.scores[i] = u.seeds[i];
  for (uint32_t i = 0; i < n; ++i) out.scores[u.matrix_to_u[i]] = r[i];
  return out;
}

SolveResult tracerank_direct(const TransitionMatrix& w, const SeedVector& seeds, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "alpha must lie in (0,1), got " + format_g12(alpha));
  const uint32_t n = w.size();
  if (n > kDenseSolveLimit)
    fail(ErrorCode::TooLarge, "dense solve limited to " + std::to_string(kDenseSolveLimit) +
                                  " nodes, universe has " + std::to_string(n));
  Universe u = build_universe(w, seeds);

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (uint32_t payee = 0; payee < n; ++payee) {
    for (const auto& [payer, weight] : w.column(payee)) {
      a(payee, payer) -= alpha * weight;  // (I - alpha W^T)
    }
  }
  Eigen::VectorXd s(n);
  for (uint32_t i = 0; i < n; ++i) s(i) = u.seeds[u.matrix_to_u[i]];
  Eigen::VectorXd r = n > 0 ? a.partialPivLu().solve(s).eval() : Eigen::VectorXd();

  SolveResult out;
  out.addresses = u.addrs;
  out.seeds = u.seeds;
  out.converged = true;
  out.iterations_used = 0;
  out.scores.assign(u.addrs->size(), 0.0);
  for (uint32_t i = 0; i < u.addrs->size(); ++i) out.scores[i] = u.seeds[i];
  // The exact solution is entrywise nonnegative; clip factorization noise.
  for (uint32_t i = 0; i < n; ++i) out.scores[u.matrix_to_u[i]] = std::max(0.0, r(i));
  return out;
}

std::string SybilReport::to_json() const {
  nlohmann::ordered_json j;
  j["address"] = address;
  j["score"] = round12(score);
  j["seed"] = round12(seed);
  j["direct_payers"] = direct_payers;
  j["reachable_addresses"] = reachable_addresses;
  j["reachable_seed_mass"] = round12(reachable_seed_mass);
  j["converged"] = converged;
  return j.dump();
}

SybilReport sybil_check(const TransitionMatrix& w, const SeedVector& seeds,
                        std::string_view service, const SolverConfig& cfg) {
  std::string name = normalize_address(service);
  SolveResult solved = tracerank_power(w, seeds, cfg);
  auto uid = solved.addresses->find(name);
  if (!uid) fail(ErrorCode::UnknownAddress, "unknown address: " + name);

  SybilReport rep;
  rep.address = name;
  rep.score = solved.scores[*uid];
  rep.seed = solved.seeds[*uid];
  rep.converged = solved.converged;

  auto sid = w.addresses()->find(name);
  if (sid) {
    // Reverse reachability over inbound weights.
    std::vector<char> seen(w.size(), 0);
    std::vector<uint32_t> stack{*sid};
    seen[*sid] = 1;
    while (!stack.empty()) {
      uint32_t node = stack.back();
      stack.pop_back();
      for (const auto& [payer, weight] : w.column(node)) {
        (void)weight;
        if (!seen[payer]) {
          seen[payer] = 1;
          stack.push_back(payer);
        }
      }
    }
    rep.direct_payers = w.column(*sid).size();
    KahanSum mass;
    for (uint32_t i = 0; i < w.size(); ++i) {
      if (seen[i]) {
        ++rep.reachable_addresses;
        mass.add(solved.seeds[*solved.addresses->find(w.addresses()->name(i))]);
      }
    }
    rep.reachable_seed_mass = mass.value();
  } else {
    // Seed-only address: reachable set is itself.
    rep.reachable_addresses = 1;
    rep.reachable_seed_mass = rep.seed;
  }
  return rep;
}

}  // namespace tracerank
