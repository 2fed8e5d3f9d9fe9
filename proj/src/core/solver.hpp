#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/flow.hpp"
#include "core/graph.hpp"

namespace tracerank {

struct SolverConfig {
  double alpha = 0.85;
  double tol = 1e-9;  // L1 threshold on successive iterates
  int max_iter = 200;
};

// Converged scores over the solve universe (matrix addresses plus any seed
// addresses the matrix has never seen; the latter are isolated and keep
// score == seed). Sum of scores obeys sum(r) <= sum(s)/(1-alpha) whenever no
// payer's total out-weight exceeds 1; the max-norm bound
// max(r) <= max(s)/(1-alpha) holds unconditionally.
struct SolveResult {
  AddressTablePtr addresses;
  std::vector<double> scores;
  std::vector<double> seeds;  // seeds aligned to `addresses`
  int iterations_used = 0;
  double residual_l1 = 0.0;
  bool converged = false;
  std::vector<double> residual_l1_log;    // one entry per iteration
  std::vector<double> residual_linf_log;  // max-norm residuals; ratio <= alpha each step

  double score_of(std::string_view address) const;
};

// Fixed-point iteration r <- s + alpha * W^T r starting from r = s, stopping
// when the L1 step norm falls to cfg.tol. A run that exhausts max_iter
// returns converged == false carrying the best iterate; it does not throw.
SolveResult tracerank_power(const TransitionMatrix& w, const SeedVector& seeds,
                            const SolverConfig& cfg);

// Dense factorization of (I - alpha W^T) r = s; the oracle route for the
// iteration above. Guarded to universes of at most kDenseSolveLimit nodes.
inline constexpr uint32_t kDenseSolveLimit = 2000;
SolveResult tracerank_direct(const TransitionMatrix& w, const SeedVector& seeds, double alpha);

struct SybilReport {
  std::string address;
  double score = 0.0;
  double seed = 0.0;
  uint64_t direct_payers = 0;
  uint64_t reachable_addresses = 0;  // inbound transitive closure incl. self
  double reachable_seed_mass = 0.0;
  bool converged = false;
  std::string to_json() const;
};

// Score plus the seed mass that can reach the service through payment flows.
// Zero reachable mass forces score exactly 0 (no tolerance involved).
SybilReport sybil_check(const TransitionMatrix& w, const SeedVector& seeds,
                        std::string_view service, const SolverConfig& cfg);

}  // namespace tracerank
