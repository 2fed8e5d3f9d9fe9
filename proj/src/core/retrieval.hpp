#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "core/solver.hpp"

namespace tracerank {

struct ServiceProfile {
  std::string address;       // normalized
  std::string description;   // non-empty
  std::vector<std::string> tags;
  std::string chain;         // empty = unspecified
  std::vector<double> embedding;  // dimension == index dim
};

// In-memory profile store with a fixed embedding dimension. Build is
// single-writer; queries afterwards are read-only. Profiles supplied without
// an embedding are embedded from their description with the hashed embedder.
class ProfileIndex {
public:
  explicit ProfileIndex(unsigned dim);

  void add(ServiceProfile profile);
  static ProfileIndex load_jsonl(std::istream& in, unsigned dim,
                                 const std::string& source_name = "profiles");
  static ProfileIndex load_jsonl_file(const std::string& path, unsigned dim);

  unsigned dim() const { return dim_; }
  size_t size() const { return profiles_.size(); }
  const std::vector<ServiceProfile>& profiles() const { return profiles_; }

private:
  unsigned dim_;
  std::vector<ServiceProfile> profiles_;  // sorted by address
};

struct QueryFilters {
  std::optional<std::string> chain;
  std::vector<std::string> tags;  // conjunctive: result must carry all
};

struct RankedResult {
  std::string address;
  double similarity;      // clamped to [0,1]
  double raw_similarity;  // unclamped cosine
  double tracerank;
  double final_score;     // similarity * (tracerank + epsilon)
  int rank;               // 1-based
};

struct QueryOptions {
  QueryFilters filters;
  double epsilon = 0.0;  // additive reputation floor; 0 keeps strict fusion
  bool force = false;    // accept non-converged reputation
};

// Exact top-k scan: final = clamp(cos(q,p),0,1) * (tracerank + epsilon),
// sorted final desc then address asc. Throws on k == 0, an empty index, or a
// non-converged reputation without force.
std::vector<RankedResult> query_index(const ProfileIndex& index, std::string_view text, unsigned k,
                                      const SolveResult& reputation, const QueryOptions& opts);

std::string ranked_results_json(const std::vector<RankedResult>& results);

}  // namespace tracerank
