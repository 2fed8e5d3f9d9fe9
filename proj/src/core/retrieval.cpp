#include "core/retrieval.hpp"

#include <algorithm>
#include <fstream>

#include "core/embedding.hpp"
#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "json.hpp"

namespace tracerank {

ProfileIndex::ProfileIndex(unsigned dim) : dim_(dim) {
  if (dim == 0) fail(ErrorCode::InvalidArgument, "index dimension must be > 0");
}

void ProfileIndex::add(ServiceProfile p) {
  p.address = normalize_address(p.address);
  if (p.description.empty())
    fail(ErrorCode::InvalidArgument, "profile for '" + p.address + "' has an empty description");
  if (p.embedding.empty()) {
    p.embedding = embed_text(p.description, dim_);
  } else if (p.embedding.size() != dim_) {
    fail(ErrorCode::DimensionMismatch,
         "profile for '" + p.address + "' has embedding dimension " +
             std::to_string(p.embedding.size()) + ", index expects " + std::to_string(dim_));
  }
  auto it = std::lower_bound(profiles_.begin(), profiles_.end(), p.address,
                             [](const ServiceProfile& a, const std::string& addr) {
                               return a.address < addr;
                             });
  if (it != profiles_.end() && it->address == p.address)
    *it = std::move(p);  // last write wins
  else
    profiles_.insert(it, std::move(p));
}

ProfileIndex ProfileIndex::load_jsonl(std::istream& in, unsigned dim, const std::string& source) {
  ProfileIndex index(dim);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      fail(ErrorCode::Parse, source + ":" + std::to_string(lineno) + ": invalid JSON object");
    if (!j.contains("address") || !j.contains("description"))
      fail(ErrorCode::Parse,
           source + ":" + std::to_string(lineno) + ": profile needs address and description");
    ServiceProfile p;
    try {
      p.address = j["address"].get<std::string>();
      p.description = j["description"].get<std::string>();
      if (j.contains("tags") && !j["tags"].is_null())
        p.tags = j["tags"].get<std::vector<std::string>>();
      if (j.contains("chain") && !j["chain"].is_null()) p.chain = j["chain"].get<std::string>();
      if (j.contains("embedding") && !j["embedding"].is_null())
        p.embedding = j["embedding"].get<std::vector<double>>();
      index.add(std::move(p));
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      fail(ErrorCode::Parse, source + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return index;
}

ProfileIndex ProfileIndex::load_jsonl_file(const std::string& path, unsigned dim) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open profiles file: " + path);
  return load_jsonl(in, dim, path);
}

std::vector<RankedResult> query_index(const ProfileIndex& index, std::string_view text, unsigned k,
                                      const SolveResult& reputation, const QueryOptions& opts) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be >= 1");
  if (index.size() == 0) fail(ErrorCode::EmptyIndex, "profile index is empty");
  if (!reputation.converged && !opts.force)
    fail(ErrorCode::NotConverged,
         "reputation scores did not converge; pass force to rank with the best iterate");
  if (!(opts.epsilon >= 0.0))
    fail(ErrorCode::InvalidArgument, "epsilon must be >= 0");

  std::vector<double> q = embed_text(text, index.dim());

  std::vector<RankedResult> scored;
  for (const ServiceProfile& p : index.profiles()) {
    if (opts.filters.chain && p.chain != *opts.filters.chain) continue;
    bool tags_ok = true;
    for (const std::string& want : opts.filters.tags) {
      if (std::find(p.tags.begin(), p.tags.end(), want) == p.tags.end()) {
        tags_ok = false;
        break;
      }
    }
    if (!tags_ok) continue;

    double raw = cosine(q, p.embedding);
    double sim = std::clamp(raw, 0.0, 1.0);
    double rep = 0.0;
    if (auto id = reputation.addresses->find(p.address)) rep = reputation.scores[*id];
    RankedResult r;
    r.address = p.address;
    r.raw_similarity = raw;
    r.similarity = sim;
    r.tracerank = rep;
    r.final_score = sim * (rep + opts.epsilon);
    r.rank = 0;
    scored.push_back(std::move(r));
  }

  std::sort(scored.begin(), scored.end(), [](const RankedResult& a, const RankedResult& b) {
    if (a.final_score != b.final_score) return a.final_score > b.final_score;
    return a.address < b.address;
  });
  if (scored.size() > k) scored.resize(k);
  for (size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<int>(i) + 1;
  return scored;
}

std::string ranked_results_json(const std::vector<RankedResult>& results) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const RankedResult& r : results) {
    nlohmann::ordered_json j;
    j["rank"] = r.rank;
    j["address"] = r.address;
    j["similarity"] = round12(r.similarity);
    j["raw_similarity"] = round12(r.raw_similarity);
    j["tracerank"] = round12(r.tracerank);
    j["final_score"] = round12(r.final_score);
    arr.push_back(std::move(j));
  }
  return arr.dump();
}

}  // namespace tracerank
