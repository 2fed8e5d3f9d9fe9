#pragma once

// Shared test scaffolding: scratch directories, a portable deterministic RNG,
// random graph ensembles, and a subprocess runner for CLI tests.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "core/flow.hpp"
#include "core/graph.hpp"

namespace trtest {

class TempDir {
public:
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int attempt = 0; attempt < 1000; ++attempt) {
      auto candidate = base / ("tracerank_test_" + std::to_string(::getpid()) + "_" +
                               std::to_string(next_id()++));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path_ = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create scratch directory");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string path() const { return path_.string(); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
  static int& next_id() {
    static int id = 0;
    return id;
  }
  std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return std::move(out).str();
}

inline void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// mt19937_64 with hand-rolled mappings so sequences do not depend on any
// standard library's distribution internals.
class TestRng {
public:
  explicit TestRng(uint64_t seed) : gen_(seed) {}
  uint64_t raw() { return gen_(); }
  int64_t uniform_int(int64_t lo, int64_t hi) {
    return lo + static_cast<int64_t>(gen_() % (static_cast<uint64_t>(hi - lo) + 1));
  }
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 gen_;
};

inline constexpr int64_t kTestBaseTime = 1735689600;  // 2025-01-01T00:00:00Z

inline std::string node_name(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "n%03d", i);
  return buf;
}

struct RandomGraphSpec {
  int max_nodes = 50;
  int max_edges = 300;
  // Every payer pays exactly one payee. This caps each row sum of W at 1,
  // which is the regime where L1 contraction by alpha is a theorem.
  bool single_payee_per_payer = false;
};

inline tracerank::PaymentGraph random_graph(TestRng& rng, const RandomGraphSpec& spec) {
  int n = static_cast<int>(rng.uniform_int(2, spec.max_nodes));
  int m = static_cast<int>(rng.uniform_int(1, spec.max_edges));
  tracerank::GraphBuilder builder;
  std::vector<int> fixed_payee(n);
  if (spec.single_payee_per_payer)
    for (int j = 0; j < n; ++j)
      fixed_payee[j] = (j + 1 + static_cast<int>(rng.uniform_int(0, n - 2))) % n;
  for (int e = 0; e < m; ++e) {
    int payer = static_cast<int>(rng.uniform_int(0, n - 1));
    int payee = spec.single_payee_per_payer
                    ? fixed_payee[payer]
                    : static_cast<int>((payer + 1 + rng.uniform_int(0, n - 2)) % n);
    double value = rng.uniform(0.01, 1000.0);
    int64_t ts = kTestBaseTime - rng.uniform_int(0, 90 * 86400);
    builder.add(node_name(payer), node_name(payee), value, ts);
  }
  return builder.finish();
}

inline tracerank::SeedVector random_seeds(TestRng& rng, const tracerank::PaymentGraph& graph,
                                          double p_nonzero = 0.7) {
  tracerank::SeedVector seeds;
  for (const std::string& name : graph.addresses()->names())
    if (rng.uniform() < p_nonzero) seeds.set(name, rng.uniform());
  return seeds;
}

struct CmdResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

// Runs a shell command, capturing stdout/stderr through scratch files.
inline CmdResult run_cmd(const std::string& command) {
  TempDir scratch;
  std::string out_path = scratch.file("out");
  std::string err_path = scratch.file("err");
  std::string full = command + " >" + out_path + " 2>" + err_path;
  int raw = std::system(full.c_str());
  CmdResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

}  // namespace trtest
