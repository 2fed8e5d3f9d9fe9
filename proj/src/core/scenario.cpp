#include "core/scenario.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <random>

#include "core/baselines.hpp"
#include "core/errors.hpp"
#include "core/numeric.hpp"
#include "core/serialize.hpp"
#include "core/timestamps.hpp"
#include "json.hpp"

namespace tracerank {
namespace {

constexpr const char* kSpamAddress = "0x000000000000000000000000000000000000000a";
constexpr const char* kLegitAddress = "0x000000000000000000000000000000000000000b";

// Raw mt19937_64 draws mapped by hand so generated bytes do not depend on a
// standard library's distribution implementation.
class Rng {
public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Uniform integer in [lo, hi], inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    return lo + static_cast<int64_t>(gen_() % span);
  }

  // Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::string address() {
    char buf[48];
    std::snprintf(buf, sizeof buf, "0x%016" PRIx64 "%016" PRIx64 "%08x", gen_(), gen_(),
                  static_cast<uint32_t>(gen_()));
    return buf;
  }

private:
  std::mt19937_64 gen_;
};

}  // namespace

ScenarioData scenario_spam(const ScenarioParams& p) {
  if (p.n_spam_payers < 0 || p.n_legit_payers < 0)
    fail(ErrorCode::InvalidArgument, "payer counts must be >= 0");
  if (p.spam_payments_per_wallet < 1)
    fail(ErrorCode::InvalidArgument, "spam_payments_per_wallet must be >= 1");
  if (p.spam_value < 0.0 || p.legit_total < 0.0 || p.spam_seed < 0.0 || p.legit_seed < 0.0)
    fail(ErrorCode::InvalidArgument, "values and seeds must be >= 0");
  if (p.legit_value_spread < 0.0 || p.legit_value_spread >= 1.0)
    fail(ErrorCode::InvalidArgument, "legit_value_spread must lie in [0,1)");

  Rng rng(p.rng_seed);
  GraphBuilder builder;
  SeedVector seeds;

  // Spam wallets: fresh addresses paying spam_value, inside a 3-day burst.
  for (int i = 0; i < p.n_spam_payers; ++i) {
    std::string wallet = rng.address();
    for (int k = 0; k < p.spam_payments_per_wallet; ++k) {
      int64_t ts = p.base_time - rng.uniform_int(0, 3 * kSecondsPerDay);
      builder.add(wallet, kSpamAddress, p.spam_value, ts);
    }
    if (p.spam_seed > 0.0) seeds.set(wallet, p.spam_seed);
  }

  // Legit payers: per-payment values sum to legit_total; spread > 0 varies
  // them around the mean while renormalizing to keep the configured total.
  if (p.n_legit_payers > 0 && p.legit_total > 0.0) {
    std::vector<double> weights(p.n_legit_payers);
    KahanSum wsum;
    for (int i = 0; i < p.n_legit_payers; ++i) {
      weights[i] = 1.0 + p.legit_value_spread * (2.0 * rng.uniform() - 1.0);
      wsum.add(weights[i]);
    }
    for (int i = 0; i < p.n_legit_payers; ++i) {
      std::string payer = rng.address();
      int64_t ts = p.base_time - rng.uniform_int(0, 30 * kSecondsPerDay);
      builder.add(payer, kLegitAddress, p.legit_total * weights[i] / wsum.value(), ts);
      if (p.legit_seed > 0.0) seeds.set(payer, p.legit_seed);
    }
  } else if (p.n_legit_payers > 0) {
    for (int i = 0; i < p.n_legit_payers; ++i) {
      std::string payer = rng.address();
      int64_t ts = p.base_time - rng.uniform_int(0, 30 * kSecondsPerDay);
      builder.add(payer, kLegitAddress, 0.0, ts);
      if (p.legit_seed > 0.0) seeds.set(payer, p.legit_seed);
    }
  }

  ScenarioData data;
  data.service_spam = kSpamAddress;
  data.service_legit = kLegitAddress;
  data.graph = builder.finish();
  data.seeds = std::move(seeds);

  ServiceProfile spam;
  spam.address = kSpamAddress;
  spam.description =
      "Send $1 and instantly receive a 1M token airdrop. Free bonus rewards for every wallet, "
      "unlimited claims.";
  spam.tags = {"airdrop", "rewards"};
  spam.chain = "base";
  ServiceProfile legit;
  legit.address = kLegitAddress;
  legit.description =
      "Background check and identity verification service for traders, funds and protocols. "
      "Compliance-grade screening data per request.";
  legit.tags = {"identity", "compliance"};
  legit.chain = "base";
  data.profiles = {std::move(spam), std::move(legit)};
  return data;
}

std::string scenario_write(const ScenarioData& data, const ScenarioParams& p,
                           const std::string& dir) {
  write_payments_csv(dir + "/payments.csv", data.graph);
  write_seeds_csv(dir + "/seeds.csv", data.seeds);
  write_profiles_jsonl(dir + "/profiles.jsonl", data.profiles);

  nlohmann::ordered_json j;
  j["name"] = "spam_service";
  j["parameters"] = {{"n_spam_payers", p.n_spam_payers},
                     {"spam_value", round12(p.spam_value)},
                     {"spam_payments_per_wallet", p.spam_payments_per_wallet},
                     {"spam_seed", round12(p.spam_seed)},
                     {"n_legit_payers", p.n_legit_payers},
                     {"legit_total", round12(p.legit_total)},
                     {"legit_seed", round12(p.legit_seed)},
                     {"legit_value_spread", round12(p.legit_value_spread)},
                     {"rng_seed", p.rng_seed},
                     {"base_time", p.base_time}};
  j["services"] = {{"spam", data.service_spam}, {"legit", data.service_legit}};
  j["graph"] = nlohmann::ordered_json::parse(data.graph.summary_json());
  std::string text = j.dump(2) + "\n";
  write_text_file(dir + "/scenario.json", text);
  return text;
}

std::string ScenarioVerdict::to_json(const ScenarioData& data) const {
  nlohmann::ordered_json j;
  auto method = [&](double spam, double legit) {
    nlohmann::ordered_json m;
    m["service_a"] = round12(spam);
    m["service_b"] = round12(legit);
    m["winner"] = spam > legit   ? data.service_spam
                  : legit > spam ? data.service_legit
                                 : "tie";
    return m;
  };
  j["tracerank"] = method(tracerank_spam, tracerank_legit);
  j["count"] = method(count_spam, count_legit);
  j["volume"] = method(volume_spam, volume_legit);
  j["pagerank"] = method(pagerank_spam, pagerank_legit);
  j["tracerank_prefers_legit"] = tracerank_prefers_legit;
  j["baselines_prefer_spam"] = baselines_prefer_spam;
  j["inversion_demonstrated"] = inversion_demonstrated;
  return j.dump(2) + "\n";
}

ScenarioVerdict scenario_verdict(const ScenarioData& data, const SolverConfig& cfg,
                                 double lambda_per_day) {
  FlowMatrix flows = FlowMatrix::aggregate(data.graph, lambda_per_day, std::nullopt);
  TransitionMatrix w = TransitionMatrix::normalize(flows);
  SolveResult tr = tracerank_power(w, data.seeds, cfg);
  if (!tr.converged) fail(ErrorCode::NotConverged, "tracerank did not converge on the scenario");
  BaselineResult count = count_rank(data.graph);
  BaselineResult volume = volume_rank(data.graph);
  PageRankConfig pr_cfg;
  pr_cfg.damping = cfg.alpha;
  pr_cfg.tol = cfg.tol;
  pr_cfg.max_iter = cfg.max_iter;
  BaselineResult pagerank = pagerank_unseeded(flows, pr_cfg);
  if (!pagerank.converged)
    fail(ErrorCode::NotConverged, "pagerank baseline did not converge on the scenario");

  // A service with no inbound payments may be absent from the universe; its
  // score under every method is zero.
  auto of = [](const auto& result, const std::string& addr) {
    return result.addresses->find(addr) ? result.score_of(addr) : 0.0;
  };
  ScenarioVerdict v;
  v.tracerank_spam = of(tr, data.service_spam);
  v.tracerank_legit = of(tr, data.service_legit);
  v.count_spam = of(count, data.service_spam);
  v.count_legit = of(count, data.service_legit);
  v.volume_spam = of(volume, data.service_spam);
  v.volume_legit = of(volume, data.service_legit);
  v.pagerank_spam = of(pagerank, data.service_spam);
  v.pagerank_legit = of(pagerank, data.service_legit);
  v.tracerank_prefers_legit = v.tracerank_legit > v.tracerank_spam;
  v.baselines_prefer_spam = v.count_spam > v.count_legit && v.volume_spam > v.volume_legit &&
                            v.pagerank_spam > v.pagerank_legit;
  v.inversion_demonstrated = v.tracerank_prefers_legit && v.baselines_prefer_spam;
  return v;
}

}  // namespace tracerank
