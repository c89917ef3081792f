#pragma once

// Experiment driver: offline walk on the predictions, the three shifted
// online runs, the oracle optimum and exact expectations.

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "twtsp/error.hpp"
#include "twtsp/generators.hpp"
#include "twtsp/io.hpp"
#include "twtsp/matching.hpp"
#include "twtsp/model.hpp"
#include "twtsp/offline.hpp"
#include "twtsp/online.hpp"
#include "twtsp/oracle.hpp"

namespace twtsp {

struct SimulationConfig {
  OnlineMode mode = OnlineMode::OneToOne;
  std::uint64_t state_budget = kDefaultStateBudget;
  OfflineConfig offline;
  OnlineConfig online;
  bool run_oracle = true;
};

struct SimulationReport {
  std::string instance_digest;
  std::optional<Reward> opt_value;  // empty when the oracle exceeded its budget or was skipped
  bool opt_budget_exceeded = false;
  Reward offline_value = 0;         // Rew(W', I', S')
  Time s_prime = 1;
  std::optional<Time> lambda_bound;
  std::optional<Time> lambda_guess;
  std::map<int, Reward> per_epsilon_rewards;
  Rational expected_reward{0};
  std::optional<Rational> ratio;    // opt / E[reward], when both exist and E > 0
  std::optional<ErrorProfile> error_profile;
  Walk offline_walk;
  std::map<int, OnlineRunResult> runs;
  std::uint64_t seed = 0;
  json config;
};

inline Time s_prime_for(Time lambda, OnlineMode mode) {
  return mode == OnlineMode::OneToOne ? 2 * lambda + 1 : std::max<Time>(lambda, 1);
}

/// Runs the full pipeline. `lambda_bound` empty means guessing the error
/// with the seeded draw; an explicit bound may overestimate the true error.
inline SimulationReport simulate(const Instance& inst, const Instance& pred, const std::optional<Matching>& matching,
                                 std::optional<Time> lambda_bound, std::uint64_t seed,
                                 const SimulationConfig& cfg = {}) {
  require_valid(inst);
  require_valid(pred);
  SimulationReport rep;
  rep.seed = seed;
  rep.instance_digest = digest(inst);
  rep.lambda_bound = lambda_bound;
  const Time l_min = pred.l_min();
  Time lambda = 0;
  if (lambda_bound) {
    lambda = *lambda_bound;
  } else {
    const auto guesses = lambda_guesses(l_min);
    SplitMix64 rng(seed);
    lambda = guesses[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(guesses.size()) - 1))];
    rep.lambda_guess = lambda;
  }
  rep.s_prime = s_prime_for(lambda, cfg.mode);
  const Instance pred_s = pred.with_service(rep.s_prime);
  rep.offline_walk = offline_solve(pred_s, cfg.offline);
  rep.offline_value = reward(rep.offline_walk, pred_s);

  Reward sum = 0;
  for (int eps : {-1, 0, 1}) {
    OnlineStream stream(inst.requests);
    auto run = cfg.mode == OnlineMode::OneToOne
                   ? run_online(inst.graph, pred_s, rep.offline_walk, stream, eps, l_min)
                   : run_online_many(inst.graph, pred_s, rep.offline_walk, stream, eps, l_min, cfg.online);
    rep.per_epsilon_rewards[eps] = run.covered.reward;
    sum += run.covered.reward;
    rep.runs.emplace(eps, std::move(run));
  }
  rep.expected_reward = Rational(sum, 3);

  if (cfg.run_oracle) {
    try {
      rep.opt_value = opt_twtsp(inst.with_service(1), cfg.state_budget).value;
    } catch (const BudgetExceeded&) {
      rep.opt_budget_exceeded = true;
    }
  }
  if (rep.opt_value && rep.expected_reward > 0) rep.ratio = Rational(*rep.opt_value) / rep.expected_reward;

  if (matching) rep.error_profile = profile(inst, pred, *matching);
  else if (inst.requests.size() == pred.requests.size()) rep.error_profile = profile(inst, pred, best_matching(inst, pred));

  rep.config = {{"mode", cfg.mode == OnlineMode::OneToOne ? "one2one" : "many2one"},
                {"state_budget", cfg.state_budget},
                {"orienteering", cfg.offline.solver == OrienteeringSolver::Exact ? "exact" : "greedy"},
                {"lambda", lambda_bound ? json(*lambda_bound) : json("guess")},
                {"seed", seed}};
  return rep;
}

inline json to_json(const SimulationReport& r) {
  json eps = json::object();
  json walks = json::object();
  for (const auto& [e, v] : r.per_epsilon_rewards) eps[std::to_string(e)] = v;
  for (const auto& [e, run] : r.runs) walks[std::to_string(e)] = to_json(run.walk);
  json j = {{"instance_digest", r.instance_digest},
            {"opt_value", r.opt_value ? json(*r.opt_value) : json("budget_exceeded")},
            {"offline_value", r.offline_value},
            {"s_prime", r.s_prime},
            {"per_epsilon_rewards", eps},
            {"expected_reward", to_json(r.expected_reward)},
            {"ratio", r.ratio ? to_json(*r.ratio) : json(nullptr)},
            {"ratio_undefined", !r.ratio.has_value()},
            {"offline_walk", to_json(r.offline_walk)},
            {"walks", walks},
            {"seed", r.seed},
            {"config", r.config}};
  if (!r.opt_value && !r.opt_budget_exceeded) j["opt_value"] = nullptr;
  if (r.error_profile) j["error_profile"] = to_json(*r.error_profile);
  if (r.lambda_guess) j["lambda_guess"] = *r.lambda_guess;
  return j;
}

// ---------------------------------------------------------------------------
// Bench suites

struct BenchRow {
  std::size_t entry = 0;
  std::uint64_t seed = 0;
  Time lambda_target = 0;
  bool conforming = true;
  std::optional<ErrorProfile> profile;
  std::optional<Reward> opt;
  Reward offline = 0;
  Rational expected{0};
  std::optional<Rational> ratio;
  Time log_min_d_lmax = 0;  // floor(log2(min(D, L_max))), at least 0
  bool walks_valid = true;
  std::string note;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::string csv;
  std::map<std::string, std::string> dat_files;  // file name -> contents
};

namespace detail {

inline std::string csv_rational(const std::optional<Rational>& q) {
  return q ? to_string(*q) : std::string("NA");
}

inline std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

inline std::optional<Rational> median_of(std::vector<Rational> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

struct SuiteEntry {
  std::string kind;
  ParamMap params;
  std::vector<Time> lambdas;
  Time tau = 0;
  Rational rho{1};
  int trials = 1;
  std::uint64_t seed = 1;
  OnlineMode mode = OnlineMode::OneToOne;
  bool guess = false;
};

inline SuiteEntry parse_entry(const json& e, std::uint64_t default_seed, int default_trials) {
  SuiteEntry s;
  if (!e.is_object() || !e.contains("generator")) throw Error(Errc::BadSuiteFile, "entry without generator");
  const json& g = e.at("generator");
  if (!g.contains("kind") || !g.at("kind").is_string()) throw Error(Errc::BadSuiteFile, "generator without kind");
  s.kind = g.at("kind").get<std::string>();
  if (s.kind != "random" && s.kind != "many" && !parse_lb_kind(s.kind))
    throw Error(Errc::BadSuiteFile, "unknown generator kind '" + s.kind + "'");
  if (g.contains("params"))
    for (const auto& [k, v] : g.at("params").items()) {
      if (!v.is_number_integer()) throw Error(Errc::BadSuiteFile, "parameter " + k + " is not an integer");
      s.params[k] = v.get<std::int64_t>();
    }
  if (e.contains("lambdas"))
    for (const auto& l : e.at("lambdas")) s.lambdas.push_back(l.get<Time>());
  if (s.lambdas.empty()) s.lambdas.push_back(0);
  s.tau = e.value("tau", Time{0});
  if (e.contains("rho")) s.rho = rational_from_json(e.at("rho"));
  s.trials = e.value("trials", default_trials);
  s.seed = e.value("seed", default_seed);
  const auto mode = e.value("mode", std::string("one2one"));
  if (mode == "many2one") s.mode = OnlineMode::ManyToOne;
  else if (mode != "one2one") throw Error(Errc::BadSuiteFile, "unknown mode '" + mode + "'");
  s.guess = e.value("policy", std::string("bound")) == "guess";
  return s;
}

inline BenchRow run_trial(const SuiteEntry& e, std::size_t idx, Time lambda, std::uint64_t seed,
                          const SimulationConfig& base) {
  BenchRow row;
  row.entry = idx;
  row.seed = seed;
  row.lambda_target = lambda;
  SimulationConfig cfg = base;
  cfg.mode = e.mode;
  Instance inst, pred;
  std::optional<Matching> matching;
  std::optional<Time> bound = lambda;
  if (e.kind == "random") {
    inst = gen_random(RandomParams::from(e.params), seed);
    try {
      auto ps = perturb_predictions(inst, {lambda, e.tau, e.rho}, seed ^ 0x5bd1e995ULL, true);
      pred = std::move(ps.predictions);
      matching = std::move(ps.matching);
    } catch (const Error& err) {
      if (err.code() != Errc::TargetsViolateAssumptions) throw;
      row.conforming = false;
      row.note = "nonconforming";
      return row;
    }
  } else if (e.kind == "many") {
    ManyToOneParams mp;
    mp.graph = RandomParams::from(e.params);
    mp.predictions = static_cast<int>(param(e.params, "predictions", mp.predictions));
    mp.max_preimages = static_cast<int>(param(e.params, "max_preimages", mp.max_preimages));
    mp.radius = param(e.params, "radius", mp.radius);
    auto m = gen_many_to_one(mp, seed);
    inst = std::move(m.instance);
    pred = std::move(m.predictions);
    matching = std::move(m.matching);
    bound = m.lambda;
    row.lambda_target = m.lambda;
  } else {
    auto g = gen_lb(*parse_lb_kind(e.kind), e.params, seed);
    inst = std::move(g.instance);
    pred = g.predictions ? std::move(*g.predictions) : inst;
    matching = g.matching;
    if (!g.predictions) matching = identity_matching(inst.requests.size());
  }
  if (e.guess) bound.reset();
  const auto rep = simulate(inst, pred, matching, bound, seed, cfg);
  row.profile = rep.error_profile;
  row.opt = rep.opt_value;
  row.offline = rep.offline_value;
  row.expected = rep.expected_reward;
  row.ratio = rep.ratio;
  if (rep.opt_budget_exceeded) row.note = "budget_exceeded";
  else if (!rep.ratio) row.note = "ratio_undefined";
  const Time m = std::min<Time>(inst.graph.diameter(), inst.l_max());
  row.log_min_d_lmax = m >= 1 ? static_cast<Time>(std::bit_width(static_cast<std::uint64_t>(m)) - 1) : 0;
  row.walks_valid = validate_walk(rep.offline_walk, inst.graph).empty();
  for (const auto& [eps, run] : rep.runs) row.walks_valid = row.walks_valid && validate_walk(run.walk, inst.graph).empty();
  return row;
}

}  // namespace detail

/// Runs every (entry, lambda, trial) of a suite on `workers` threads.
/// Suite format:
///   {"seed": N, "trials": N, "state_budget": N,
///    "entries": [{"generator": {"kind": K, "params": {...}}, "lambdas": [...],
///                 "tau": T, "rho": {"num":..,"den":..}, "trials": N,
///                 "mode": "one2one"|"many2one", "policy": "bound"|"guess"}]}
inline BenchResult bench(const json& suite, unsigned workers = 1, const SimulationConfig& base = {}) {
  if (!suite.is_object() || !suite.contains("entries") || !suite.at("entries").is_array())
    throw Error(Errc::BadSuiteFile, "suite needs an 'entries' array");
  SimulationConfig cfg = base;
  std::vector<detail::SuiteEntry> entries;
  try {
    cfg.state_budget = suite.value("state_budget", base.state_budget);
    const auto seed = suite.value("seed", std::uint64_t{1});
    const int trials = suite.value("trials", 1);
    for (const auto& e : suite.at("entries")) entries.push_back(detail::parse_entry(e, seed, trials));
  } catch (const json::exception& e) {
    throw Error(Errc::BadSuiteFile, e.what());
  }

  struct Job {
    std::size_t entry;
    Time lambda;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (Time l : entries[i].lambdas)
      for (int t = 0; t < entries[i].trials; ++t) jobs.push_back({i, l, entries[i].seed + static_cast<std::uint64_t>(t)});

  BenchResult out;
  out.rows.resize(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::optional<std::string> failure;
  auto worker = [&] {
    for (std::size_t k; (k = next++) < jobs.size();) {
      try {
        out.rows[k] = detail::run_trial(entries[jobs[k].entry], jobs[k].entry, jobs[k].lambda, jobs[k].seed, cfg);
      } catch (const std::exception& e) {
        std::lock_guard lock(err_mu);
        if (!failure) failure = e.what();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(jobs.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 0; i + 1 < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) throw Error(Errc::InvalidParams, "trial failed: " + *failure);

  std::ostringstream csv;
  csv << "entry,seed,lambda_target,lambda,tau,rho,opt,offline,expected,ratio,ratio_decimal,walks_valid,note\n";
  std::vector<Rational> ratios;
  std::map<Time, std::vector<Rational>> by_lambda, by_log;
  for (const auto& r : out.rows) {
    csv << r.entry << ',' << r.seed << ',' << r.lambda_target << ',';
    if (r.profile) csv << r.profile->lambda << ',' << r.profile->tau << ',' << to_string(r.profile->rho) << ',';
    else csv << "NA,NA,NA,";
    csv << (r.opt ? std::to_string(*r.opt) : "NA") << ',' << r.offline << ',' << to_string(r.expected) << ','
        << detail::csv_rational(r.ratio) << ',' << (r.ratio ? detail::fmt_double(to_double(*r.ratio)) : "NA") << ','
        << (r.walks_valid ? 1 : 0) << ',' << r.note << '\n';
    if (r.ratio) {
      ratios.push_back(*r.ratio);
      by_lambda[r.lambda_target].push_back(*r.ratio);
      by_log[r.log_min_d_lmax].push_back(*r.ratio);
    }
  }
  const auto med = detail::median_of(ratios);
  const auto mx = ratios.empty() ? std::optional<Rational>() : *std::max_element(ratios.begin(), ratios.end());
  csv << "aggregate_max,,,,,,,,," << detail::csv_rational(mx) << ',' << (mx ? detail::fmt_double(to_double(*mx)) : "NA")
      << ",,\n";
  csv << "aggregate_median,,,,,,,,," << detail::csv_rational(med) << ','
      << (med ? detail::fmt_double(to_double(*med)) : "NA") << ",,\n";
  out.csv = csv.str();

  auto dat = [](const std::map<Time, std::vector<Rational>>& groups, const std::string& xname) {
    std::ostringstream os;
    os << "# " << xname << " median_ratio max_ratio count\n";
    for (const auto& [x, v] : groups) {
      const auto m = *detail::median_of(v);
      const auto top = *std::max_element(v.begin(), v.end());
      os << x << ' ' << detail::fmt_double(to_double(m)) << ' ' << detail::fmt_double(to_double(top)) << ' ' << v.size()
         << '\n';
    }
    return os.str();
  };
  out.dat_files["ratio_vs_lambda.dat"] = dat(by_lambda, "lambda");
  out.dat_files["ratio_vs_logmin.dat"] = dat(by_log, "log2_min_D_Lmax");
  return out;
}

}  // namespace twtsp
