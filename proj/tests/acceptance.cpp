// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any
// failure. All comparisons are exact rationals.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "test_support.hpp"

using namespace twtsp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  Outcome out;
  std::ostringstream why;
  void fail(const std::string& msg) {
    if (out.pass) why << msg;
    out.pass = false;
  }
};

Time floor_log2(Time x) { return x >= 1 ? static_cast<Time>(std::bit_width(static_cast<std::uint64_t>(x)) - 1) : 0; }

// max(1, log2 min(D, L_max)) rounded down, which only tightens the bound
Time log_factor(const Instance& inst) {
  return std::max<Time>(1, floor_log2(std::min<Time>(inst.graph.diameter(), inst.l_max())));
}

// Conforming one-to-one perturbation: Lambda <= (l_min-1)/4, tau <= l_min/2.
struct Conforming {
  Instance inst;
  PredictionSet ps;
  ErrorProfile prof;
};

Conforming draw_conforming(SplitMix64& rng, int max_n, int max_req) {
  RandomParams p;
  p.n = static_cast<int>(rng.uniform(2, max_n));
  p.max_len = 2;
  p.num_requests = static_cast<int>(rng.uniform(1, max_req));
  p.window_min = 5;
  p.window_max = 10;
  p.release_max = 8;
  p.reward_max = 6;
  Conforming c;
  c.inst = gen_random(p, rng.next());
  const Time lmin = c.inst.l_min();
  const PerturbTargets t{rng.uniform(0, (lmin - 1) / 4), rng.uniform(0, lmin / 2), Rational(rng.uniform(2, 4), 2)};
  c.ps = perturb_predictions(c.inst, t, rng.next(), true);
  c.prof = profile(c.inst, c.ps.predictions, c.ps.matching);
  return c;
}

Outcome c1_service_gap() {
  Check c;
  SplitMix64 rng(1001);
  int done = 0;
  while (done < 200) {
    RandomParams p;
    p.n = static_cast<int>(rng.uniform(1, 6));
    p.num_requests = static_cast<int>(rng.uniform(1, 5));
    p.max_len = 3;
    p.window_min = 3;
    p.window_max = 9;
    p.release_max = 10;
    const auto inst = gen_random(p, rng.next());
    const Time s = rng.uniform(2, 3);
    if (s > inst.l_min()) continue;
    const auto a = opt_twtsp(inst.with_service(s)).value;
    const auto b = opt_twtsp(inst.with_service(1)).value;
    if (Rational(a) < Rational(b, 2 * s - 1))
      c.fail("opt(S=" + std::to_string(s) + ")=" + std::to_string(a) + " < opt(1)=" + std::to_string(b) + "/(2S-1)");
    ++done;
  }
  c.out.detail = c.out.pass ? "200 instances, opt(S) >= opt(1)/(2S-1)" : c.why.str();
  return c.out;
}

Outcome c2_tightness() {
  Check c;
  for (auto [s, l] : {std::pair<Time, Time>{2, 4}, {3, 6}}) {
    const auto inst = gen_lb(LbKind::LineServiceGap, {{"S", s}, {"L", l}}, 0).instance;
    const auto a = opt_twtsp(inst).value, b = opt_twtsp(inst.with_service(1)).value;
    if (!inst.root || a != 1 || b != 2 * s - 1)
      c.fail("S=" + std::to_string(s) + ": opt(S)=" + std::to_string(a) + " opt(1)=" + std::to_string(b));
  }
  c.out.detail = c.out.pass ? "(S,L)=(2,4),(3,6): opt(S)=1, opt(1)=2S-1" : c.why.str();
  return c.out;
}

Outcome c3_zero_service() {
  Check c;
  for (auto [d, l] : {std::pair<Time, Time>{3, 2}, {5, 3}}) {
    const auto inst = gen_lb(LbKind::LineZeroServiceGap, {{"D", d}, {"L", l}}, 0).instance;
    const auto z = opt_twtsp(inst.with_service(0)).value, u = opt_twtsp(inst.with_service(1)).value;
    if (z != d + 1 || u != l)
      c.fail("(D,L)=(" + std::to_string(d) + "," + std::to_string(l) + "): opt0=" + std::to_string(z) +
             " opt1=" + std::to_string(u));
  }
  c.out.detail = c.out.pass ? "(3,2),(5,3): opt(0)=D+1, opt(1)=L" : c.why.str();
  return c.out;
}

Outcome c4_optima_relation() {
  Check c;
  SplitMix64 rng(1004);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = draw_conforming(rng, 4, 4);
    const Time s = 4 * x.prof.lambda + 1, sp = 2 * x.prof.lambda + 1;
    const auto truth = opt_twtsp(x.inst.with_service(s)).value;
    const auto pred = opt_twtsp(x.ps.predictions.with_service(sp)).value;
    if (Rational(pred) < Rational(truth) / (3 * x.prof.rho))
      c.fail("trial " + std::to_string(trial) + ": opt(I',S')=" + std::to_string(pred) +
             " opt(I,S)=" + std::to_string(truth) + " rho=" + to_string(x.prof.rho));
  }
  c.out.detail = c.out.pass ? "100 instances, opt(I',S') >= opt(I,S)/(3 rho)" : c.why.str();
  return c.out;
}

Outcome c5_reachability() {
  Check c;
  SplitMix64 rng(1005);
  int pairs = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = draw_conforming(rng, 5, 5);
    const Time sp = 2 * x.prof.lambda + 1;
    const auto pred = x.ps.predictions.with_service(sp);
    const auto wp = offline_solve(pred);
    const Time k = pred.l_min() / 2;
    std::map<std::size_t, std::size_t> true_of;
    for (auto [i, j] : x.ps.matching.pairs) true_of[j] = i;
    for (const auto& stop : predicted_stops(wp, pred)) {
      const auto it = true_of.find(stop.pred_index);
      if (it == true_of.end()) continue;
      const Request& truth = x.inst.requests[it->second];
      bool hit = false;
      for (int eps : {-1, 0, 1}) {
        const Time t = stop.slot + eps * k;
        if (t < 0) continue;
        hit = hit || !reachable_set(pred.requests[stop.pred_index], t, {{it->second, truth}}, sp, OnlineMode::OneToOne,
                                    x.inst.graph)
                           .empty();
      }
      ++pairs;
      if (!hit) c.fail("trial " + std::to_string(trial) + ": prediction " + std::to_string(stop.pred_index) +
                       " unreachable under every shift");
    }
  }
  c.out.detail = c.out.pass ? std::to_string(pairs) + " covered matched pairs, each reachable for some shift"
                            : c.why.str();
  return c.out;
}

Outcome c6_online_guarantee() {
  Check c;
  SplitMix64 rng(1006);
  SimulationConfig cfg;
  cfg.run_oracle = false;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = draw_conforming(rng, 5, 5);
    const auto rep = simulate(x.inst, x.ps.predictions, x.ps.matching, x.prof.lambda, rng.next(), cfg);
    bool valid = true;
    for (const auto& [e, run] : rep.runs) valid = valid && validate_walk(run.walk, x.inst.graph).empty();
    if (!valid) c.fail("trial " + std::to_string(trial) + ": invalid online walk");
    if (rep.expected_reward < Rational(rep.offline_value) / (6 * x.prof.rho))
      c.fail("trial " + std::to_string(trial) + ": E=" + to_string(rep.expected_reward) +
             " Rew(W')=" + std::to_string(rep.offline_value) + " rho=" + to_string(x.prof.rho));
  }
  c.out.detail = c.out.pass ? "100 instances, E[Rew] >= Rew(W',I',S')/(6 rho)" : c.why.str();
  return c.out;
}

Outcome c7_offline_ratio() {
  Check c;
  SplitMix64 rng(1007);
  Rational worst(0);
  for (int trial = 0; trial < 100; ++trial) {
    RandomParams p;
    p.n = static_cast<int>(rng.uniform(1, 5));
    p.max_len = 3;
    p.num_requests = static_cast<int>(rng.uniform(1, 5));
    p.service = rng.uniform(0, 2);
    p.window_min = std::max<Time>(1, p.service);
    p.window_max = 12;
    p.release_max = 10;
    if (trial % 4 == 0) p.root = 0;
    const auto inst = gen_random(p, rng.next());
    const auto w = offline_solve(inst);
    if (!validate_walk(w, inst.graph).empty()) c.fail("trial " + std::to_string(trial) + ": invalid walk");
    const auto got = reward(w, inst), opt = opt_twtsp(inst).value;
    if (got > 0) worst = std::max(worst, Rational(opt, got));
    if (Rational(got) < Rational(opt, 18 * log_factor(inst)))
      c.fail("trial " + std::to_string(trial) + ": offline " + std::to_string(got) + " opt " + std::to_string(opt));
  }
  c.out.detail = c.out.pass ? "100 instances, worst opt/offline = " + to_string(worst) : c.why.str();
  return c.out;
}

Outcome c8_chain() {
  Check c;
  std::ostringstream ratios;
  for (Time s : {1, 2}) {
    const ParamMap params{{"S", s}, {"K", 2}, {"C", 3}, {"N", 4}};
    const auto g = gen_lb(LbKind::ChainPredictions, params, 8);
    const auto opt = opt_twtsp(g.instance).value;
    const auto prof = profile(g.instance, *g.predictions, *g.matching);
    if (opt != 4 || prof.lambda != s || prof.tau != 0 || prof.rho != Rational(1))
      c.fail("S=" + std::to_string(s) + ": opt=" + std::to_string(opt) + " lambda=" + std::to_string(prof.lambda));
    // S' = 2*Lambda+1 exceeds the predicted windows here, so also report the Lambda=0 policy
    for (Time guess : {prof.lambda, Time{0}}) {
      const auto rep = simulate(g.instance, *g.predictions, g.matching, guess, 8);
      ratios << " S=" << s << "/S'=" << rep.s_prime << " E=" << to_string(rep.expected_reward)
             << " ratio=" << (rep.ratio ? to_string(*rep.ratio) : std::string("undefined"));
    }
  }
  c.out.detail = c.out.pass ? "opt=N, profile (S,0,1);" + ratios.str() : c.why.str();
  return c.out;
}

Outcome c9_end_to_end() {
  Check c;
  const json params = {{"n", 4}, {"density", 50}, {"max_len", 2}, {"requests", 4},
                       {"wmin", 9}, {"wmax", 14}, {"rmax", 10}, {"pimax", 5}};
  const json suite = {
      {"seed", 900},
      {"trials", 12},
      {"entries",
       json::array({{{"generator", {{"kind", "random"}, {"params", params}}}, {"lambdas", {0, 1, 2}}},
                    {{"generator", {{"kind", "random"}, {"params", params}}},
                     {"lambdas", {0, 1, 2}},
                     {"tau", 2},
                     {"rho", {{"num", 3}, {"den", 2}}},
                     {"seed", 950}}})}};
  const auto res = bench(suite, std::max(1u, std::thread::hardware_concurrency()));
  int conforming = 0;
  Rational worst0(0);
  for (const auto& r : res.rows) {
    if (!r.walks_valid) c.fail("entry " + std::to_string(r.entry) + " seed " + std::to_string(r.seed) + ": invalid walk");
    if (!r.conforming) continue;
    ++conforming;
    if (!r.ratio) {
      c.fail("entry " + std::to_string(r.entry) + " seed " + std::to_string(r.seed) + ": ratio " + r.note);
      continue;
    }
    if (r.profile && r.profile->lambda == 0 && r.profile->tau == 0 && r.profile->rho == Rational(1)) {
      worst0 = std::max(worst0, *r.ratio);
      const Time bound = 6 * 18 * std::max<Time>(1, r.log_min_d_lmax);
      if (*r.ratio > Rational(bound)) c.fail("seed " + std::to_string(r.seed) + ": ratio " + to_string(*r.ratio));
    }
  }
  c.out.detail = c.out.pass ? std::to_string(conforming) + " conforming trials, finite ratios, worst exact-prediction ratio " +
                                  to_string(worst0)
                            : c.why.str();
  return c.out;
}

Outcome c10_many_to_one() {
  Check c;
  SplitMix64 rng(1010);
  int detours = 0, done = 0;
  while (done < 50) {
    ManyToOneParams mp;
    mp.graph.n = static_cast<int>(rng.uniform(3, 5));
    mp.graph.max_len = 1;
    mp.predictions = static_cast<int>(rng.uniform(1, 3));
    mp.max_preimages = 3;
    mp.radius = rng.uniform(0, 2);
    mp.tau = rng.uniform(0, 1);
    const auto m = gen_many_to_one(mp, rng.next());
    const auto& g = m.instance.graph;
    const auto prof = profile(m.instance, m.predictions, m.matching);
    if (2 * prof.lambda > m.predictions.l_min()) continue;
    ++done;
    SimulationConfig cfg;
    cfg.mode = OnlineMode::ManyToOne;
    cfg.run_oracle = false;
    const auto rep = simulate(m.instance, m.predictions, m.matching, prof.lambda, rng.next(), cfg);
    for (const auto& [eps, run] : rep.runs) {
      if (!validate_walk(run.walk, g).empty()) c.fail("invalid many-to-one walk");
      for (const auto& d : run.detour_log) {
        const Vertex home = m.predictions.requests[d.pred_index].vertex;
        Reward single = 0;
        for (auto i : d.candidates)
          if (2 * g.dist(home, m.instance.requests[i].vertex) + 1 <= rep.s_prime)
            single = std::max(single, m.instance.requests[i].reward);
        ++detours;
        if (d.reward < single)
          c.fail("detour at t=" + std::to_string(d.time) + " earned " + std::to_string(d.reward) + " < " +
                 std::to_string(single));
      }
    }

    // induced one-to-one instance: the highest-reward preimage of each prediction
    std::map<std::size_t, std::size_t> pick;
    for (auto [i, j] : m.matching.pairs) {
      const auto it = pick.find(j);
      if (it == pick.end() || m.instance.requests[i].reward > m.instance.requests[it->second].reward) pick[j] = i;
    }
    Instance induced = m.instance;
    induced.requests.clear();
    Matching one;
    one.kind = MatchingKind::OneToOne;
    for (auto [j, i] : pick) {
      one.pairs.emplace_back(induced.requests.size(), j);
      induced.requests.push_back(m.instance.requests[i]);
    }
    const auto ip = profile(induced, m.predictions, one);
    const Time sp = 2 * ip.lambda + 1;
    const auto pred_s = m.predictions.with_service(sp);
    const Rational bound = Rational(reward(offline_solve(pred_s), pred_s)) / (6 * ip.rho);
    if (rep.expected_reward < bound)
      c.fail("instance " + std::to_string(done) + ": E=" + to_string(rep.expected_reward) + " < induced bound " +
             to_string(bound));
  }
  c.out.detail = c.out.pass ? "50 instances, " + std::to_string(detours) +
                                  " detours >= best single request, E >= induced one-to-one bound"
                            : c.why.str();
  return c.out;
}

Outcome c11_oracle_vs_naive() {
  Check c;
  SplitMix64 rng(1011);
  int done = 0;
  while (done < 50) {
    RandomParams p;
    p.n = static_cast<int>(rng.uniform(1, 3));
    p.max_len = 2;
    p.num_requests = static_cast<int>(rng.uniform(0, 3));
    p.service = rng.uniform(0, 2);
    p.window_min = std::max<Time>(1, p.service);
    p.window_max = 4;
    p.release_max = 4;
    if (rng.chance(1, 3)) p.root = 0;
    const auto inst = gen_random(p, rng.next());
    if (inst.horizon() > 8) continue;
    const auto a = opt_twtsp(inst).value, b = reference::naive_opt(inst);
    if (a != b) c.fail("dp " + std::to_string(a) + " naive " + std::to_string(b) + " on " + to_json(inst).dump());
    ++done;
  }
  c.out.detail = c.out.pass ? "50 micro instances agree" : c.why.str();
  return c.out;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      c1_service_gap,   c2_tightness,  c3_zero_service, c4_optima_relation, c5_reachability, c6_online_guarantee,
      c7_offline_ratio, c8_chain,      c9_end_to_end,   c10_many_to_one,    c11_oracle_vs_naive};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %zu: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
