#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace twtsp;

namespace {

void expect_consistent(const OracleResult& res, const Instance& inst) {
  ASSERT_TRUE(res.walk.has_value());
  ASSERT_TRUE(validate_walk(*res.walk, inst.graph).empty());
  EXPECT_EQ(reward(*res.walk, inst), res.value);
  if (inst.root) {
    EXPECT_EQ(res.walk->start_vertex, *inst.root);
    EXPECT_EQ(res.walk->start_time, 0);
  }
}

}  // namespace

TEST(OptTwtsp, SitAndServe) {
  Instance inst;
  inst.requests = {{0, 0, 2, 7}};
  const auto res = opt_twtsp(inst);
  EXPECT_EQ(res.value, 7);
  expect_consistent(res, inst);
}

TEST(OptTwtsp, LineServiceGapInstance) {
  Instance inst;
  inst.graph = path_graph(3);
  inst.root = 0;
  inst.requests = {{0, 0, 4, 1}, {1, 0, 4, 1}, {2, 1, 5, 1}};
  inst.service = 2;
  EXPECT_EQ(opt_twtsp(inst).value, 1);
  inst.service = 1;
  const auto res = opt_twtsp(inst);
  EXPECT_EQ(res.value, 3);
  expect_consistent(res, inst);
}

TEST(OptTwtsp, LineZeroServiceInstance) {
  Instance inst;
  inst.graph = path_graph(4);
  for (Vertex i = 0; i < 4; ++i) inst.requests.push_back({i, i, i + 2, 1});
  inst.service = 0;
  EXPECT_EQ(opt_twtsp(inst).value, 4);
  inst.service = 1;
  EXPECT_EQ(opt_twtsp(inst).value, 2);
}

TEST(OptTwtsp, BudgetExceededReportsRequirement) {
  Instance inst = gen_random({}, 1);
  try {
    opt_twtsp(inst, 10);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_EQ(e.code(), Errc::StateBudgetExceeded);
    EXPECT_EQ(e.required(), twtsp_state_count(inst));
    EXPECT_EQ(e.budget(), 10u);
  }
}

TEST(OptTwtsp, AgreesWithNaiveEnumeration) {
  SplitMix64 rng(31);
  int done = 0;
  while (done < 60) {
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
    const auto res = opt_twtsp(inst);
    ASSERT_EQ(res.value, reference::naive_opt(inst)) << to_json(inst).dump();
    expect_consistent(res, inst);
    ++done;
  }
}

TEST(OptTwtsp, MonotoneInServiceTimeAndServiceGap) {
  SplitMix64 rng(32);
  for (int trial = 0; trial < 40; ++trial) {
    RandomParams p;
    p.n = static_cast<int>(rng.uniform(1, 5));
    p.num_requests = static_cast<int>(rng.uniform(1, 4));
    p.window_min = 3;
    p.window_max = 6;
    p.release_max = 6;
    const auto inst = gen_random(p, rng.next());
    Reward prev = std::numeric_limits<Reward>::max();
    Reward unit = 0;
    for (Time s = 0; s <= inst.l_min(); ++s) {
      const auto v = opt_twtsp(inst.with_service(s)).value;
      ASSERT_LE(v, prev);
      prev = v;
      if (s == 1) unit = v;
      if (s >= 1) {
        ASSERT_GE(Rational(v), Rational(unit, 2 * s - 1));
      }
    }
  }
}

TEST(Orienteering, BudgetZero) {
  const auto g = path_graph(3);
  std::vector<Target> t{{1, 4, 0, std::nullopt}, {0, 3, 0, std::nullopt}};
  EXPECT_EQ(orienteering_exact(g, t, 0, 0, TourMode::Path).value, 3);
  t[1].service = 1;
  EXPECT_EQ(orienteering_exact(g, t, 0, 0, TourMode::Path).value, 0);
}

TEST(Orienteering, PathAndCycleOnUnitPath) {
  const auto g = path_graph(3);
  const std::vector<Target> t{{0, 1, 0, std::nullopt}, {1, 2, 0, std::nullopt}, {2, 5, 0, std::nullopt}};
  const auto path = orienteering_exact(g, t, 0, 2, TourMode::Path);
  EXPECT_EQ(path.value, 8);
  EXPECT_TRUE(validate_walk(path.walk, g).empty());
  const auto cycle = orienteering_exact(g, t, 0, 2, TourMode::Cycle);
  EXPECT_EQ(cycle.value, 3);
  EXPECT_EQ(end_time(cycle.walk, g), cycle.length);
  EXPECT_EQ(stays(cycle.walk, g).back().vertex, 0);
}

TEST(Orienteering, TooManyTargets) {
  std::vector<Target> t(16, Target{0, 1, 0, std::nullopt});
  EXPECT_THROW(orienteering_exact(MetricGraph(), t, 0, 5, TourMode::Path), Error);
}

TEST(Orienteering, MatchesBruteForceAndPathDominatesCycle) {
  SplitMix64 rng(33);
  for (int trial = 0; trial < 80; ++trial) {
    const auto g = random_graph(static_cast<int>(rng.uniform(1, 6)), 40, 3, rng);
    const std::size_t k = static_cast<std::size_t>(rng.uniform(0, 5));
    std::vector<Target> t;
    for (std::size_t i = 0; i < k; ++i) {
      Target x{static_cast<Vertex>(rng.uniform(0, g.size() - 1)), rng.uniform(1, 6), rng.uniform(0, 2), std::nullopt};
      if (rng.chance(1, 3)) x.latest_start = rng.uniform(0, 8);
      t.push_back(x);
    }
    const Vertex root = static_cast<Vertex>(rng.uniform(0, g.size() - 1));
    const Time budget = rng.uniform(0, 12);
    for (auto mode : {TourMode::Path, TourMode::Cycle}) {
      Reward brute = 0;
      for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
        std::vector<std::size_t> ids;
        for (std::size_t i = 0; i < k; ++i)
          if (mask >> i & 1) ids.push_back(i);
        std::sort(ids.begin(), ids.end());
        bool ok = false;
        do {
          Vertex at = root;
          Time now = 0;
          bool fine = true;
          for (auto i : ids) {
            now += g.dist(at, t[i].vertex);
            if (t[i].latest_start && now > *t[i].latest_start) fine = false;
            now += t[i].service;
            at = t[i].vertex;
          }
          if (mode == TourMode::Cycle) now += g.dist(at, root);
          ok = ok || (fine && now <= budget);
        } while (!ok && std::next_permutation(ids.begin(), ids.end()));
        if (!ok) continue;
        Reward sum = 0;
        for (std::size_t i = 0; i < k; ++i)
          if (mask >> i & 1) sum += t[i].reward;
        brute = std::max(brute, sum);
      }
      const auto res = orienteering_exact(g, t, root, budget, mode);
      ASSERT_EQ(res.value, brute);
      ASSERT_LE(res.length, budget);
      ASSERT_TRUE(validate_walk(res.walk, g).empty());
      const auto greedy = orienteering_greedy(g, t, root, budget, mode);
      ASSERT_LE(greedy.value, res.value);
      ASSERT_LE(greedy.length, budget);
    }
    ASSERT_GE(orienteering_exact(g, t, root, budget, TourMode::Path).value,
              orienteering_exact(g, t, root, budget, TourMode::Cycle).value);
  }
}

TEST(Jobs, Examples) {
  auto one = job_scheduling({{0, 4, 2, 3}}, JobMode::Exact);
  EXPECT_EQ(one.value, 3);
  ASSERT_EQ(one.schedule.size(), 1u);
  EXPECT_EQ(one.schedule[0].second, 0);
  EXPECT_EQ(job_scheduling({{0, 4, 2, 3}, {0, 4, 2, 5}}, JobMode::Exact).value, 8);
  EXPECT_EQ(job_scheduling({{0, 2, 2, 3}, {0, 2, 2, 5}}, JobMode::Exact).value, 5);
  EXPECT_EQ(job_scheduling({{0, 2, 2, 3}, {0, 2, 2, 5}}, JobMode::LocalRatio).value, 5);
  EXPECT_THROW(job_scheduling(std::vector<Job>(16, Job{0, 40, 1, 1}), JobMode::Exact), Error);
}

TEST(Jobs, LocalRatioWithinFactorTwoAndFeasible) {
  SplitMix64 rng(34);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Job> jobs;
    const auto k = rng.uniform(0, 7);
    for (std::int64_t i = 0; i < k; ++i) {
      const Time r = rng.uniform(0, 10), p = rng.uniform(1, 4);
      jobs.push_back({r, r + rng.uniform(0, 8), p, rng.uniform(1, 9)});
    }
    const auto exact = job_scheduling(jobs, JobMode::Exact);
    const auto lr = job_scheduling(jobs, JobMode::LocalRatio);
    ASSERT_GE(2 * lr.value, exact.value);
    ASSERT_LE(lr.value, exact.value);
    for (const auto* res : {&exact, &lr}) {
      Time busy = std::numeric_limits<Time>::min();
      Reward sum = 0;
      std::set<std::size_t> seen;
      for (auto [j, t] : res->schedule) {
        ASSERT_TRUE(seen.insert(j).second);
        ASSERT_GE(t, jobs[j].release);
        ASSERT_LE(t + jobs[j].processing, jobs[j].deadline);
        ASSERT_GE(t, busy);
        busy = t + jobs[j].processing;
        sum += jobs[j].reward;
      }
      ASSERT_EQ(sum, res->value);
    }
  }
}
