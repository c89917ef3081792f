#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace twtsp;

namespace {

Instance on(const MetricGraph& g, std::vector<Request> reqs) {
  Instance inst;
  inst.graph = g;
  inst.requests = std::move(reqs);
  return inst;
}

}  // namespace

TEST(PairErrors, Identical) {
  const auto g = path_graph(3);
  const Request r{0, 2, 6, 4};
  const auto e = pair_errors(r, r, g);
  EXPECT_EQ(e.loc, 0);
  EXPECT_EQ(e.tw, 0);
  EXPECT_EQ(e.rew, Rational(1));
}

TEST(PairErrors, Substitution) {
  const auto g = build_metric(3, {{0, 1, 2}, {1, 2, 1}});
  const auto e = pair_errors({0, 2, 6, 4}, {1, 3, 5, 2}, g);
  EXPECT_EQ(e.loc, 2);
  EXPECT_EQ(e.tw, 1);
  EXPECT_EQ(e.rew, Rational(2));
}

TEST(Profile, IdentityIsZero) {
  const auto inst = gen_random({}, 3);
  const auto p = profile(inst, inst, identity_matching(inst.requests.size()));
  EXPECT_EQ(p, ErrorProfile{});
}

TEST(Profile, KindAndIndexErrors) {
  const auto g = path_graph(3);
  const auto a = on(g, {{0, 0, 4, 1}, {1, 0, 4, 1}});
  const auto b = on(g, {{0, 0, 4, 1}});
  Matching m;
  m.pairs = {{0, 0}, {1, 5}};
  EXPECT_THROW(profile(a, a, m), Error);
  m.pairs = {{0, 0}};
  try {
    profile(a, b, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::KindMismatch);
  }
  m.pairs = {{0, 0}, {1, 0}};
  EXPECT_THROW(profile(a, a, m), Error);
}

TEST(Profile, PartialDeltas) {
  const auto g = path_graph(3);
  const auto a = on(g, {{0, 0, 4, 3}, {1, 0, 4, 5}});
  const auto b = on(g, {{0, 1, 4, 3}, {2, 0, 4, 7}});
  Matching m;
  m.kind = MatchingKind::Partial;
  m.pairs = {{0, 0}};
  const auto p = profile(a, b, m);
  EXPECT_EQ(p.delta1, 5);
  EXPECT_EQ(p.delta2, 7);
  EXPECT_EQ(p.tau, 1);
  EXPECT_EQ(m.unmatched_true, std::set<std::size_t>{1});
  EXPECT_EQ(m.unmatched_pred, std::set<std::size_t>{1});
}

TEST(Profile, ManyToOneCycleOnStar) {
  // unit star centred at 0 with leaves 1 and 2
  const auto g = build_metric(3, {{0, 1, 1}, {0, 2, 1}});
  const auto a = on(g, {{1, 0, 10, 1}, {2, 0, 10, 1}});
  const auto b = on(g, {{0, 0, 10, 2}});
  Matching m;
  m.kind = MatchingKind::ManyToOne;
  m.pairs = {{0, 0}, {1, 0}};
  // brute force over both visit orders: 1 + idle + 2 + idle + 1 = 6
  Time best = std::numeric_limits<Time>::max();
  for (auto order : reference::permutations(2)) {
    Vertex at = 0;
    Time len = 0;
    for (auto i : order) {
      len += g.dist(at, a.requests[i].vertex) + 1;
      at = a.requests[i].vertex;
    }
    best = std::min(best, len + g.dist(at, 0));
  }
  const auto p = profile(a, b, m);
  EXPECT_EQ(p.lambda, best);
  EXPECT_EQ(p.lambda, 6);
  EXPECT_EQ(p.rho, Rational(1));
}

TEST(BestMatching, IdentityOnEqualLists) {
  const auto inst = gen_random({}, 5);
  const auto m = best_matching(inst, inst);
  EXPECT_EQ(profile(inst, inst, m).lambda, 0);
}

TEST(BestMatching, CrossingOnLine) {
  const auto g = path_graph(6);
  const auto a = on(g, {{0, 0, 4, 1}, {5, 0, 4, 1}});
  const auto b = on(g, {{5, 0, 4, 1}, {0, 0, 4, 1}});
  const auto m = best_matching(a, b);
  EXPECT_EQ(m.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(profile(a, b, m).lambda, 0);
  EXPECT_THROW(best_matching(a, on(g, {{0, 0, 4, 1}})), Error);
}

TEST(BestMatching, BottleneckOptimalAgainstAllPermutations) {
  SplitMix64 rng(21);
  const auto perms5 = reference::permutations(5);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t k = static_cast<std::size_t>(rng.uniform(1, 5));
    RandomParams p;
    p.n = 8;
    p.max_len = 9;
    p.num_requests = static_cast<int>(k);
    const auto a = gen_random(p, rng.next());
    auto b = a;
    for (auto& r : b.requests) r.vertex = static_cast<Vertex>(rng.uniform(0, p.n - 1));
    const auto m = best_matching(a, b);
    const auto got = profile(a, b, m).lambda;
    Length brute = std::numeric_limits<Length>::max();
    std::vector<std::pair<std::size_t, std::size_t>> lexmin;
    for (auto perm : reference::permutations(k)) {
      Matching mm;
      for (std::size_t i = 0; i < k; ++i) mm.pairs.emplace_back(i, perm[i]);
      const auto l = profile(a, b, mm).lambda;
      if (l < brute) {
        brute = l;
        lexmin = mm.pairs;
      }
    }
    ASSERT_EQ(got, brute);
    ASSERT_EQ(m.pairs, lexmin);
  }
}

TEST(Profile, ReindexingInvariance) {
  SplitMix64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = gen_random({}, rng.next());
    const auto ps = perturb_predictions(a, {1, 1, Rational(2)}, rng.next(), false);
    const auto base = profile(a, ps.predictions, ps.matching);
    const std::size_t n = a.requests.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.uniform(0, i - 1))]);
    auto a2 = a, b2 = ps.predictions;
    Matching m2;
    for (std::size_t i = 0; i < n; ++i) {
      a2.requests[i] = a.requests[perm[i]];
      b2.requests[n - 1 - i] = ps.predictions.requests[perm[i]];
      m2.pairs.emplace_back(i, n - 1 - i);
    }
    ASSERT_EQ(profile(a2, b2, m2), base);
  }
}

TEST(Profile, ManyToOneLambdaLowerBound) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    ManyToOneParams p;
    p.radius = 2;
    p.max_preimages = 3;
    const auto m = gen_many_to_one(p, seed);
    const auto prof = profile(m.instance, m.predictions, m.matching);
    ASSERT_EQ(prof.lambda, m.lambda);
    std::map<std::size_t, Length> far;
    for (auto [i, j] : m.matching.pairs)
      far[j] = std::max(far[j], m.instance.graph.dist(m.instance.requests[i].vertex, m.predictions.requests[j].vertex));
    for (auto [j, d] : far) ASSERT_GE(prof.lambda, 1 + 2 * d);
  }
}
