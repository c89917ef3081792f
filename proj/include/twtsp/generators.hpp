#pragma once

// Instance factories: seeded random instances, controlled prediction
// perturbation, many-to-one prediction sets and the adversarial families.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "twtsp/error.hpp"
#include "twtsp/graph.hpp"
#include "twtsp/matching.hpp"
#include "twtsp/model.hpp"
#include "twtsp/rational.hpp"
#include "twtsp/rng.hpp"

namespace twtsp {

using ParamMap = std::map<std::string, std::int64_t>;

inline std::int64_t param(const ParamMap& p, const std::string& key, std::int64_t fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

// ---------------------------------------------------------------------------
// Random instances

struct RandomParams {
  int n = 5;
  int edge_density_pct = 30;  // chance of each non-tree edge, in percent
  Length max_len = 3;
  int num_requests = 4;
  Time window_min = 2;
  Time window_max = 6;
  /// When set, windows are drawn in [a*D, b*D] instead of the fixed range.
  std::optional<std::pair<Time, Time>> window_in_diameters;
  Reward reward_min = 1;
  Reward reward_max = 5;
  Time service = 1;
  Time release_max = 10;
  std::optional<Vertex> root;

  static RandomParams from(const ParamMap& p) {
    RandomParams r;
    r.n = static_cast<int>(param(p, "n", r.n));
    r.edge_density_pct = static_cast<int>(param(p, "density", r.edge_density_pct));
    r.max_len = param(p, "max_len", r.max_len);
    r.num_requests = static_cast<int>(param(p, "requests", r.num_requests));
    r.window_min = param(p, "wmin", r.window_min);
    r.window_max = param(p, "wmax", r.window_max);
    if (p.count("wmin_d") || p.count("wmax_d")) r.window_in_diameters = {param(p, "wmin_d", 4), param(p, "wmax_d", 8)};
    r.reward_min = param(p, "pimin", r.reward_min);
    r.reward_max = param(p, "pimax", r.reward_max);
    r.service = param(p, "S", r.service);
    r.release_max = param(p, "rmax", r.release_max);
    if (p.count("root")) r.root = static_cast<Vertex>(param(p, "root", 0));
    return r;
  }
};

inline MetricGraph random_graph(int n, int density_pct, Length max_len, SplitMix64& rng) {
  if (n < 1) throw Error(Errc::InvalidParams, "n must be at least 1");
  if (max_len < 1) throw Error(Errc::InvalidParams, "max_len must be at least 1");
  std::vector<Edge> edges;
  std::set<std::pair<Vertex, Vertex>> have;
  for (Vertex v = 1; v < n; ++v) {
    const auto u = static_cast<Vertex>(rng.uniform(0, v - 1));
    edges.push_back({u, v, rng.uniform(1, max_len)});
    have.insert({u, v});
  }
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) {
      if (have.count({u, v})) continue;
      if (rng.chance(static_cast<std::uint64_t>(std::clamp(density_pct, 0, 100)), 100))
        edges.push_back({u, v, rng.uniform(1, max_len)});
    }
  return MetricGraph(n, std::move(edges));
}

/// Deterministic in (params, seed). Rooted instances get releases no
/// earlier than the root distance.
inline Instance gen_random(const RandomParams& p, std::uint64_t seed) {
  SplitMix64 rng(seed);
  if (p.num_requests < 0 || p.release_max < 0 || p.reward_min < 1 || p.reward_max < p.reward_min || p.service < 0)
    throw Error(Errc::InvalidParams, "bad request parameters");
  Instance inst;
  inst.graph = random_graph(p.n, p.edge_density_pct, p.max_len, rng);
  inst.service = p.service;
  inst.root = p.root;
  if (p.root && !inst.graph.contains(*p.root)) throw Error(Errc::InvalidParams, "root out of range");
  Time wmin = p.window_min, wmax = p.window_max;
  if (p.window_in_diameters) {
    const Time d = std::max<Length>(1, inst.graph.diameter());
    wmin = p.window_in_diameters->first * d;
    wmax = p.window_in_diameters->second * d;
  }
  if (wmin < 1 || wmax < wmin) throw Error(Errc::InvalidParams, "bad window range");
  if (wmin < p.service) throw Error(Errc::InvalidParams, "window minimum below the service time");
  for (int i = 0; i < p.num_requests; ++i) {
    Request r;
    r.vertex = static_cast<Vertex>(rng.uniform(0, p.n - 1));
    r.release = rng.uniform(0, p.release_max);
    if (p.root) r.release = std::max<Time>(r.release, inst.graph.dist(*p.root, r.vertex));
    r.deadline = r.release + rng.uniform(wmin, wmax);
    r.reward = rng.uniform(p.reward_min, p.reward_max);
    inst.requests.push_back(r);
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Prediction perturbation

struct PerturbTargets {
  Length lambda = 0;
  Time tau = 0;
  Rational rho{1};
};

struct PredictionSet {
  Instance predictions;
  Matching matching;
};

/// The predicted copy of each request moves to a vertex within `lambda`,
/// shifts each window end by at most `tau` and scales its reward by a
/// factor in [1/rho, rho]. With `conforming` set, the targets must satisfy
/// 4*lambda+1 <= l_min and 2*tau <= l_min, and predicted windows never drop
/// below l_min (shortest windows shift rigidly) so both sequences share l_min.
inline PredictionSet perturb_predictions(const Instance& inst, const PerturbTargets& t, std::uint64_t seed,
                                         bool conforming) {
  if (t.lambda < 0 || t.tau < 0 || t.rho < 1) throw Error(Errc::InvalidParams, "bad perturbation targets");
  const Time lmin = inst.l_min();
  if (conforming && !inst.requests.empty() && (4 * t.lambda + 1 > lmin || 2 * t.tau > lmin))
    throw Error(Errc::TargetsViolateAssumptions, "lambda=" + std::to_string(t.lambda) + " tau=" +
                                                     std::to_string(t.tau) + " with l_min=" + std::to_string(lmin));
  SplitMix64 rng(seed);
  PredictionSet out{inst, identity_matching(inst.requests.size())};
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const Request& r = inst.requests[i];
    Request& q = out.predictions.requests[i];
    std::vector<Vertex> near;
    for (Vertex v = 0; v < inst.graph.size(); ++v)
      if (inst.graph.dist(r.vertex, v) <= t.lambda) near.push_back(v);
    q.vertex = near[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(near.size()) - 1))];

    const Time dr = rng.uniform(-t.tau, t.tau);
    const Time dd = rng.uniform(-t.tau, t.tau);
    if (conforming && r.window() == lmin) {
      const Time shift = std::max(dr, -r.release);
      q.release = r.release + shift;
      q.deadline = r.deadline + shift;
    } else {
      q.release = std::max<Time>(0, r.release + dr);
      q.deadline = std::max(r.deadline + dd, q.release + (conforming ? lmin : 1));
    }

    const Rational low = Rational(r.reward) / t.rho;
    const Reward lo = std::max<Reward>(1, (low.numerator() + low.denominator() - 1) / low.denominator());
    Reward hi = boost::rational_cast<Reward>(Rational(r.reward) * t.rho);
    hi = std::max(hi, lo);
    q.reward = rng.uniform(lo, hi);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Adversarial families

enum class LbKind { ChainPredictions, ChainZeroService, UniformNoPredictions, LineServiceGap, LineZeroServiceGap };

inline std::string to_string(LbKind k) {
  switch (k) {
    case LbKind::ChainPredictions: return "chain";
    case LbKind::ChainZeroService: return "chain0";
    case LbKind::UniformNoPredictions: return "uniform";
    case LbKind::LineServiceGap: return "line-service";
    case LbKind::LineZeroServiceGap: return "line0";
  }
  return "?";
}

inline std::optional<LbKind> parse_lb_kind(const std::string& s) {
  for (LbKind k : {LbKind::ChainPredictions, LbKind::ChainZeroService, LbKind::UniformNoPredictions,
                   LbKind::LineServiceGap, LbKind::LineZeroServiceGap})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct GeneratedInstance {
  Instance instance;
  std::optional<Instance> predictions;
  std::optional<Matching> matching;
};

namespace detail {

/// N clusters of C vertices: complete inside a cluster with length S, and
/// complete bipartite between consecutive clusters with length K*S.
/// Vertex c of cluster i has id i*C + c.
inline MetricGraph chain_graph(Length s, Length k, int c, int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int a = 0; a < c; ++a)
      for (int b = a + 1; b < c; ++b) edges.push_back({i * c + a, i * c + b, s});
    if (i + 1 < n)
      for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b) edges.push_back({i * c + a, (i + 1) * c + b, k * s});
  }
  return MetricGraph(n * c, std::move(edges));
}

inline GeneratedInstance chain(const ParamMap& p, std::uint64_t seed, bool zero_service) {
  const Length s = param(p, "S", 1), k = param(p, "K", 2);
  const int c = static_cast<int>(param(p, "C", 3)), n = static_cast<int>(param(p, "N", 4));
  if (s < 1 || k < 1 || n < 1) throw Error(Errc::InvalidParams, "chain needs S, K, N >= 1");
  if (c < 2) throw Error(Errc::InvalidParams, "chain needs C >= 2 so predictions can miss");
  SplitMix64 rng(seed);
  GeneratedInstance out;
  out.instance.graph = chain_graph(s, k, c, n);
  out.instance.service = zero_service ? 0 : 1;
  Instance pred = out.instance;
  bool missed = false;
  for (int i = 0; i < n; ++i) {
    const auto a = static_cast<Vertex>(i * c + rng.uniform(0, c - 1));
    auto b = static_cast<Vertex>(i * c + rng.uniform(0, c - 1));
    if (i == n - 1 && !missed && a == b) b = static_cast<Vertex>(i * c + (a - i * c + 1) % c);
    missed = missed || a != b;
    const Time r = zero_service ? i * k * s : i * (k * s + 1);
    const Time d = zero_service ? (i + 1) * k * s - 1 : r + k * s;
    out.instance.requests.push_back({a, r, d, 1});
    pred.requests.push_back({b, r, d, 1});
  }
  out.predictions = std::move(pred);
  out.matching = identity_matching(static_cast<std::size_t>(n));
  return out;
}

}  // namespace detail

/// Builds one adversarial family member. Parameter keys:
///   chain, chain0: S, K, C, N
///   uniform:       n, N, L, D
///   line-service:  S, L (rooted at vertex 0)
///   line0:         D, L
inline GeneratedInstance gen_lb(LbKind kind, const ParamMap& p, std::uint64_t seed) {
  switch (kind) {
    case LbKind::ChainPredictions: return detail::chain(p, seed, false);
    case LbKind::ChainZeroService: return detail::chain(p, seed, true);
    case LbKind::UniformNoPredictions: {
      const int n = static_cast<int>(param(p, "n", 3));
      const int count = static_cast<int>(param(p, "N", 4));
      const Length d = param(p, "D", 2);
      const Time l = param(p, "L", d);
      if (n < 1 || count < 0 || d < 1 || l < 1) throw Error(Errc::InvalidParams, "uniform needs n, D, L >= 1");
      SplitMix64 rng(seed);
      GeneratedInstance out;
      out.instance.graph = uniform_complete_graph(n, d);
      out.instance.service = 1;
      for (int i = 1; i <= count; ++i) {
        const auto v = static_cast<Vertex>(rng.uniform(0, n - 1));
        out.instance.requests.push_back({v, (2 * i - 1) * d, (2 * i - 1) * d + l, 1});
      }
      return out;
    }
    case LbKind::LineServiceGap: {
      const Time s = param(p, "S", 2), l = param(p, "L", 4);
      if (s < 2) throw Error(Errc::InvalidParams, "line-service needs S >= 2");
      const Length alpha = l + 1 - 2 * s;
      if (alpha < 1) throw Error(Errc::InvalidParams, "line-service needs L+1-2S >= 1");
      const int n = static_cast<int>(2 * s - 1);
      GeneratedInstance out;
      out.instance.graph = path_graph(n, alpha);
      out.instance.service = s;
      out.instance.root = 0;
      out.instance.requests.push_back({0, 0, l, 1});
      for (int i = 1; i < n; ++i) {
        const Time d = i * alpha + 2 * s - 1;
        out.instance.requests.push_back({i, d - l, d, 1});
      }
      return out;
    }
    case LbKind::LineZeroServiceGap: {
      const Length d = param(p, "D", 3);
      const Time l = param(p, "L", 2);
      if (l < 1 || l > d) throw Error(Errc::InvalidParams, "line0 needs 1 <= L <= D");
      GeneratedInstance out;
      out.instance.graph = path_graph(static_cast<int>(d + 1), 1);
      out.instance.service = 0;
      for (Vertex i = 0; i <= d; ++i) out.instance.requests.push_back({i, i, l + i, 1});
      return out;
    }
  }
  throw Error(Errc::InvalidParams, "unknown kind");
}

// ---------------------------------------------------------------------------
// Many-to-one prediction sets

struct ManyToOneParams {
  RandomParams graph;     // only n, density and max_len are used
  int predictions = 3;
  int max_preimages = 2;
  Length radius = 1;      // preimage distance from its prediction
  Time tau = 0;
  Time extra_window = 4;  // slack added on top of the minimum window
  Time release_max = 8;
};

struct ManyToOneInstance {
  Instance instance;
  Instance predictions;
  Matching matching;
  Length lambda = 0;
};

/// Each prediction receives 1..max_preimages true requests within `radius`.
/// Predicted rewards equal the preimage total; windows are at least twice
/// the resulting cycle error plus 2*tau so the error stays below l_min / 2.
inline ManyToOneInstance gen_many_to_one(const ManyToOneParams& p, std::uint64_t seed) {
  if (p.predictions < 0 || p.max_preimages < 1 || p.radius < 0 || p.tau < 0)
    throw Error(Errc::InvalidParams, "bad many-to-one parameters");
  SplitMix64 rng(seed);
  ManyToOneInstance out;
  out.instance.graph = random_graph(p.graph.n, p.graph.edge_density_pct, p.graph.max_len, rng);
  out.instance.service = 1;
  out.predictions.graph = out.instance.graph;
  out.predictions.service = 1;
  out.matching.kind = MatchingKind::ManyToOne;
  const MetricGraph& g = out.instance.graph;

  struct Draft {
    Vertex pv;
    std::vector<std::pair<Vertex, Reward>> pre;
  };
  std::vector<Draft> drafts;
  for (int j = 0; j < p.predictions; ++j) {
    Draft d;
    d.pv = static_cast<Vertex>(rng.uniform(0, g.size() - 1));
    std::vector<Vertex> near;
    for (Vertex v = 0; v < g.size(); ++v)
      if (g.dist(d.pv, v) <= p.radius) near.push_back(v);
    const auto k = rng.uniform(1, p.max_preimages);
    for (std::int64_t x = 0; x < k; ++x) {
      const Vertex v = near[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(near.size()) - 1))];
      d.pre.emplace_back(v, rng.uniform(1, 5));
    }
    std::vector<Target> targets;
    for (const auto& [v, r] : d.pre) targets.push_back({v, r, 1, std::nullopt});
    out.lambda = std::max(out.lambda, *min_service_cycle(g, targets, d.pv));
    drafts.push_back(std::move(d));
  }
  const Time base = 2 * out.lambda + 2 * p.tau;
  for (std::size_t j = 0; j < drafts.size(); ++j) {
    const Time r = rng.uniform(p.tau, p.tau + p.release_max);
    const Time w = rng.uniform(std::max<Time>(base, 1), std::max<Time>(base, 1) + p.extra_window);
    Reward total = 0;
    for (const auto& [v, pi] : drafts[j].pre) {
      const Time shift = rng.uniform(-p.tau, p.tau);
      out.matching.pairs.emplace_back(out.instance.requests.size(), j);
      out.instance.requests.push_back({v, r + shift, r + shift + w, pi});
      total += pi;
    }
    out.predictions.requests.push_back({drafts[j].pv, r, r + w, total});
  }
  return out;
}

}  // namespace twtsp
