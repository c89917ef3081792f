#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "twtsp/error.hpp"
#include "twtsp/graph.hpp"
#include "twtsp/rational.hpp"

namespace twtsp {

using Reward = std::int64_t;

/// A service request: location, release time, deadline and reward.
struct Request {
  Vertex vertex = 0;
  Time release = 0;
  Time deadline = 1;
  Reward reward = 1;

  Time window() const noexcept { return deadline - release; }

  friend bool operator==(const Request&, const Request&) = default;
};

struct Instance {
  MetricGraph graph;
  std::vector<Request> requests;
  Time service = 1;
  std::optional<Vertex> root;

  Time l_min() const {
    if (requests.empty()) return 0;
    Time m = requests.front().window();
    for (const Request& r : requests) m = std::min(m, r.window());
    return m;
  }

  Time l_max() const {
    Time m = 0;
    for (const Request& r : requests) m = std::max(m, r.window());
    return m;
  }

  Time horizon() const {
    Time h = 0;
    for (const Request& r : requests) h = std::max(h, r.deadline);
    return h;
  }

  Reward total_reward() const {
    Reward s = 0;
    for (const Request& r : requests) s += r.reward;
    return s;
  }

  /// Every request can be reached from the root by its release time.
  bool rooted_reachable() const {
    if (!root) return true;
    return std::all_of(requests.begin(), requests.end(), [&](const Request& r) {
      return graph.dist(*root, r.vertex) <= r.release;
    });
  }

  Instance with_service(Time s) const {
    Instance copy = *this;
    copy.service = s;
    return copy;
  }

  Instance with_root(std::optional<Vertex> v) const {
    Instance copy = *this;
    copy.root = v;
    return copy;
  }
};

/// Lists every model invariant an instance breaks; empty means valid.
inline std::vector<std::string> validate_instance(const Instance& inst) {
  std::vector<std::string> issues;
  if (inst.service < 0) issues.push_back("negative service time");
  if (inst.root && !inst.graph.contains(*inst.root)) issues.push_back("root out of range");
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const Request& r = inst.requests[i];
    const std::string tag = "request " + std::to_string(i) + ": ";
    if (!inst.graph.contains(r.vertex)) issues.push_back(tag + "vertex out of range");
    if (r.release < 0) issues.push_back(tag + "negative release");
    if (r.deadline <= r.release) issues.push_back(tag + "deadline not after release");
    if (r.reward < 1) issues.push_back(tag + "non-positive reward");
  }
  return issues;
}

inline void require_valid(const Instance& inst) {
  auto issues = validate_instance(inst);
  if (!issues.empty()) throw Error(Errc::InvalidRequest, issues.front());
}

// ---------------------------------------------------------------------------
// Walks

struct Move {
  Vertex to = 0;
  /// Recorded travel time; when present it must equal the graph distance.
  std::optional<Time> duration;

  friend bool operator==(const Move&, const Move&) = default;
};

struct Idle {
  Time duration = 1;

  friend bool operator==(const Idle&, const Idle&) = default;
};

using Action = std::variant<Move, Idle>;

struct Walk {
  Vertex start_vertex = 0;
  Time start_time = 0;
  std::vector<Action> actions;

  friend bool operator==(const Walk&, const Walk&) = default;
};

/// A maximal interval [arrive, depart] during which the walk sits at `vertex`.
struct Stay {
  Vertex vertex = 0;
  Time arrive = 0;
  Time depart = 0;
};

struct Violation {
  std::size_t action_index = 0;  // actions.size() for start-of-walk issues
  Time time = 0;
  std::string kind;
};

inline std::vector<Violation> validate_walk(const Walk& walk, const MetricGraph& graph) {
  std::vector<Violation> out;
  const std::size_t none = walk.actions.size();
  if (walk.start_time < 0) out.push_back({none, walk.start_time, "negative start time"});
  if (!graph.contains(walk.start_vertex)) {
    out.push_back({none, walk.start_time, "vertex out of range"});
    return out;
  }
  Vertex at = walk.start_vertex;
  Time t = walk.start_time;
  for (std::size_t i = 0; i < walk.actions.size(); ++i) {
    if (const auto* mv = std::get_if<Move>(&walk.actions[i])) {
      if (!graph.contains(mv->to)) {
        out.push_back({i, t, "vertex out of range"});
        continue;
      }
      const Time d = graph.dist(at, mv->to);
      if (mv->duration && *mv->duration != d) out.push_back({i, t, "move duration mismatch"});
      t += d;
      at = mv->to;
    } else {
      const auto& idle = std::get<Idle>(walk.actions[i]);
      if (idle.duration <= 0) out.push_back({i, t, "non-positive idle"});
      else t += idle.duration;
    }
  }
  return out;
}

inline void require_feasible(const Walk& walk, const MetricGraph& graph) {
  auto v = validate_walk(walk, graph);
  if (!v.empty()) {
    throw Error(Errc::InfeasibleWalk, v.front().kind + " at action " +
                                          std::to_string(v.front().action_index) + ", t=" +
                                          std::to_string(v.front().time));
  }
}

/// Maximal stays of a feasible walk, in time order.
inline std::vector<Stay> stays(const Walk& walk, const MetricGraph& graph) {
  std::vector<Stay> out;
  Stay cur{walk.start_vertex, walk.start_time, walk.start_time};
  for (const Action& a : walk.actions) {
    if (const auto* mv = std::get_if<Move>(&a)) {
      if (mv->to == cur.vertex) continue;
      out.push_back(cur);
      const Time arrive = cur.depart + graph.dist(cur.vertex, mv->to);
      cur = Stay{mv->to, arrive, arrive};
    } else {
      cur.depart += std::get<Idle>(a).duration;
    }
  }
  out.push_back(cur);
  return out;
}

inline Time end_time(const Walk& walk, const MetricGraph& graph) {
  return stays(walk, graph).back().depart;
}

struct CoverageReport {
  std::set<std::size_t> covered;
  Reward reward = 0;
  std::map<std::size_t, Time> service_starts;
};

/// Earliest service start of `req` inside `stay` under service time `s`.
inline std::optional<Time> service_start_in(const Stay& stay, const Request& req, Time s) {
  if (stay.vertex != req.vertex) return std::nullopt;
  const Time tau = std::max(stay.arrive, req.release);
  if (s == 0) {
    if (tau <= std::min(stay.depart, req.deadline)) return tau;
    return std::nullopt;
  }
  if (tau + s <= stay.depart && tau + s <= req.deadline) return tau;
  return std::nullopt;
}

/// Requests the walk covers when each needs `s` consecutive idle steps
/// inside its window (s = 0 means being present at some time in the window).
inline CoverageReport coverage(const Walk& walk, const MetricGraph& graph,
                               const std::vector<Request>& requests, Time s) {
  require_feasible(walk, graph);
  CoverageReport rep;
  const auto st = stays(walk, graph);
  for (std::size_t i = 0; i < requests.size(); ++i) {
    for (const Stay& stay : st) {
      if (auto tau = service_start_in(stay, requests[i], s)) {
        rep.covered.insert(i);
        rep.service_starts[i] = *tau;
        rep.reward += requests[i].reward;
        break;
      }
    }
  }
  return rep;
}

inline CoverageReport coverage(const Walk& walk, const Instance& inst) {
  return coverage(walk, inst.graph, inst.requests, inst.service);
}

inline Reward reward(const Walk& walk, const Instance& inst) {
  return coverage(walk, inst).reward;
}

/// Appends actions while tracking position and clock. Consecutive idles are
/// merged and zero-length actions dropped.
class WalkBuilder {
 public:
  WalkBuilder(const MetricGraph& graph, Vertex start, Time start_time) : graph_(&graph) {
    walk_.start_vertex = start;
    walk_.start_time = start_time;
    at_ = start;
    now_ = start_time;
  }

  Vertex at() const noexcept { return at_; }
  Time now() const noexcept { return now_; }

  WalkBuilder& move(Vertex to) {
    if (to == at_) return *this;
    walk_.actions.push_back(Move{to, std::nullopt});
    now_ += graph_->dist(at_, to);
    at_ = to;
    return *this;
  }

  WalkBuilder& idle(Time k) {
    if (k <= 0) return *this;
    if (!walk_.actions.empty()) {
      if (auto* last = std::get_if<Idle>(&walk_.actions.back())) {
        last->duration += k;
        now_ += k;
        return *this;
      }
    }
    walk_.actions.push_back(Idle{k});
    now_ += k;
    return *this;
  }

  WalkBuilder& idle_until(Time t) { return idle(t - now_); }

  const Walk& walk() const noexcept { return walk_; }
  Walk build() const { return walk_; }

 private:
  const MetricGraph* graph_;
  Walk walk_;
  Vertex at_ = 0;
  Time now_ = 0;
};

// ---------------------------------------------------------------------------
// Random rewards

/// Discrete reward distribution: (value, probability) pairs.
using RewardDistribution = std::vector<std::pair<Reward, Rational>>;

struct ExpectedRewardInstance {
  Instance instance;
  /// Every reward in `instance` equals scale * E[reward].
  std::int64_t scale = 1;
};

/// Replaces random rewards by their expectations. Expectations are scaled by
/// the lcm of their denominators so rewards stay integral; a common scale
/// leaves every walk ranking and reward ratio unchanged.
inline ExpectedRewardInstance expected_reward_instance(const Instance& inst,
                                                       const std::vector<RewardDistribution>& dists) {
  if (dists.size() != inst.requests.size())
    throw Error(Errc::SizeMismatch, "one distribution per request required");
  std::vector<Rational> means;
  std::int64_t scale = 1;
  for (const auto& d : dists) {
    Rational mean(0), mass(0);
    for (const auto& [value, p] : d) {
      if (p < 0) throw Error(Errc::InvalidParams, "negative probability");
      mean += p * value;
      mass += p;
    }
    if (mass != 1) throw Error(Errc::InvalidParams, "probabilities must sum to 1");
    if (mean <= 0) throw Error(Errc::InvalidParams, "expected reward must be positive");
    means.push_back(mean);
    scale = std::lcm(scale, mean.denominator());
  }
  ExpectedRewardInstance out{inst, scale};
  for (std::size_t i = 0; i < means.size(); ++i)
    out.instance.requests[i].reward = boost::rational_cast<Reward>(means[i] * scale);
  return out;
}

}  // namespace twtsp
