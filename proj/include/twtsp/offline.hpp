#pragma once

// Offline approximation pipeline: service thinning, aligned phases, the
// window-class scheme for short windows, pendant-vertex service augmentation,
// the large-service scheduling reduction and the dispatcher tying them up.

#include <algorithm>
#include <bit>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "twtsp/error.hpp"
#include "twtsp/graph.hpp"
#include "twtsp/model.hpp"
#include "twtsp/oracle.hpp"

namespace twtsp {

struct OfflineConfig {
  OrienteeringSolver solver = OrienteeringSolver::Exact;
};

// ---------------------------------------------------------------------------
// Greedy service builder

/// One stop of a service plan: requests served back to back (or in one
/// shared block when `shared` is set) at a common vertex.
struct ServiceGroup {
  std::vector<std::size_t> requests;
};

/// Serves groups in order, each request as early as its window allows.
/// Groups (or single requests) that can no longer be served are skipped
/// without moving. The walk starts at `start` at time 0; without a start it
/// begins at the first servable request's vertex.
inline Walk serve_groups(const MetricGraph& g, const std::vector<Request>& reqs, Time s,
                         const std::vector<ServiceGroup>& groups, std::optional<Vertex> start, bool shared) {
  auto first_vertex = [&]() -> Vertex {
    for (const auto& grp : groups)
      for (std::size_t i : grp.requests) return reqs[i].vertex;
    return 0;
  };
  WalkBuilder b(g, start.value_or(first_vertex()), 0);
  for (const auto& grp : groups) {
    if (grp.requests.empty()) continue;
    const Vertex v = reqs[grp.requests.front()].vertex;
    const Time arrive = b.now() + g.dist(b.at(), v);
    if (shared) {
      Time lo = -1, hi = -1;
      for (std::size_t i : grp.requests) {
        const Time x = std::max(arrive, reqs[i].release);
        if (x + s > reqs[i].deadline) continue;
        lo = lo < 0 ? x : std::min(lo, x);
        hi = std::max(hi, x + s);
      }
      if (lo < 0) continue;
      b.move(v);
      b.idle_until(lo);
      b.idle_until(hi);
    } else {
      bool moved = false;
      for (std::size_t i : grp.requests) {
        const Time from = moved ? b.now() : arrive;
        const Time x = std::max(from, reqs[i].release);
        if (x + s > reqs[i].deadline) continue;
        b.move(v);
        moved = true;
        b.idle_until(x);
        b.idle(s);
      }
    }
  }
  return b.build();
}

/// Sequential service of single requests in the given order.
inline Walk serve_in_order(const MetricGraph& g, const std::vector<Request>& reqs, Time s,
                           const std::vector<std::size_t>& order, std::optional<Vertex> start) {
  std::vector<ServiceGroup> groups;
  for (std::size_t i : order) groups.push_back({{i}});
  return serve_groups(g, reqs, s, groups, start, false);
}

/// Walk that sits on `v` from time 0 to the horizon.
inline Walk stay_put(const Instance& inst, Vertex v) {
  WalkBuilder b(inst.graph, v, 0);
  b.idle(inst.horizon());
  return b.build();
}

// ---------------------------------------------------------------------------
// Thinning

/// Converts a unit-service walk into one serving each request for
/// `target_s` steps. Covered requests are grouped by their unit service
/// step, the groups split into 2S-1 residue classes, and each class is
/// re-served with one idle block per group. The best class is returned.
inline Walk thin_walk(const Walk& walk, const Instance& inst, Time target_s) {
  if (target_s <= 1) return walk;
  if (target_s > inst.l_min())
    throw Error(Errc::ServiceExceedsWindow,
                "service " + std::to_string(target_s) + " exceeds l_min " + std::to_string(inst.l_min()));
  const auto cov = coverage(walk, inst.graph, inst.requests, 1);
  std::map<Time, std::vector<std::size_t>> by_step;
  for (const auto& [i, tau] : cov.service_starts) by_step[tau].push_back(i);
  std::vector<ServiceGroup> groups;
  for (auto& [tau, ids] : by_step) groups.push_back({ids});

  const Time classes = 2 * target_s - 1;
  std::optional<Walk> best;
  Reward best_reward = -1;
  for (Time c = 0; c < classes; ++c) {
    std::vector<ServiceGroup> picked;
    for (std::size_t k = static_cast<std::size_t>(c); k < groups.size(); k += static_cast<std::size_t>(classes))
      picked.push_back(groups[k]);
    Walk w = serve_groups(inst.graph, inst.requests, target_s, picked, std::nullopt, true);
    const Reward r = coverage(w, inst.graph, inst.requests, target_s).reward;
    if (r > best_reward) {
      best_reward = r;
      best = std::move(w);
    }
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Service augmentation

struct AugmentedInstance {
  Instance instance;            // zero service on the augmented graph
  std::vector<Vertex> pendant;  // pendant vertex of each request
  int original_n = 0;
};

/// Doubles every edge and hangs one pendant vertex per request at distance
/// S from its location; the request moves to the pendant with window
/// [2r+S, 2d-S] and zero service.
inline AugmentedInstance augment_service(const Instance& inst) {
  const Time s = inst.service;
  const Length d = inst.graph.diameter();
  if (s < 1) throw Error(Errc::InvalidParams, "augmentation needs service >= 1");
  if (s > d)
    throw Error(Errc::ServiceExceedsDiameter,
                "service " + std::to_string(s) + " exceeds diameter " + std::to_string(d));
  const int n = inst.graph.size();
  std::vector<Edge> edges;
  for (const Edge& e : inst.graph.edges()) edges.push_back({e.u, e.v, 2 * e.len});
  AugmentedInstance out;
  out.original_n = n;
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const Vertex p = n + static_cast<Vertex>(i);
    edges.push_back({inst.requests[i].vertex, p, s});
    out.pendant.push_back(p);
  }
  out.instance.graph = MetricGraph(n + static_cast<int>(inst.requests.size()), std::move(edges));
  out.instance.service = 0;
  out.instance.root = inst.root;
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    const Request& r = inst.requests[i];
    out.instance.requests.push_back({out.pendant[i], 2 * r.release + s, 2 * r.deadline - s, r.reward});
  }
  return out;
}

/// Maps a zero-service walk on the augmented graph to a walk on the
/// original graph. Requests whose pendants the walk visits are served in
/// visit order; every one of them stays servable, so the reward never drops.
inline Walk back_map(const Walk& aug_walk, const AugmentedInstance& aug, const Instance& original) {
  const auto cov = coverage(aug_walk, aug.instance);
  std::vector<std::pair<Time, std::size_t>> visits;
  for (const auto& [i, t] : cov.service_starts) visits.emplace_back(t, i);
  std::sort(visits.begin(), visits.end());
  std::vector<std::size_t> order;
  for (const auto& [t, i] : visits) order.push_back(i);
  return serve_in_order(original.graph, original.requests, original.service, order, original.root);
}

/// Maps a walk on the original graph to the augmented graph: covered
/// requests get disjoint service slots in order of their earliest start,
/// and each slot becomes a pendant visit. Requests without a free slot are
/// dropped.
inline Walk forward_map(const Walk& walk, const AugmentedInstance& aug, const Instance& original) {
  const Time s = original.service;
  const auto cov = coverage(walk, original);
  const auto st = stays(walk, original.graph);
  std::vector<std::pair<Time, std::size_t>> starts;
  for (const auto& [i, tau] : cov.service_starts) starts.emplace_back(tau, i);
  std::sort(starts.begin(), starts.end());

  WalkBuilder b(aug.instance.graph, walk.start_vertex, 2 * walk.start_time);
  Time busy_until = 0;
  for (const auto& [tau, i] : starts) {
    const Request& r = original.requests[i];
    // the stay holding this service
    const Stay* holder = nullptr;
    for (const Stay& stay : st)
      if (service_start_in(stay, r, s) && stay.arrive <= tau && tau <= stay.depart) {
        holder = &stay;
        break;
      }
    const Time slot = std::max(tau, busy_until);
    if (!holder || slot + s > std::min(holder->depart, r.deadline)) continue;
    busy_until = slot + s;
    b.move(r.vertex);
    if (b.now() > 2 * slot) continue;
    b.idle_until(2 * slot);
    b.move(aug.pendant[i]);
    b.move(r.vertex);
  }
  return b.build();
}

// ---------------------------------------------------------------------------
// Zero-service phase schemes

namespace detail {

inline Time ceil_to(Time x, Time k) { return ((x + k - 1) / k) * k; }
inline Time floor_to(Time x, Time k) { return (x / k) * k; }

/// Targets for one phase: eligible uncovered requests merged per vertex.
struct PhaseTargets {
  std::vector<Target> targets;
  std::vector<std::vector<std::size_t>> members;
};

inline PhaseTargets phase_targets(const Instance& inst, const std::vector<std::size_t>& ids) {
  PhaseTargets out;
  std::map<Vertex, std::size_t> slot;
  for (std::size_t i : ids) {
    const Request& r = inst.requests[i];
    auto [it, fresh] = slot.try_emplace(r.vertex, out.targets.size());
    if (fresh) {
      out.targets.push_back({r.vertex, 0, 0, std::nullopt});
      out.members.emplace_back();
    }
    out.targets[it->second].reward += r.reward;
    out.members[it->second].push_back(i);
  }
  return out;
}

/// Phase-by-phase orienteering over a fixed grid. Phase p spans
/// [offset + p*len, offset + (p+1)*len); a request is eligible in a phase
/// when its window, shrunk to the grid, contains the whole phase. Each phase
/// runs a path tour of length `budget` starting from any vertex the walk can
/// reach by phase start plus `reach` (from anywhere before the first tour of
/// an unrooted walk), then idles out the phase.
inline Walk phase_walk(const Instance& inst, const std::vector<std::size_t>& ids, Time len, Time offset,
                       Time reach, Time budget, const OfflineConfig& cfg) {
  const Time horizon = inst.horizon();
  std::vector<Time> lo(inst.requests.size()), hi(inst.requests.size());
  for (std::size_t i : ids) {
    lo[i] = ceil_to(inst.requests[i].release - offset, len) + offset;
    hi[i] = floor_to(inst.requests[i].deadline - offset + len * (horizon + 1), len) - len * (horizon + 1) + offset;
  }
  std::set<std::size_t> covered;
  Vertex start_vertex = inst.root.value_or(0);
  bool started = inst.root.has_value();
  std::optional<WalkBuilder> b;
  if (started) b.emplace(inst.graph, start_vertex, 0);

  for (Time p = 0; offset + p * len <= horizon; ++p) {
    const Time ps = offset + p * len, pe = ps + len;
    std::vector<std::size_t> rem;
    for (std::size_t i : ids)
      if (!covered.count(i) && lo[i] <= ps && hi[i] >= pe) rem.push_back(i);
    if (rem.empty()) continue;
    const auto pt = phase_targets(inst, rem);
    std::optional<OrienteeringResult> best;
    Vertex best_root = 0;
    for (Vertex u = 0; u < inst.graph.size(); ++u) {
      // the tour starts once we are at u and the phase has begun
      Time tour_budget = budget;
      if (started) {
        const Time arrive = std::max(ps, b->now() + inst.graph.dist(b->at(), u));
        if (arrive > ps + reach) continue;
        tour_budget = std::min(budget, pe - arrive);
      }
      auto res = orienteering(inst.graph, pt.targets, u, tour_budget, TourMode::Path, cfg.solver);
      if (!best || res.value > best->value) {
        best = std::move(res);
        best_root = u;
      }
    }
    if (!best || best->value == 0) continue;
    if (!started) {
      b.emplace(inst.graph, best_root, 0);
      started = true;
    }
    b->move(best_root);
    b->idle_until(ps);
    for (std::size_t k : best->order) {
      b->move(pt.targets[k].vertex);
      for (std::size_t i : pt.members[k]) covered.insert(i);
    }
    b->idle_until(pe);
  }
  if (!b) return Walk{start_vertex, 0, {}};
  return b->build();
}

}  // namespace detail

/// Phases of length K = 2D over windows aligned to multiples of K; each
/// phase travels to the best root within K/2 and runs a K/2 orienteering
/// path over the requests whose aligned window spans the phase.
inline Walk aligned_phase(const Instance& inst, const OfflineConfig& cfg = {}) {
  const Length d = inst.graph.diameter();
  if (d == 0) return stay_put(inst, inst.root.value_or(0));
  std::vector<std::size_t> ids;
  for (std::size_t i = 0; i < inst.requests.size(); ++i) {
    if (inst.requests[i].window() < 4 * d)
      throw Error(Errc::WindowTooSmall, "request " + std::to_string(i) + " has window " +
                                            std::to_string(inst.requests[i].window()) + " < 4D = " +
                                            std::to_string(4 * d));
    ids.push_back(i);
  }
  const Time k = 2 * d;
  return detail::phase_walk(inst.with_service(0), ids, k, 0, k / 2, k / 2, cfg);
}

/// Short-window scheme: window-length classes [2^j, 2^(j+1)) solved by
/// phases of length max(1, 2^(j-2)) on three shifted grids; best walk wins.
inline Walk window_class_walk(const Instance& inst, const std::vector<std::size_t>& ids,
                              const OfflineConfig& cfg = {}) {
  const Instance zero = inst.with_service(0);
  std::map<int, std::vector<std::size_t>> classes;
  for (std::size_t i : ids) {
    const Time w = std::max<Time>(1, inst.requests[i].window());
    classes[std::bit_width(static_cast<std::uint64_t>(w)) - 1].push_back(i);
  }
  Walk best{inst.root.value_or(0), 0, {}};
  Reward best_reward = -1;
  for (const auto& [j, members] : classes) {
    const Time g = j >= 2 ? Time{1} << (j - 2) : 1;
    std::set<Time> offsets{0, g / 3, (2 * g) / 3};
    for (Time off : offsets) {
      Walk w = detail::phase_walk(zero, members, g, off, 0, g, cfg);
      const Reward r = coverage(w, zero).reward;
      if (r > best_reward) {
        best_reward = r;
        best = std::move(w);
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Large service

/// Scheduling reduction for S >= D: every request becomes a job with window
/// [r, d+D] and processing S+D, solved on one machine. The schedule is
/// replayed on the graph in start order.
inline Walk large_service_solve(const Instance& inst) {
  const Length d = inst.graph.diameter();
  std::vector<Job> jobs;
  for (const Request& r : inst.requests) jobs.push_back({r.release, r.deadline + d, inst.service + d, r.reward});
  const auto sched = job_scheduling(jobs, jobs.size() <= kMaxExactJobs ? JobMode::Exact : JobMode::LocalRatio);
  std::vector<std::size_t> order;
  for (const auto& [j, t] : sched.schedule) order.push_back(j);
  return serve_in_order(inst.graph, inst.requests, inst.service, order, inst.root);
}

// ---------------------------------------------------------------------------
// Dispatcher

namespace detail {

/// Zero-service solve: aligned phases on long windows, window classes on
/// short ones, better walk wins.
inline Walk zero_service_solve(const Instance& zero, const OfflineConfig& cfg) {
  const Length d = zero.graph.diameter();
  std::vector<std::size_t> longw, shortw;
  for (std::size_t i = 0; i < zero.requests.size(); ++i)
    (zero.requests[i].window() >= 4 * d ? longw : shortw).push_back(i);
  Walk best{zero.root.value_or(0), 0, {}};
  Reward best_reward = -1;
  auto consider = [&](Walk w) {
    const Reward r = coverage(w, zero).reward;
    if (r > best_reward) {
      best_reward = r;
      best = std::move(w);
    }
  };
  if (!longw.empty()) {
    Instance sub = zero;
    sub.requests.clear();
    for (std::size_t i : longw) sub.requests.push_back(zero.requests[i]);
    const Walk w = aligned_phase(sub, cfg);
    consider(w);
  }
  if (!shortw.empty()) consider(window_class_walk(zero, shortw, cfg));
  return best;
}

}  // namespace detail

/// Polynomial-time walk for any service time; see the component solvers.
inline Walk offline_solve(const Instance& inst, const OfflineConfig& cfg = {}) {
  require_valid(inst);
  const Vertex home = inst.root.value_or(0);
  if (inst.requests.empty()) return Walk{home, 0, {}};
  const Length d = inst.graph.diameter();
  if (d == 0) return stay_put(inst, home);
  if (inst.service >= d) return large_service_solve(inst);
  if (inst.service == 0) {
    const Walk w = detail::zero_service_solve(inst, cfg);
    // Rebuild as a plain service sequence so every covered request owns a slot.
    const auto cov = coverage(w, inst);
    std::vector<std::pair<Time, std::size_t>> visits;
    for (const auto& [i, t] : cov.service_starts) visits.emplace_back(t, i);
    std::sort(visits.begin(), visits.end());
    std::vector<std::size_t> order;
    for (const auto& [t, i] : visits) order.push_back(i);
    return serve_in_order(inst.graph, inst.requests, 0, order, inst.root);
  }
  const auto aug = augment_service(inst);
  const Walk w0 = detail::zero_service_solve(aug.instance, cfg);
  return back_map(w0, aug, inst);
}

}  // namespace twtsp
