#pragma once

// Exact desk-scale solvers: optimal TW-TSP walks with service times, rooted
// orienteering (path and cycle) and single-machine throughput scheduling.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "twtsp/error.hpp"
#include "twtsp/graph.hpp"
#include "twtsp/model.hpp"

namespace twtsp {

inline constexpr std::uint64_t kDefaultStateBudget = 100'000'000;
inline constexpr std::size_t kMaxExactTargets = 15;
inline constexpr std::size_t kMaxExactJobs = 15;

struct OracleResult {
  Reward value = 0;
  std::optional<Walk> walk;
  std::uint64_t explored_states = 0;
};

namespace detail {

/// Layered reachability over (time, vertex, idle run, covered mask).
///
/// The idle run counts consecutive idle steps at the current vertex, capped at
/// the service time. Whenever the run reaches S, the block [t-S, t) is a valid
/// service block and every request at the vertex whose window admits it is
/// marked covered. With S = 0 a request is covered by mere presence.
class TwtspDp {
 public:
  TwtspDp(const Instance& inst, std::uint64_t budget)
      : inst_(inst),
        n_(inst.graph.size()),
        m_(static_cast<int>(inst.requests.size())),
        s_(inst.service),
        runs_(inst.service + 1),
        horizon_(inst.horizon()) {
    if (m_ > 30) throw BudgetExceeded(std::numeric_limits<std::uint64_t>::max(), budget);
    const std::uint64_t masks = std::uint64_t{1} << m_;
    layer_ = static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(runs_) * masks;
    const std::uint64_t total = layer_ * static_cast<std::uint64_t>(horizon_ + 1);
    if (total / layer_ != static_cast<std::uint64_t>(horizon_ + 1) || total > budget)
      throw BudgetExceeded(total, budget);

    mask_reward_.assign(masks, 0);
    for (std::uint64_t mask = 1; mask < masks; ++mask) {
      const int low = std::countr_zero(mask);
      mask_reward_[mask] = mask_reward_[mask & (mask - 1)] + inst.requests[low].reward;
    }
    gain_.assign(static_cast<std::size_t>(n_) * (horizon_ + 1), 0);
    for (int i = 0; i < m_; ++i) {
      const Request& r = inst.requests[i];
      if (!inst.graph.contains(r.vertex)) continue;
      for (Time t = 0; t <= horizon_; ++t) {
        const bool hit = s_ == 0 ? (r.release <= t && t <= r.deadline)
                                 : (r.release <= t - s_ && t <= r.deadline);
        if (hit) gain_[cell(r.vertex, t)] |= std::uint32_t{1} << i;
      }
    }
  }

  OracleResult solve() {
    reach_.assign(layer_ * static_cast<std::uint64_t>(horizon_ + 1), false);
    std::vector<Vertex> starts;
    if (inst_.root) starts.push_back(*inst_.root);
    else
      for (Vertex v = 0; v < n_; ++v) starts.push_back(v);
    for (Vertex v : starts) mark(0, v, 0, s_ == 0 ? gain_[cell(v, 0)] : 0);

    std::uint64_t explored = 0;
    Reward best = -1;
    std::uint64_t best_state = 0;
    Time best_t = 0;
    const std::uint64_t masks = std::uint64_t{1} << m_;
    for (Time t = 0; t <= horizon_; ++t) {
      for (Vertex v = 0; v < n_; ++v) {
        for (Time k = 0; k < runs_; ++k) {
          for (std::uint64_t mask = 0; mask < masks; ++mask) {
            if (!reach_[index(t, v, k, mask)]) continue;
            ++explored;
            if (mask_reward_[mask] > best) {
              best = mask_reward_[mask];
              best_state = index(t, v, k, mask);
              best_t = t;
            }
            if (t + 1 <= horizon_) {
              const Time k2 = std::min<Time>(k + 1, s_);
              std::uint64_t add = 0;
              if (s_ == 0 || k2 == s_) add = gain_[cell(v, t + 1)];
              mark(t + 1, v, k2, mask | add);
            }
            for (Vertex w = 0; w < n_; ++w) {
              if (w == v) continue;
              const Time t2 = t + inst_.graph.dist(v, w);
              if (t2 > horizon_) continue;
              mark(t2, w, 0, mask | (s_ == 0 ? gain_[cell(w, t2)] : 0));
            }
          }
        }
      }
    }
    OracleResult res;
    res.value = best;
    res.explored_states = explored;
    res.walk = reconstruct(best_t, best_state);
    return res;
  }

 private:
  std::size_t cell(Vertex v, Time t) const {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(horizon_ + 1) + static_cast<std::size_t>(t);
  }
  std::uint64_t index(Time t, Vertex v, Time k, std::uint64_t mask) const {
    return static_cast<std::uint64_t>(t) * layer_ +
           ((static_cast<std::uint64_t>(v) * runs_ + static_cast<std::uint64_t>(k)) << m_) + mask;
  }
  void mark(Time t, Vertex v, Time k, std::uint64_t mask) { reach_[index(t, v, k, mask)] = true; }
  bool reached(Time t, Vertex v, Time k, std::uint64_t mask) const { return reach_[index(t, v, k, mask)]; }

  /// Some predecessor mask p with p | add == mask that is reachable at the
  /// given (t, v, k), or nullopt.
  std::optional<std::uint64_t> find_mask(Time t, Vertex v, Time k, std::uint64_t mask,
                                         std::uint64_t add) const {
    const std::uint64_t base = mask & ~add;
    const std::uint64_t free = mask & add;
    for (std::uint64_t sub = free;; sub = (sub - 1) & free) {
      if (reached(t, v, k, base | sub)) return base | sub;
      if (sub == 0) break;
    }
    return std::nullopt;
  }

  Walk reconstruct(Time t, std::uint64_t state) const {
    std::uint64_t rest = state - static_cast<std::uint64_t>(t) * layer_;
    std::uint64_t mask = rest & ((std::uint64_t{1} << m_) - 1);
    rest >>= m_;
    Time k = static_cast<Time>(rest % static_cast<std::uint64_t>(runs_));
    Vertex v = static_cast<Vertex>(rest / static_cast<std::uint64_t>(runs_));

    std::vector<Action> reversed;
    while (t > 0) {
      bool stepped = false;
      // idle predecessor
      {
        const std::uint64_t add = (s_ == 0 || k == s_) ? gain_[cell(v, t)] : 0;
        std::vector<Time> prev_runs;
        if (s_ == 0) prev_runs = {0};
        else if (k == s_) prev_runs = {s_ - 1, s_};
        else if (k >= 1) prev_runs = {k - 1};
        for (Time kp : prev_runs) {
          if (auto pm = find_mask(t - 1, v, kp, mask, add)) {
            reversed.push_back(Idle{1});
            t -= 1;
            k = kp;
            mask = *pm;
            stepped = true;
            break;
          }
        }
      }
      if (!stepped && k == 0) {
        const std::uint64_t add = s_ == 0 ? gain_[cell(v, t)] : 0;
        for (Vertex u = 0; u < n_ && !stepped; ++u) {
          if (u == v) continue;
          const Time tp = t - inst_.graph.dist(u, v);
          if (tp < 0) continue;
          for (Time kp = 0; kp < runs_ && !stepped; ++kp) {
            if (auto pm = find_mask(tp, u, kp, mask, add)) {
              reversed.push_back(Move{v, std::nullopt});
              t = tp;
              k = kp;
              mask = *pm;
              v = u;
              stepped = true;
            }
          }
        }
      }
      if (!stepped) throw Error(Errc::InfeasibleWalk, "oracle reconstruction failed");
    }
    WalkBuilder b(inst_.graph, v, 0);
    for (auto it = reversed.rbegin(); it != reversed.rend(); ++it) {
      if (const auto* mv = std::get_if<Move>(&*it)) b.move(mv->to);
      else b.idle(std::get<Idle>(*it).duration);
    }
    return b.build();
  }

  const Instance& inst_;
  int n_;
  int m_;
  Time s_;
  Time runs_;
  Time horizon_;
  std::uint64_t layer_ = 0;
  std::vector<Reward> mask_reward_;
  std::vector<std::uint32_t> gain_;
  std::vector<bool> reach_;
};

}  // namespace detail

/// Estimated number of DP states opt_twtsp would allocate.
inline std::uint64_t twtsp_state_count(const Instance& inst) {
  const auto m = inst.requests.size();
  if (m > 40) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(inst.graph.size()) * static_cast<std::uint64_t>(inst.service + 1) *
         (std::uint64_t{1} << m) * static_cast<std::uint64_t>(inst.horizon() + 1);
}

/// Exact optimum over all walks. Rooted instances start at the root at time
/// 0; otherwise every start vertex is tried. Throws BudgetExceeded.
inline OracleResult opt_twtsp(const Instance& inst, std::uint64_t budget = kDefaultStateBudget) {
  if (inst.root && !inst.graph.contains(*inst.root))
    throw Error(Errc::VertexOutOfRange, "root out of range");
  if (inst.requests.empty()) {
    OracleResult res;
    res.walk = Walk{inst.root.value_or(0), 0, {}};
    res.explored_states = 1;
    return res;
  }
  detail::TwtspDp dp(inst, budget);
  return dp.solve();
}

// ---------------------------------------------------------------------------
// Orienteering

enum class TourMode { Path, Cycle };

struct Target {
  Vertex vertex = 0;
  Reward reward = 0;
  Time service = 0;
  /// Latest admissible service start, measured from the tour start.
  std::optional<Time> latest_start;
};

struct OrienteeringResult {
  Reward value = 0;
  std::vector<std::size_t> order;  // target indices in visit order
  Time length = 0;                 // tour duration, including the return leg in cycle mode
  Walk walk;                       // starts at the root at time 0
  std::uint64_t explored_states = 0;
};

namespace detail {

inline Walk tour_walk(const MetricGraph& g, Vertex root, const std::vector<Target>& targets,
                      const std::vector<std::size_t>& order, TourMode mode) {
  WalkBuilder b(g, root, 0);
  for (std::size_t i : order) {
    b.move(targets[i].vertex);
    b.idle(targets[i].service);
  }
  if (mode == TourMode::Cycle) b.move(root);
  return b.build();
}

constexpr Time kInfTime = std::numeric_limits<Time>::max() / 4;

struct TourTable {
  std::vector<Time> finish;  // [mask * m + last]
  std::vector<int> parent;
  std::size_t m = 0;
};

inline TourTable tour_table(const MetricGraph& g, Vertex root, const std::vector<Target>& targets) {
  const std::size_t m = targets.size();
  const std::size_t masks = std::size_t{1} << m;
  TourTable tab;
  tab.m = m;
  tab.finish.assign(masks * m, kInfTime);
  tab.parent.assign(masks * m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const Time start = g.dist(root, targets[i].vertex);
    if (targets[i].latest_start && start > *targets[i].latest_start) continue;
    tab.finish[(std::size_t{1} << i) * m + i] = start + targets[i].service;
  }
  for (std::size_t mask = 1; mask < masks; ++mask) {
    for (std::size_t last = 0; last < m; ++last) {
      if (!(mask >> last & 1)) continue;
      const Time f = tab.finish[mask * m + last];
      if (f >= kInfTime) continue;
      for (std::size_t j = 0; j < m; ++j) {
        if (mask >> j & 1) continue;
        const Time start = f + g.dist(targets[last].vertex, targets[j].vertex);
        if (targets[j].latest_start && start > *targets[j].latest_start) continue;
        const std::size_t nm = mask | (std::size_t{1} << j);
        const Time nf = start + targets[j].service;
        if (nf < tab.finish[nm * m + j]) {
          tab.finish[nm * m + j] = nf;
          tab.parent[nm * m + j] = static_cast<int>(last);
        }
      }
    }
  }
  return tab;
}

inline std::vector<std::size_t> tour_order(const TourTable& tab, std::size_t mask, std::size_t last) {
  std::vector<std::size_t> order;
  while (mask) {
    order.push_back(last);
    const int p = tab.parent[mask * tab.m + last];
    mask &= ~(std::size_t{1} << last);
    if (p < 0) break;
    last = static_cast<std::size_t>(p);
  }
  std::reverse(order.begin(), order.end());
  return order;
}

}  // namespace detail

/// Maximum-reward subset of targets servable by a tour of duration at most
/// `budget` from `root` (and back to it in cycle mode). Each target is
/// counted once; co-located targets are served one after the other.
inline OrienteeringResult orienteering_exact(const MetricGraph& g, const std::vector<Target>& targets,
                                             Vertex root, Time budget, TourMode mode) {
  if (targets.size() > kMaxExactTargets)
    throw Error(Errc::TooManyTargets, std::to_string(targets.size()) + " targets, limit " +
                                          std::to_string(kMaxExactTargets));
  const std::size_t m = targets.size();
  OrienteeringResult best;
  best.walk = Walk{root, 0, {}};
  if (m == 0 || budget < 0) return best;
  const auto tab = detail::tour_table(g, root, targets);
  const std::size_t masks = std::size_t{1} << m;
  best.explored_states = masks * m;
  std::size_t best_mask = 0, best_last = 0;
  Time best_len = 0;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    Reward value = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) value += targets[i].reward;
    if (value <= best.value) continue;
    Time len = detail::kInfTime;
    std::size_t arg = 0;
    for (std::size_t last = 0; last < m; ++last) {
      const Time f = tab.finish[mask * m + last];
      if (f >= detail::kInfTime) continue;
      const Time total = mode == TourMode::Cycle ? f + g.dist(targets[last].vertex, root) : f;
      if (total < len) {
        len = total;
        arg = last;
      }
    }
    if (len <= budget) {
      best.value = value;
      best_mask = mask;
      best_last = arg;
      best_len = len;
    }
  }
  if (best_mask) {
    best.order = detail::tour_order(tab, best_mask, best_last);
    best.length = best_len;
    best.walk = detail::tour_walk(g, root, targets, best.order, mode);
  }
  return best;
}

/// Length of the shortest cycle from `root` serving every target, or nullopt
/// when deadlines make that impossible.
inline std::optional<Time> min_service_cycle(const MetricGraph& g, const std::vector<Target>& targets,
                                             Vertex root) {
  if (targets.size() > kMaxExactTargets)
    throw Error(Errc::TooManyTargets, std::to_string(targets.size()) + " targets");
  const std::size_t m = targets.size();
  if (m == 0) return Time{0};
  const auto tab = detail::tour_table(g, root, targets);
  const std::size_t full = (std::size_t{1} << m) - 1;
  Time best = detail::kInfTime;
  for (std::size_t last = 0; last < m; ++last) {
    const Time f = tab.finish[full * m + last];
    if (f < detail::kInfTime) best = std::min(best, f + g.dist(targets[last].vertex, root));
  }
  if (best >= detail::kInfTime) return std::nullopt;
  return best;
}

/// Greedy surrogate: repeatedly appends the feasible target with the best
/// reward per unit of added time (ties to the lowest index).
inline OrienteeringResult orienteering_greedy(const MetricGraph& g, const std::vector<Target>& targets,
                                              Vertex root, Time budget, TourMode mode) {
  OrienteeringResult res;
  std::vector<bool> used(targets.size(), false);
  Vertex at = root;
  Time now = 0;
  for (;;) {
    std::optional<std::size_t> pick;
    double best_ratio = -1;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (used[j]) continue;
      const Time start = now + g.dist(at, targets[j].vertex);
      if (targets[j].latest_start && start > *targets[j].latest_start) continue;
      const Time finish = start + targets[j].service;
      const Time total = mode == TourMode::Cycle ? finish + g.dist(targets[j].vertex, root) : finish;
      if (total > budget) continue;
      const Time added = finish - now;
      const double ratio = added == 0 ? std::numeric_limits<double>::infinity()
                                      : static_cast<double>(targets[j].reward) / static_cast<double>(added);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        pick = j;
      }
    }
    if (!pick) break;
    used[*pick] = true;
    res.order.push_back(*pick);
    res.value += targets[*pick].reward;
    now += g.dist(at, targets[*pick].vertex) + targets[*pick].service;
    at = targets[*pick].vertex;
  }
  res.length = mode == TourMode::Cycle ? now + g.dist(at, root) : now;
  res.walk = detail::tour_walk(g, root, targets, res.order, mode);
  return res;
}

enum class OrienteeringSolver { Exact, Greedy };

/// Exact when requested and within the target limit, greedy otherwise.
inline OrienteeringResult orienteering(const MetricGraph& g, const std::vector<Target>& targets, Vertex root,
                                       Time budget, TourMode mode, OrienteeringSolver solver) {
  if (solver == OrienteeringSolver::Exact && targets.size() <= kMaxExactTargets)
    return orienteering_exact(g, targets, root, budget, mode);
  return orienteering_greedy(g, targets, root, budget, mode);
}

// ---------------------------------------------------------------------------
// Single-machine throughput scheduling

struct Job {
  Time release = 0;
  Time deadline = 0;
  Time processing = 1;
  Reward reward = 1;
};

enum class JobMode { Exact, LocalRatio };

struct ScheduleResult {
  Reward value = 0;
  std::vector<std::pair<std::size_t, Time>> schedule;  // (job, start), by start time
};

namespace detail {

inline ScheduleResult schedule_exact(const std::vector<Job>& jobs) {
  const std::size_t m = jobs.size();
  const std::size_t masks = std::size_t{1} << m;
  std::vector<Time> done(masks, kInfTime);
  std::vector<int> last(masks, -1);
  done[0] = 0;
  // Earliest-start sequencing: a smaller completion time of a prefix never
  // hurts any extension, so the min completion per subset is exact.
  for (std::size_t mask = 0; mask < masks; ++mask) {
    if (done[mask] >= kInfTime) continue;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask >> j & 1) continue;
      const Time start = std::max(done[mask], jobs[j].release);
      const Time fin = start + jobs[j].processing;
      if (fin > jobs[j].deadline) continue;
      const std::size_t nm = mask | (std::size_t{1} << j);
      if (fin < done[nm]) {
        done[nm] = fin;
        last[nm] = static_cast<int>(j);
      }
    }
  }
  ScheduleResult best;
  std::size_t best_mask = 0;
  for (std::size_t mask = 1; mask < masks; ++mask) {
    if (done[mask] >= kInfTime) continue;
    Reward v = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (mask >> j & 1) v += jobs[j].reward;
    if (v > best.value) {
      best.value = v;
      best_mask = mask;
    }
  }
  std::vector<std::size_t> order;
  for (std::size_t mask = best_mask; mask;) {
    const int j = last[mask];
    order.push_back(static_cast<std::size_t>(j));
    mask &= ~(std::size_t{1} << j);
  }
  std::reverse(order.begin(), order.end());
  Time now = 0;
  for (std::size_t j : order) {
    const Time start = std::max(now, jobs[j].release);
    best.schedule.emplace_back(j, start);
    now = start + jobs[j].processing;
  }
  return best;
}

/// Local-ratio 2-approximation on the discretized interval formulation.
inline ScheduleResult schedule_local_ratio(const std::vector<Job>& jobs) {
  struct Interval {
    std::size_t job;
    Time start, end;
    Reward weight;
  };
  std::vector<Interval> iv;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    for (Time t = jobs[j].release; t + jobs[j].processing <= jobs[j].deadline; ++t) {
      iv.push_back({j, t, t + jobs[j].processing, jobs[j].reward});
      if (iv.size() > 2'000'000) throw Error(Errc::InvalidParams, "too many candidate intervals");
    }
  }
  auto overlaps = [](const Interval& a, const Interval& b) { return a.start < b.end && b.start < a.end; };
  std::vector<std::size_t> stack;
  for (;;) {
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < iv.size(); ++i) {
      if (iv[i].weight <= 0) continue;
      if (!pick || iv[i].end < iv[*pick].end) pick = i;
    }
    if (!pick) break;
    const Interval chosen = iv[*pick];
    stack.push_back(*pick);
    for (auto& x : iv) {
      if (x.weight <= 0) continue;
      if (x.job == chosen.job || overlaps(x, chosen)) x.weight -= chosen.weight;
    }
  }
  std::vector<Interval> picked;
  std::vector<bool> used(jobs.size(), false);
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
    const Interval& c = iv[*it];
    if (used[c.job]) continue;
    if (std::any_of(picked.begin(), picked.end(), [&](const Interval& p) { return overlaps(p, c); })) continue;
    used[c.job] = true;
    picked.push_back(c);
  }
  std::sort(picked.begin(), picked.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });
  ScheduleResult res;
  for (const auto& p : picked) {
    res.value += jobs[p.job].reward;
    res.schedule.emplace_back(p.job, p.start);
  }
  return res;
}

}  // namespace detail

inline ScheduleResult job_scheduling(const std::vector<Job>& jobs, JobMode mode) {
  if (mode == JobMode::Exact) {
    if (jobs.size() > kMaxExactJobs)
      throw Error(Errc::TooManyJobs, std::to_string(jobs.size()) + " jobs, limit " + std::to_string(kMaxExactJobs));
    return detail::schedule_exact(jobs);
  }
  return detail::schedule_local_ratio(jobs);
}

}  // namespace twtsp
