#pragma once

// Prediction-following online algorithms. The precomputed walk W' serves the
// predicted requests with service S'; the online walk replays it shifted by
// eps*K and spends each predicted service slot on a detour to true requests
// revealed so far. Nothing here ever sees the matching.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "twtsp/error.hpp"
#include "twtsp/model.hpp"
#include "twtsp/oracle.hpp"
#include "twtsp/rng.hpp"

namespace twtsp {

/// True requests revealed lazily at their release times. Queries must come
/// with non-decreasing times; every read of a request is logged.
class OnlineStream {
 public:
  struct Access {
    Time time;
    std::size_t index;
  };

  explicit OnlineStream(std::vector<Request> requests) : requests_(std::move(requests)) {
    for (std::size_t i = 0; i < requests_.size(); ++i) order_.push_back(i);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return requests_[a].release < requests_[b].release; });
  }

  std::size_t size() const noexcept { return requests_.size(); }
  Time now() const noexcept { return now_; }

  /// Reveals everything released by time t.
  void advance(Time t) {
    if (closed_) throw Error(Errc::InvalidParams, "stream already closed");
    if (t < now_) throw Error(Errc::InvalidParams, "stream time went backwards");
    now_ = t;
    while (next_ < order_.size() && requests_[order_[next_]].release <= t) revealed_.push_back(order_[next_++]);
  }

  /// Indices revealed so far, in release order.
  const std::vector<std::size_t>& revealed() const noexcept { return revealed_; }

  /// Reads a revealed request; reading an unreleased one is an error.
  const Request& get(std::size_t i) {
    if (i >= requests_.size()) throw Error(Errc::IndexOutOfRange, "request " + std::to_string(i));
    log_.push_back({now_, i});
    if (closed_) return requests_[i];
    if (requests_[i].release > now_)
      throw Error(Errc::InvalidRequest, "request " + std::to_string(i) + " read before its release");
    return requests_[i];
  }

  /// Ends the online phase and hands out the full sequence for evaluation.
  const std::vector<Request>& close() {
    closed_ = true;
    return requests_;
  }

  const std::vector<Access>& audit() const noexcept { return log_; }

 private:
  std::vector<Request> requests_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> revealed_;
  std::size_t next_ = 0;
  Time now_ = 0;
  bool closed_ = false;
  std::vector<Access> log_;
};

enum class OnlineMode { OneToOne, ManyToOne };

struct DetourRecord {
  std::size_t pred_index = 0;
  Time time = 0;
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> chosen;  // visit order
  Time length = 0;                  // travel plus idle units
  Reward reward = 0;
};

/// A predicted request served by W' together with its private service slot.
struct PredictedStop {
  std::size_t pred_index = 0;
  Vertex vertex = 0;
  Time slot = 0;  // unshifted slot start
};

struct OnlineRunResult {
  Walk walk;
  CoverageReport covered;  // against the true requests with unit service
  int epsilon = 0;
  Time s_prime = 1;
  std::vector<PredictedStop> stops;
  std::vector<DetourRecord> detour_log;
};

struct OnlineConfig {
  OrienteeringSolver solver = OrienteeringSolver::Exact;
};

/// True requests a detour from `pred` at time t can serve. One-to-one: the
/// round trip plus one idle unit fits in S' and the request stays open until
/// the idle unit ends. Many-to-one keeps only the time condition.
inline std::vector<std::size_t> reachable_set(const Request& pred, Time t,
                                              const std::vector<std::pair<std::size_t, Request>>& revealed,
                                              Time s_prime, OnlineMode mode, const MetricGraph& g) {
  std::vector<std::size_t> out;
  for (const auto& [i, r] : revealed) {
    const Length l = g.dist(pred.vertex, r.vertex);
    if (!(r.release <= t && t <= r.deadline - l - 1)) continue;
    if (mode == OnlineMode::OneToOne && 2 * l + 1 > s_prime) continue;
    out.push_back(i);
  }
  return out;
}

/// Gives every predicted request W' covers at service S' a disjoint slot
/// inside the idle block that covers it, earliest deadline first. Requests
/// that share a block with no room left get no slot.
inline std::vector<PredictedStop> predicted_stops(const Walk& wp, const Instance& pred) {
  const Time sp = pred.service;
  const auto cov = coverage(wp, pred);
  const auto st = stays(wp, pred.graph);
  std::vector<PredictedStop> out;
  for (const Stay& stay : st) {
    std::vector<std::size_t> here;
    for (const auto& [i, tau] : cov.service_starts)
      if (pred.requests[i].vertex == stay.vertex && stay.arrive <= tau && tau <= stay.depart &&
          service_start_in(stay, pred.requests[i], sp))
        here.push_back(i);
    std::sort(here.begin(), here.end(), [&](std::size_t a, std::size_t b) {
      return std::pair(pred.requests[a].deadline, a) < std::pair(pred.requests[b].deadline, b);
    });
    Time cur = stay.arrive;
    for (std::size_t i : here) {
      const Request& r = pred.requests[i];
      const Time x = std::max(cur, r.release);
      if (x + sp > std::min(stay.depart, r.deadline)) continue;
      out.push_back({i, stay.vertex, x});
      cur = x + sp;
    }
  }
  std::sort(out.begin(), out.end(), [](const PredictedStop& a, const PredictedStop& b) {
    return std::pair(a.slot, a.pred_index) < std::pair(b.slot, b.pred_index);
  });
  // Drop any stop already claimed by an earlier stay.
  std::set<std::size_t> seen;
  std::vector<PredictedStop> uniq;
  for (const auto& s : out)
    if (seen.insert(s.pred_index).second) uniq.push_back(s);
  return uniq;
}

namespace detail {

inline OnlineRunResult run_shifted(const MetricGraph& g, const Instance& pred, const Walk& wp,
                                   OnlineStream& stream, int epsilon, Time l_min, OnlineMode mode,
                                   const OnlineConfig& cfg) {
  if (epsilon < -1 || epsilon > 1) throw Error(Errc::InvalidParams, "epsilon must be -1, 0 or 1");
  if (pred.service < 1) throw Error(Errc::InvalidParams, "S' must be at least 1");
  if (!(pred.graph == g)) throw Error(Errc::InvalidParams, "prediction graph differs");
  if (!validate_walk(wp, g).empty()) {
    const auto v = validate_walk(wp, g).front();
    throw Error(Errc::InfeasiblePrecomputedWalk, v.kind + " at action " + std::to_string(v.action_index));
  }
  const Time sp = pred.service;
  const Time k = l_min / 2;
  const Time shift = epsilon * k;

  OnlineRunResult res;
  res.epsilon = epsilon;
  res.s_prime = sp;
  res.stops = predicted_stops(wp, pred);
  const auto st = stays(wp, g);

  std::size_t k0 = 0;
  while (k0 < st.size() && st[k0].depart + shift < 0) ++k0;
  if (k0 == st.size()) {
    res.walk = Walk{st.back().vertex, 0, {}};
  } else {
    const Time begin = k0 == 0 ? std::max<Time>(0, st[0].arrive + shift) : 0;
    WalkBuilder b(g, st[k0].vertex, begin);
    std::set<std::size_t> done;
    std::size_t next_stop = 0;
    for (std::size_t s = k0; s < st.size(); ++s) {
      const Stay& stay = st[s];
      b.move(stay.vertex);
      b.idle_until(stay.arrive + shift);
      for (; next_stop < res.stops.size() && res.stops[next_stop].slot <= stay.depart; ++next_stop) {
        const PredictedStop& ps = res.stops[next_stop];
        if (ps.slot < stay.arrive || ps.vertex != stay.vertex) continue;
        const Time t = ps.slot + shift;
        if (t < 0) continue;
        b.idle_until(t);
        stream.advance(t);
        std::vector<std::pair<std::size_t, Request>> open;
        for (std::size_t i : stream.revealed())
          if (!done.count(i)) open.emplace_back(i, stream.get(i));
        const Request& pr = pred.requests[ps.pred_index];
        DetourRecord rec;
        rec.pred_index = ps.pred_index;
        rec.time = t;
        rec.candidates = reachable_set(pr, t, open, sp, mode, g);
        if (mode == OnlineMode::OneToOne) {
          std::optional<std::size_t> pick;
          for (std::size_t i : rec.candidates)
            if (!pick || stream.get(i).reward > stream.get(*pick).reward) pick = i;
          if (pick) {
            const Request& r = stream.get(*pick);
            rec.chosen = {*pick};
            rec.length = 2 * g.dist(pr.vertex, r.vertex) + 1;
            rec.reward = r.reward;
            b.move(r.vertex).idle(1).move(pr.vertex);
            done.insert(*pick);
          }
        } else {
          std::vector<Target> targets;
          for (std::size_t i : rec.candidates) {
            const Request& r = stream.get(i);
            targets.push_back({r.vertex, r.reward, 1, r.deadline - 1 - t});
          }
          const auto tour = orienteering(g, targets, pr.vertex, sp, TourMode::Cycle, cfg.solver);
          for (std::size_t kx : tour.order) {
            const std::size_t i = rec.candidates[kx];
            rec.chosen.push_back(i);
            b.move(targets[kx].vertex).idle(1);
            done.insert(i);
          }
          b.move(pr.vertex);
          rec.length = tour.order.empty() ? 0 : tour.length;
          rec.reward = tour.value;
        }
        res.detour_log.push_back(std::move(rec));
      }
      b.idle_until(stay.depart + shift);
    }
    res.walk = b.build();
  }
  const auto& truth = stream.close();
  res.covered = coverage(res.walk, g, truth, 1);
  return res;
}

}  // namespace detail

/// One-to-one prediction following (detour to the best reachable request).
/// K = floor(l_min / 2) where l_min is the predicted minimum window.
inline OnlineRunResult run_online(const MetricGraph& g, const Instance& pred, const Walk& wp, OnlineStream& stream,
                                  int epsilon, Time l_min) {
  return detail::run_shifted(g, pred, wp, stream, epsilon, l_min, OnlineMode::OneToOne, {});
}

/// Many-to-one variant: each predicted slot runs a rooted orienteering cycle
/// of length at most S' over the open reachable requests.
inline OnlineRunResult run_online_many(const MetricGraph& g, const Instance& pred, const Walk& wp,
                                       OnlineStream& stream, int epsilon, Time l_min,
                                       const OnlineConfig& cfg = {}) {
  return detail::run_shifted(g, pred, wp, stream, epsilon, l_min, OnlineMode::ManyToOne, cfg);
}

/// Candidate error guesses {0} plus powers of two up to l_min / 4.
inline std::vector<Time> lambda_guesses(Time l_min) {
  std::vector<Time> out{0};
  for (Time p = 1; 4 * p <= l_min; p *= 2) out.push_back(p);
  return out;
}

struct GuessedRun {
  Time guess = 0;
  Time s_prime = 1;
  OnlineRunResult run;
};

/// Draws a guess uniformly, sets S' = 2*guess + 1 and hands it to `runner`,
/// which must return the OnlineRunResult for that S'.
template <class Runner>
GuessedRun guess_lambda(Runner&& runner, Time l_min, std::uint64_t seed) {
  const auto guesses = lambda_guesses(l_min);
  SplitMix64 rng(seed);
  const Time g = guesses[static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(guesses.size()) - 1))];
  GuessedRun out;
  out.guess = g;
  out.s_prime = 2 * g + 1;
  out.run = runner(out.s_prime);
  return out;
}

}  // namespace twtsp
