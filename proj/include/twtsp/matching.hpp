#pragma once

// Prediction-error model: per-pair errors, matching profiles and the
// bottleneck-optimal perfect matching.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "twtsp/error.hpp"
#include "twtsp/model.hpp"
#include "twtsp/oracle.hpp"
#include "twtsp/rational.hpp"

namespace twtsp {

enum class MatchingKind { OneToOne, Partial, ManyToOne };

inline std::string to_string(MatchingKind k) {
  switch (k) {
    case MatchingKind::OneToOne: return "one_to_one";
    case MatchingKind::Partial: return "partial";
    case MatchingKind::ManyToOne: return "many_to_one";
  }
  return "?";
}

struct Matching {
  MatchingKind kind = MatchingKind::OneToOne;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (true, predicted)
  std::set<std::size_t> unmatched_true;                    // filled by profile() for Partial
  std::set<std::size_t> unmatched_pred;

  friend bool operator==(const Matching&, const Matching&) = default;
};

inline Matching identity_matching(std::size_t m) {
  Matching out;
  for (std::size_t i = 0; i < m; ++i) out.pairs.emplace_back(i, i);
  return out;
}

struct PairErrors {
  Length loc = 0;
  Time tw = 0;
  Rational rew{1};
};

inline PairErrors pair_errors(const Request& s, const Request& p, const MetricGraph& g) {
  PairErrors e;
  e.loc = g.dist(s.vertex, p.vertex);
  e.tw = std::max(std::abs(s.release - p.release), std::abs(s.deadline - p.deadline));
  const Rational a(s.reward, p.reward);
  e.rew = std::max(a, Rational(1) / a);
  return e;
}

struct ErrorProfile {
  Length lambda = 0;
  Time tau = 0;
  Rational rho{1};
  Reward delta1 = 0;
  Reward delta2 = 0;

  friend bool operator==(const ErrorProfile&, const ErrorProfile&) = default;
};

/// Error profile of a matching between true requests `I` and predictions
/// `Ip`. For many-to-one matchings the location error of a prediction is the
/// shortest cycle from it through all its preimages with one idle unit each,
/// and the reward error compares it with the preimages' total reward.
inline ErrorProfile profile(const Instance& I, const Instance& Ip, Matching& m) {
  const std::size_t nt = I.requests.size(), np = Ip.requests.size();
  std::vector<int> true_uses(nt, 0), pred_uses(np, 0);
  for (const auto& [i, j] : m.pairs) {
    if (i >= nt || j >= np)
      throw Error(Errc::IndexOutOfRange, "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
    ++true_uses[i];
    ++pred_uses[j];
  }
  const bool true_once = std::all_of(true_uses.begin(), true_uses.end(), [](int c) { return c <= 1; });
  const bool pred_once = std::all_of(pred_uses.begin(), pred_uses.end(), [](int c) { return c <= 1; });
  const bool true_all = std::all_of(true_uses.begin(), true_uses.end(), [](int c) { return c == 1; });
  const bool pred_all = std::all_of(pred_uses.begin(), pred_uses.end(), [](int c) { return c == 1; });
  switch (m.kind) {
    case MatchingKind::OneToOne:
      if (nt != np) throw Error(Errc::KindMismatch, "one-to-one matching needs equal sizes");
      if (!true_all || !pred_all) throw Error(Errc::KindMismatch, "one-to-one matching is not a bijection");
      break;
    case MatchingKind::Partial:
      if (!true_once || !pred_once) throw Error(Errc::KindMismatch, "partial matching reuses an index");
      break;
    case MatchingKind::ManyToOne:
      if (!true_all) throw Error(Errc::KindMismatch, "many-to-one matching must map every true request once");
      break;
  }

  ErrorProfile prof;
  m.unmatched_true.clear();
  m.unmatched_pred.clear();
  for (std::size_t i = 0; i < nt; ++i)
    if (!true_uses[i]) {
      m.unmatched_true.insert(i);
      prof.delta1 += I.requests[i].reward;
    }
  for (std::size_t j = 0; j < np; ++j)
    if (!pred_uses[j]) {
      m.unmatched_pred.insert(j);
      prof.delta2 += Ip.requests[j].reward;
    }

  if (m.kind != MatchingKind::ManyToOne) {
    for (const auto& [i, j] : m.pairs) {
      const auto e = pair_errors(I.requests[i], Ip.requests[j], I.graph);
      prof.lambda = std::max(prof.lambda, e.loc);
      prof.tau = std::max(prof.tau, e.tw);
      prof.rho = std::max(prof.rho, e.rew);
    }
    return prof;
  }

  std::map<std::size_t, std::vector<std::size_t>> pre;
  for (const auto& [i, j] : m.pairs) {
    pre[j].push_back(i);
    prof.tau = std::max(prof.tau, pair_errors(I.requests[i], Ip.requests[j], I.graph).tw);
  }
  for (const auto& [j, preimages] : pre) {
    std::vector<Target> targets;
    Reward sum = 0;
    for (std::size_t i : preimages) {
      targets.push_back({I.requests[i].vertex, I.requests[i].reward, 1, std::nullopt});
      sum += I.requests[i].reward;
    }
    const auto cyc = min_service_cycle(I.graph, targets, Ip.requests[j].vertex);
    prof.lambda = std::max(prof.lambda, *cyc);
    const Rational a(sum, Ip.requests[j].reward);
    prof.rho = std::max(prof.rho, std::max(a, Rational(1) / a));
  }
  return prof;
}

inline ErrorProfile profile(const Instance& I, const Instance& Ip, const Matching& m) {
  Matching copy = m;
  return profile(I, Ip, copy);
}

namespace detail {

/// Kuhn's augmenting-path test: can rows [from, n) be perfectly matched to
/// unused columns through allowed edges?
inline bool has_perfect(const std::vector<std::vector<bool>>& allowed, std::size_t from,
                        const std::vector<bool>& col_used) {
  const std::size_t n = allowed.size();
  std::vector<int> match_col(n, -1);
  std::vector<bool> seen;
  auto augment = [&](auto&& self, std::size_t row) -> bool {
    for (std::size_t c = 0; c < n; ++c) {
      if (col_used[c] || !allowed[row][c] || seen[c]) continue;
      seen[c] = true;
      if (match_col[c] < 0 || self(self, static_cast<std::size_t>(match_col[c]))) {
        match_col[c] = static_cast<int>(row);
        return true;
      }
    }
    return false;
  };
  for (std::size_t row = from; row < n; ++row) {
    seen.assign(n, false);
    if (!augment(augment, row)) return false;
  }
  return true;
}

}  // namespace detail

/// Perfect matching minimising the largest location error; among optimal
/// matchings the lexicographically smallest pair list is returned.
inline Matching best_matching(const Instance& I, const Instance& Ip) {
  const std::size_t n = I.requests.size();
  if (Ip.requests.size() != n)
    throw Error(Errc::SizeMismatch, std::to_string(n) + " true vs " + std::to_string(Ip.requests.size()) +
                                        " predicted requests");
  Matching out;
  if (n == 0) return out;
  std::vector<std::vector<Length>> cost(n, std::vector<Length>(n));
  std::vector<Length> values;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cost[i][j] = I.graph.dist(I.requests[i].vertex, Ip.requests[j].vertex);
      values.push_back(cost[i][j]);
    }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  auto allowed_at = [&](Length thr) {
    std::vector<std::vector<bool>> a(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) a[i][j] = cost[i][j] <= thr;
    return a;
  };
  const std::vector<bool> none(n, false);
  std::size_t lo = 0, hi = values.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (detail::has_perfect(allowed_at(values[mid]), 0, none)) hi = mid;
    else lo = mid + 1;
  }
  const auto allowed = allowed_at(values[lo]);
  std::vector<bool> used(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || !allowed[i][j]) continue;
      used[j] = true;
      if (detail::has_perfect(allowed, i + 1, used)) {
        out.pairs.emplace_back(i, j);
        break;
      }
      used[j] = false;
    }
  }
  return out;
}

}  // namespace twtsp
