#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "twtsp/error.hpp"

namespace twtsp {

using Vertex = int;
using Time = std::int64_t;
using Length = std::int64_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  Length len = 1;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected connected graph with integer edge lengths and its
/// shortest-path closure. Immutable once built.
class MetricGraph {
 public:
  MetricGraph() : MetricGraph(1, {}) {}

  /// Throws VertexOutOfRange, NonPositiveEdge or DisconnectedGraph.
  MetricGraph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw Error(Errc::InvalidParams, "graph needs at least one vertex");
    constexpr Length inf = std::numeric_limits<Length>::max() / 4;
    dist_.assign(static_cast<std::size_t>(n_) * n_, inf);
    for (Vertex v = 0; v < n_; ++v) at(v, v) = 0;
    for (const Edge& e : edges_) {
      if (e.u < 0 || e.u >= n_ || e.v < 0 || e.v >= n_) {
        throw Error(Errc::VertexOutOfRange, "edge (" + std::to_string(e.u) + "," +
                                                std::to_string(e.v) + ") with n=" +
                                                std::to_string(n_));
      }
      if (e.len < 1) {
        throw Error(Errc::NonPositiveEdge, "edge (" + std::to_string(e.u) + "," +
                                               std::to_string(e.v) + ") has length " +
                                               std::to_string(e.len));
      }
      if (e.u == e.v) continue;  // self-loops carry no distance
      at(e.u, e.v) = std::min(at(e.u, e.v), e.len);
      at(e.v, e.u) = at(e.u, e.v);
    }
    // Floyd-Warshall
    for (Vertex k = 0; k < n_; ++k) {
      for (Vertex i = 0; i < n_; ++i) {
        const Length ik = at(i, k);
        if (ik >= inf) continue;
        for (Vertex j = 0; j < n_; ++j) {
          const Length cand = ik + at(k, j);
          if (cand < at(i, j)) at(i, j) = cand;
        }
      }
    }
    diameter_ = 0;
    for (Vertex i = 0; i < n_; ++i) {
      for (Vertex j = 0; j < n_; ++j) {
        if (at(i, j) >= inf) {
          throw Error(Errc::DisconnectedGraph, "no path between " + std::to_string(i) +
                                                   " and " + std::to_string(j));
        }
        diameter_ = std::max(diameter_, at(i, j));
      }
    }
  }

  int size() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  Length dist(Vertex u, Vertex v) const { return dist_[index(u, v)]; }
  Length diameter() const noexcept { return diameter_; }
  bool contains(Vertex v) const noexcept { return v >= 0 && v < n_; }

  friend bool operator==(const MetricGraph& a, const MetricGraph& b) {
    return a.n_ == b.n_ && a.dist_ == b.dist_;
  }

 private:
  std::size_t index(Vertex u, Vertex v) const {
    return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
  }
  Length& at(Vertex u, Vertex v) { return dist_[index(u, v)]; }

  int n_;
  std::vector<Edge> edges_;
  std::vector<Length> dist_;
  Length diameter_ = 0;
};

inline MetricGraph build_metric(int n, std::vector<Edge> edges) {
  return MetricGraph(n, std::move(edges));
}

/// Unit-length path 0-1-...-(n-1).
inline MetricGraph path_graph(int n, Length len = 1) {
  std::vector<Edge> edges;
  for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1, len});
  return MetricGraph(n, std::move(edges));
}

/// Complete graph with every edge of length `len`.
inline MetricGraph uniform_complete_graph(int n, Length len) {
  std::vector<Edge> edges;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) edges.push_back({u, v, len});
  return MetricGraph(n, std::move(edges));
}

}  // namespace twtsp
