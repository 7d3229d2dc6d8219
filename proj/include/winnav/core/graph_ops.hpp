#pragma once

#include <algorithm>
#include <limits>
#include <queue>
#include <vector>

#include "winnav/core/types.hpp"

namespace winnav {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Single-source shortest path lengths (Dijkstra). Ties between equal-length
// paths are broken toward the lower predecessor id so extracted paths are
// deterministic.
struct ShortestPaths {
  std::vector<double> dist;
  std::vector<int> prev;
};

inline ShortestPaths shortest_paths_from(const NavGraph& graph, int source) {
  std::size_t n = graph.num_nodes();
  if (source < 0 || static_cast<std::size_t>(source) >= n) throw DataError("unknown node id");
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const NavGraph::Edge& e : graph.edges) {
    adj[static_cast<std::size_t>(e.a)].push_back({e.b, e.length});
    adj[static_cast<std::size_t>(e.b)].push_back({e.a, e.length});
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());

  ShortestPaths sp;
  sp.dist.assign(n, kInf);
  sp.prev.assign(n, -1);
  sp.dist[static_cast<std::size_t>(source)] = 0.0;

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
  pq.push({0.0, source});
  std::vector<bool> done(n, false);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[static_cast<std::size_t>(u)]) continue;
    done[static_cast<std::size_t>(u)] = true;
    for (auto [v, w] : adj[static_cast<std::size_t>(u)]) {
      double nd = d + w;
      std::size_t vi = static_cast<std::size_t>(v);
      if (nd < sp.dist[vi] || (nd == sp.dist[vi] && u < sp.prev[vi])) {
        sp.dist[vi] = nd;
        sp.prev[vi] = u;
        pq.push({nd, v});
      }
    }
  }
  return sp;
}

// Geodesic length of the shortest path between two viewpoints.
inline double geodesic_distance(const NavGraph& graph, int a, int b) {
  std::size_t n = graph.num_nodes();
  if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
    throw DataError("unknown node id");
  if (a == b) return 0.0;
  ShortestPaths sp = shortest_paths_from(graph, a);
  return sp.dist[static_cast<std::size_t>(b)];
}

// Node sequence of the shortest path a -> b (inclusive of both ends).
inline std::vector<int> shortest_path_nodes(const NavGraph& graph, int a, int b) {
  ShortestPaths sp = shortest_paths_from(graph, a);
  if (sp.dist[static_cast<std::size_t>(b)] == kInf) throw DataError("goal unreachable");
  std::vector<int> path;
  for (int v = b; v != -1; v = sp.prev[static_cast<std::size_t>(v)]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  if (path.front() != a) throw DataError("goal unreachable");
  return path;
}

// Hop counts (edge counts) from a source, by BFS.
inline std::vector<int> hop_counts_from(const NavGraph& graph, int source) {
  std::size_t n = graph.num_nodes();
  std::vector<std::vector<int>> adj(n);
  for (const NavGraph::Edge& e : graph.edges) {
    adj[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  std::vector<int> hops(n, -1);
  std::queue<int> q;
  hops[static_cast<std::size_t>(source)] = 0;
  q.push(source);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (hops[static_cast<std::size_t>(v)] == -1) {
        hops[static_cast<std::size_t>(v)] = hops[static_cast<std::size_t>(u)] + 1;
        q.push(v);
      }
    }
  }
  return hops;
}

}  // namespace winnav
