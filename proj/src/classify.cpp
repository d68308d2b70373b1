#include "hamcon/classify.hpp"

#include <algorithm>
#include <queue>

namespace hamcon {

std::vector<std::size_t> bfs_distances(const Graph& g, VertexId src) {
  std::vector<std::size_t> dist(g.vertex_count(), kUnreachable);
  std::queue<VertexId> q;
  dist[src] = 0;
  q.push(src);
  while (!q.empty()) {
    VertexId v = q.front();
    q.pop();
    for (VertexId u : g.neighbors(v)) {
      if (dist[u] == kUnreachable) {
        dist[u] = dist[v] + 1;
        q.push(u);
      }
    }
  }
  return dist;
}

bool check_degree_sum_distance(const Graph& g, VertexId u, VertexId v) {
  return g.degree(u) + g.degree(v) >= g.vertex_count();
}

GraphClassReport classify(const Graph& g) {
  GraphClassReport r;
  const std::size_t n = g.vertex_count();
  if (n == 0) return r;

  r.min_degree = g.min_degree();
  r.is_dirac = 2 * r.min_degree >= n;
  r.is_ore = true;
  r.is_rk = true;

  std::optional<Edge> ore_witness;
  std::optional<Edge> rk_witness;

  std::size_t diameter = 0;
  bool connected = true;
  for (VertexId u = 0; u < n; ++u) {
    auto dist = bfs_distances(g, u);
    for (VertexId v = u + 1; v < n; ++v) {
      if (dist[v] == kUnreachable) {
        if (connected) {
          connected = false;
          rk_witness = Edge{u, v};
        }
      } else {
        diameter = std::max(diameter, dist[v]);
      }
      if (g.has_edge(u, v)) continue;
      const std::size_t dsum = g.degree(u) + g.degree(v);
      if (r.is_ore && dsum < n) {
        r.is_ore = false;
        ore_witness = Edge{u, v};
      }
      if (r.is_rk && connected && dist[v] != kUnreachable &&
          dsum + dist[v] < n + 1) {
        r.is_rk = false;
        rk_witness = Edge{u, v};
      }
    }
  }
  if (!connected) {
    r.is_rk = false;
    r.diameter = kUnboundedDiameter;
  } else {
    r.diameter = diameter;
  }

  if (!r.is_rk) {
    r.witness = rk_witness;
  } else if (!r.is_ore) {
    r.witness = ore_witness;
  } else if (!r.is_dirac) {
    VertexId v_min = 0;
    for (VertexId v = 1; v < n; ++v) {
      if (g.degree(v) < g.degree(v_min)) v_min = v;
    }
    r.witness = Edge{v_min, v_min};
  }
  return r;
}

}  // namespace hamcon
