#ifndef HAMCON_CLASSIFY_HPP
#define HAMCON_CLASSIFY_HPP

#include <cstddef>
#include <optional>
#include <vector>

#include "hamcon/graph.hpp"

namespace hamcon {

inline constexpr std::size_t kUnboundedDiameter = static_cast<std::size_t>(-1);

/// Exact membership in the three promise classes.
///   Dirac: min degree >= n/2.
///   Ore:   every non-adjacent pair has degree sum >= n.
///   RK:    connected, and every non-adjacent pair has
///          d(u) + d(v) + dist(u, v) >= n + 1.
/// Containment Dirac => Ore => RK always holds.
struct GraphClassReport {
  bool is_dirac = false;
  bool is_ore = false;
  bool is_rk = false;
  std::size_t min_degree = 0;
  std::size_t diameter = 0;  // kUnboundedDiameter when disconnected
  // Violating pair of the strictest failing class. For a Dirac-only
  // violation this is (v, v) with v a minimum-degree vertex; for a
  // disconnected graph it is a pair in different components.
  std::optional<Edge> witness;
};

GraphClassReport classify(const Graph& g);

/// True iff d(u) + d(v) >= n. When true, dist(u, v) <= 2.
bool check_degree_sum_distance(const Graph& g, VertexId u, VertexId v);

/// BFS distances from src; unreachable vertices get kUnreachable.
inline constexpr std::size_t kUnreachable = static_cast<std::size_t>(-1);
std::vector<std::size_t> bfs_distances(const Graph& g, VertexId src);

}  // namespace hamcon

#endif  // HAMCON_CLASSIFY_HPP
