#include "hamcon/oracle.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "hamcon/random.hpp"

namespace hamcon {

namespace {

bool extend(const Graph& g, const std::vector<VertexId>& order, Path& path,
            std::vector<bool>& used, bool want_cycle) {
  const std::size_t n = g.vertex_count();
  if (path.size() == n) {
    return !want_cycle || g.has_edge(path.back(), path.front());
  }
  for (VertexId v : order) {
    if (used[v]) continue;
    if (!path.empty() && !g.has_edge(path.back(), v)) continue;
    used[v] = true;
    path.push_back(v);
    if (extend(g, order, path, used, want_cycle)) return true;
    path.pop_back();
    used[v] = false;
  }
  return false;
}

std::optional<Path> search(const Graph& g, bool want_cycle,
                           const std::vector<VertexId>& order) {
  const std::size_t n = g.vertex_count();
  if (n > 12) throw std::invalid_argument("brute force capped at n <= 12");
  if (n == 0) return std::nullopt;
  if (want_cycle && n < 3) return std::nullopt;
  std::vector<bool> used(n, false);
  Path path;
  path.reserve(n);
  if (want_cycle) {
    // Any cycle visits vertex 0; fixing it prunes rotations.
    used[0] = true;
    path.push_back(0);
  }
  if (extend(g, order, path, used, want_cycle)) return path;
  return std::nullopt;
}

}  // namespace

std::optional<Path> brute_force_hamiltonian(const Graph& g, bool want_cycle) {
  std::vector<VertexId> order(g.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  return search(g, want_cycle, order);
}

std::optional<Path> brute_force_hamiltonian_shuffled(const Graph& g,
                                                     bool want_cycle,
                                                     std::uint64_t seed) {
  std::vector<VertexId> order(g.vertex_count());
  std::iota(order.begin(), order.end(), 0);
  RandomStream rng(mix_key(seed, g.vertex_count()));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.uniform(i)]);
  }
  return search(g, want_cycle, order);
}

std::size_t path_degree(const Graph& g, const Path& path, VertexId v) {
  std::size_t d = 0;
  for (VertexId u : path) d += g.has_edge(u, v);
  return d;
}

namespace {
void require_valid_path(const Graph& g, const Path& path) {
  std::string reason;
  PathCoverView one{{path}};
  if (path.empty()) throw std::invalid_argument("empty path");
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!g.has_edge(path[i], path[i + 1])) {
      throw std::invalid_argument("not a path in G: missing edge " +
                                  std::to_string(path[i]) + "-" +
                                  std::to_string(path[i + 1]));
    }
  }
  std::vector<VertexId> sorted = path;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("repeated vertex in path");
  }
}
}  // namespace

bool is_sociable_ref(const Graph& g, const Path& path) {
  require_valid_path(g, path);
  return path_degree(g, path, path.front()) +
             path_degree(g, path, path.back()) + 1 <=
         path.size();
}

bool is_cycled_ref(const Graph& g, const Path& path) {
  require_valid_path(g, path);
  if (path.size() < 2) return false;
  if (g.has_edge(path.front(), path.back())) return true;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (g.has_edge(path.front(), path[i + 1]) &&
        g.has_edge(path[i], path.back())) {
      return true;
    }
  }
  return false;
}

PairMergeCount merge_count_pair(const Graph& g, const Path& p,
                                const Path& q) {
  PairMergeCount c;
  const VertexId u = p.front(), v = p.back();
  for (std::size_t i = 0; i + 1 < q.size(); ++i) {
    const VertexId a = q[i], b = q[i + 1];
    const bool forward = g.has_edge(u, a) && g.has_edge(v, b);
    const bool reverse = g.has_edge(u, b) && g.has_edge(v, a);
    if (forward || reverse) ++c.merge_edges;
  }
  for (VertexId end : {q.front(), q.back()}) {
    if (g.has_edge(u, end) || g.has_edge(v, end)) ++c.concat_vertices;
    if (q.size() == 1) break;  // single endpoint
  }
  return c;
}

MergeCount merge_count(const Graph& g, const PathCoverView& cover) {
  const std::size_t k = cover.paths.size();
  MergeCount mc;
  mc.per_pair.assign(k, std::vector<PairMergeCount>(k));
  mc.per_path.assign(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      mc.per_pair[i][j] =
          merge_count_pair(g, cover.paths[i], cover.paths[j]);
      mc.per_path[i] += mc.per_pair[i][j].total();
    }
  }
  return mc;
}

std::vector<std::size_t> good_paths(const Graph& g,
                                    const PathCoverView& cover) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cover.paths.size(); ++i) {
    const Path& p = cover.paths[i];
    bool good = is_sociable_ref(g, p);
    for (std::size_t j = 0; !good && j < cover.paths.size(); ++j) {
      if (j == i) continue;
      const Path& other = cover.paths[j];
      if (other.size() < p.size()) continue;
      if (path_degree(g, other, p.front()) == 0 &&
          path_degree(g, other, p.back()) == 0) {
        good = true;
      }
    }
    if (good) out.push_back(i);
  }
  return out;
}

namespace {
bool fail(std::string* reason, const std::string& why) {
  if (reason) *reason = why;
  return false;
}
}  // namespace

bool verify_hamiltonian(const Graph& g, const Path& sequence, bool as_cycle,
                        std::string* reason) {
  const std::size_t n = g.vertex_count();
  if (sequence.size() != n) {
    return fail(reason, "sequence visits " + std::to_string(sequence.size()) +
                            " of " + std::to_string(n) + " vertices");
  }
  std::vector<bool> seen(n, false);
  for (VertexId v : sequence) {
    if (v >= n) return fail(reason, "vertex out of range");
    if (seen[v]) {
      return fail(reason, "repeated vertex " + std::to_string(v));
    }
    seen[v] = true;
  }
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
    if (!g.has_edge(sequence[i], sequence[i + 1])) {
      return fail(reason, "missing edge " + std::to_string(sequence[i]) +
                              "-" + std::to_string(sequence[i + 1]));
    }
  }
  if (as_cycle) {
    if (n < 3) return fail(reason, "no cycle on fewer than 3 vertices");
    if (!g.has_edge(sequence.back(), sequence.front())) {
      return fail(reason, "missing closing edge");
    }
  }
  return true;
}

bool verify_cover(const Graph& g, const PathCoverView& view,
                  std::string* reason) {
  std::vector<bool> seen(g.vertex_count(), false);
  std::size_t covered = 0;
  for (const Path& p : view.paths) {
    if (p.empty()) return fail(reason, "empty path in cover");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] >= g.vertex_count()) return fail(reason, "vertex out of range");
      if (seen[p[i]]) {
        return fail(reason,
                    "vertex " + std::to_string(p[i]) + " covered twice");
      }
      seen[p[i]] = true;
      ++covered;
      if (i + 1 < p.size() && !g.has_edge(p[i], p[i + 1])) {
        return fail(reason, "missing edge " + std::to_string(p[i]) + "-" +
                                std::to_string(p[i + 1]));
      }
    }
  }
  if (covered != g.vertex_count()) {
    return fail(reason, "cover misses " +
                            std::to_string(g.vertex_count() - covered) +
                            " vertices");
  }
  return true;
}

bool verify_maximal_matching(
    const Graph& g, const std::vector<std::pair<VertexId, VertexId>>& matching,
    const std::function<bool(VertexId, VertexId)>& active,
    std::string* reason) {
  std::vector<bool> matched(g.vertex_count(), false);
  for (auto [u, v] : matching) {
    if (!g.has_edge(u, v)) {
      return fail(reason, "matched pair is not an edge");
    }
    if (matched[u] || matched[v]) {
      return fail(reason, "vertex matched twice");
    }
    matched[u] = matched[v] = true;
  }
  for (VertexId u = 0; u < g.vertex_count(); ++u) {
    if (matched[u]) continue;
    for (VertexId v : g.neighbors(u)) {
      if (!matched[v] && active(u, v)) {
        return fail(reason, "active edge " + std::to_string(u) + "-" +
                                std::to_string(v) + " has both ends free");
      }
    }
  }
  return true;
}

}  // namespace hamcon
