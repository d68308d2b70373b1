#ifndef HAMCON_ORACLE_HPP
#define HAMCON_ORACLE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hamcon/graph.hpp"

namespace hamcon {

using Path = std::vector<VertexId>;

/// Global read-only view of a path cover, used by verification and
/// statistics outside the simulation.
struct PathCoverView {
  std::vector<Path> paths;

  std::size_t size() const { return paths.size(); }
};

/// Exhaustive backtracking search; n <= 12 enforced. Returns a witness
/// sequence or nullopt when none exists.
std::optional<Path> brute_force_hamiltonian(const Graph& g, bool want_cycle);

/// Same search with a permuted vertex ordering; used to cross-check the
/// primary enumeration on small instances.
std::optional<Path> brute_force_hamiltonian_shuffled(const Graph& g,
                                                     bool want_cycle,
                                                     std::uint64_t seed);

/// Number of neighbors of v inside the path's vertex set.
std::size_t path_degree(const Graph& g, const Path& path, VertexId v);

/// Path (u,...,v) is sociable when d_P(u) + d_P(v) + 1 <= |V(P)|.
bool is_sociable_ref(const Graph& g, const Path& path);

/// Path (u_1,...,u_l) is cycled when {u_1,u_l} is an edge or some path
/// edge {u_i,u_{i+1}} has both {u_1,u_{i+1}} and {u_i,u_l} present.
bool is_cycled_ref(const Graph& g, const Path& path);

/// Merge options between two disjoint paths: edges of Q along which P
/// merges into Q by an elementary merge (each edge counted once even if
/// both splice orientations work), plus endpoints of Q usable for a
/// concatenation.
struct PairMergeCount {
  std::size_t merge_edges = 0;
  std::size_t concat_vertices = 0;
  std::size_t total() const { return merge_edges + concat_vertices; }
};
PairMergeCount merge_count_pair(const Graph& g, const Path& p, const Path& q);

struct MergeCount {
  // m[i][j] = options for merging paths[i] into paths[j]; diagonal zero.
  std::vector<std::vector<PairMergeCount>> per_pair;
  std::vector<std::size_t> per_path;  // M(P) = sum over other paths
};
MergeCount merge_count(const Graph& g, const PathCoverView& cover);

/// Paths that are sociable or have a not-shorter path none of whose
/// vertices neighbor their endpoints. Returns indices into cover.paths.
std::vector<std::size_t> good_paths(const Graph& g,
                                    const PathCoverView& cover);

/// Structural validation; on failure `reason` holds the first violation.
bool verify_hamiltonian(const Graph& g, const Path& sequence, bool as_cycle,
                        std::string* reason = nullptr);
bool verify_cover(const Graph& g, const PathCoverView& view,
                  std::string* reason = nullptr);

/// True when no two matched edges share a vertex and no active edge has
/// both endpoints unmatched. `active` must be symmetric.
bool verify_maximal_matching(
    const Graph& g, const std::vector<std::pair<VertexId, VertexId>>& matching,
    const std::function<bool(VertexId, VertexId)>& active,
    std::string* reason = nullptr);

}  // namespace hamcon

#endif  // HAMCON_ORACLE_HPP
