#ifndef HAMCON_GRAPH_HPP
#define HAMCON_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hamcon {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = static_cast<VertexId>(-1);

using Edge = std::pair<VertexId, VertexId>;

/// Immutable undirected simple graph. Neighbor lists are sorted, so
/// iteration order is deterministic and membership is O(log d).
class Graph {
 public:
  Graph() = default;

  /// Builds the symmetric closure of `edges` on vertices 0..n-1.
  /// Duplicate edges collapse. Throws std::invalid_argument on a
  /// self-loop or an out-of-range endpoint, naming the offending pair.
  static Graph from_edge_list(std::size_t n, const std::vector<Edge>& edges);

  std::size_t vertex_count() const { return n_; }
  std::size_t edge_count() const { return m_; }

  std::span<const VertexId> neighbors(VertexId v) const {
    return {adj_[v].data(), adj_[v].size()};
  }
  std::size_t degree(VertexId v) const { return adj_[v].size(); }
  std::size_t min_degree() const;

  bool has_edge(VertexId u, VertexId v) const {
    return u != v && bits_[static_cast<std::size_t>(u) * words_ + (v >> 6)] >>
                         (v & 63) & 1;
  }

  /// Edges with u < v, lexicographically sorted.
  std::vector<Edge> edges() const;

  bool operator==(const Graph& other) const {
    return n_ == other.n_ && adj_ == other.adj_;
  }

  /// Text format: first line "n m", then m lines "u v" with u < v in
  /// lexicographic order. Round-trips bit-exactly.
  void write(std::ostream& os) const;
  static Graph read(std::istream& is);
  void save(const std::string& path) const;
  static Graph load(const std::string& path);

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t words_ = 0;
  std::vector<std::vector<VertexId>> adj_;
  std::vector<std::uint64_t> bits_;  // row-major adjacency bitmap

  void finalize_from_sets();
  friend class GraphBuilder;
};

/// Mutable staging area used by generators before freezing into a Graph.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n);

  void add_edge(VertexId u, VertexId v);
  void remove_edge(VertexId u, VertexId v);
  bool has_edge(VertexId u, VertexId v) const;
  std::size_t degree(VertexId v) const;
  std::size_t vertex_count() const { return n_; }

  Graph build() const;

 private:
  std::size_t n_;
  std::vector<std::vector<bool>> adj_;
};

}  // namespace hamcon

#endif  // HAMCON_GRAPH_HPP
