#include "hamcon/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hamcon {

namespace {
std::string pair_str(VertexId u, VertexId v) {
  return "(" + std::to_string(u) + ", " + std::to_string(v) + ")";
}
}  // namespace

Graph Graph::from_edge_list(std::size_t n, const std::vector<Edge>& edges) {
  Graph g;
  g.n_ = n;
  g.adj_.assign(n, {});
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) {
      throw std::invalid_argument("edge endpoint out of range: " +
                                  pair_str(u, v));
    }
    if (u == v) {
      throw std::invalid_argument("self-loop rejected: " + pair_str(u, v));
    }
    g.adj_[u].push_back(v);
    g.adj_[v].push_back(u);
  }
  g.finalize_from_sets();
  return g;
}

void Graph::finalize_from_sets() {
  m_ = 0;
  words_ = (n_ + 63) / 64;
  bits_.assign(n_ * words_, 0);
  for (VertexId v = 0; v < n_; ++v) {
    auto& nb = adj_[v];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (VertexId u : nb) {
      bits_[static_cast<std::size_t>(v) * words_ + (u >> 6)] |=
          std::uint64_t{1} << (u & 63);
    }
    m_ += nb.size();
  }
  m_ /= 2;
}

std::size_t Graph::min_degree() const {
  std::size_t d = n_ == 0 ? 0 : adj_[0].size();
  for (const auto& nb : adj_) d = std::min(d, nb.size());
  return d;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(m_);
  for (VertexId u = 0; u < n_; ++u) {
    for (VertexId v : adj_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

void Graph::write(std::ostream& os) const {
  os << n_ << ' ' << m_ << '\n';
  for (const auto& [u, v] : edges()) os << u << ' ' << v << '\n';
}

Graph Graph::read(std::istream& is) {
  std::size_t n = 0, m = 0;
  if (!(is >> n >> m)) throw std::invalid_argument("bad graph header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    VertexId u, v;
    if (!(is >> u >> v)) {
      throw std::invalid_argument("truncated edge list at line " +
                                  std::to_string(i + 2));
    }
    edges.emplace_back(u, v);
  }
  return from_edge_list(n, edges);
}

void Graph::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for write: " + path);
  write(os);
}

Graph Graph::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open for read: " + path);
  return read(is);
}

GraphBuilder::GraphBuilder(std::size_t n)
    : n_(n), adj_(n, std::vector<bool>(n, false)) {}

void GraphBuilder::add_edge(VertexId u, VertexId v) {
  if (u == v || u >= n_ || v >= n_) {
    throw std::invalid_argument("bad edge " + pair_str(u, v));
  }
  adj_[u][v] = adj_[v][u] = true;
}

void GraphBuilder::remove_edge(VertexId u, VertexId v) {
  adj_[u][v] = adj_[v][u] = false;
}

bool GraphBuilder::has_edge(VertexId u, VertexId v) const {
  return u != v && adj_[u][v];
}

std::size_t GraphBuilder::degree(VertexId v) const {
  std::size_t d = 0;
  for (bool b : adj_[v]) d += b;
  return d;
}

Graph GraphBuilder::build() const {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n_; ++u) {
    for (VertexId v = u + 1; v < n_; ++v) {
      if (adj_[u][v]) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edge_list(n_, edges);
}

}  // namespace hamcon
