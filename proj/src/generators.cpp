#include "hamcon/generators.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "hamcon/classify.hpp"
#include "hamcon/random.hpp"

namespace hamcon {

Graph gen_two_cliques_matching(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    throw GenerationError("two-cliques generator needs even n >= 4, got " +
                          std::to_string(n));
  }
  const std::size_t half = n / 2;
  std::vector<Edge> edges;
  for (VertexId u = 0; u < half; ++u) {
    for (VertexId v = u + 1; v < half; ++v) {
      edges.emplace_back(u, v);
      edges.emplace_back(u + half, v + half);
    }
    edges.emplace_back(u, u + half);
  }
  return Graph::from_edge_list(n, edges);
}

Graph gen_random_dirac(std::size_t n, double surplus, std::uint64_t seed) {
  if (n < 3) throw GenerationError("random Dirac generator needs n >= 3");
  RandomStream rng(mix_key(seed, n));
  const double p = 0.5 + surplus / 2.0;
  GraphBuilder b(n);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (rng.uniform_real() < p) b.add_edge(u, v);
    }
  }
  const std::size_t want = (n + 1) / 2;
  for (VertexId v = 0; v < n; ++v) {
    while (b.degree(v) < want) {
      std::vector<VertexId> candidates;
      for (VertexId u = 0; u < n; ++u) {
        if (u != v && !b.has_edge(u, v)) candidates.push_back(u);
      }
      b.add_edge(v, candidates[rng.uniform(candidates.size())]);
    }
  }
  return b.build();
}

Graph gen_ore_non_dirac(std::size_t n, std::uint64_t seed) {
  if (n < 5) throw GenerationError("Ore generator needs n >= 5");
  for (int attempt = 0; attempt < 64; ++attempt) {
    RandomStream rng(mix_key(mix_key(seed, n), attempt));
    GraphBuilder b(n);
    const VertexId low = static_cast<VertexId>(n - 1);
    for (VertexId u = 0; u + 1 < n; ++u) {
      for (VertexId v = u + 1; v + 1 < n; ++v) b.add_edge(u, v);
    }
    // Degree of the low vertex stays below n/2 so Dirac fails.
    const std::uint64_t k_max = (n + 1) / 2 - 1;
    const std::uint64_t k = 2 + rng.uniform(k_max - 1);
    std::vector<VertexId> perm(n - 1);
    for (VertexId i = 0; i + 1 < n; ++i) perm[i] = i;
    for (std::size_t i = perm.size(); i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.uniform(i)]);
    }
    for (std::uint64_t i = 0; i < k; ++i) b.add_edge(low, perm[i]);
    // A sparse matching among the low vertex's non-neighbors keeps the
    // Ore sums intact when k >= 3.
    if (k >= 3 && n >= 8) {
      std::size_t removable = (perm.size() - k) / 2;
      std::size_t removals = removable == 0 ? 0 : rng.uniform(removable);
      for (std::size_t i = 0; i < removals; ++i) {
        b.remove_edge(perm[k + 2 * i], perm[k + 2 * i + 1]);
      }
    }
    Graph g = b.build();
    auto rep = classify(g);
    if (rep.is_ore && !rep.is_dirac) return g;
  }
  throw GenerationError("Ore generator failed for n = " + std::to_string(n));
}

Graph gen_rk_non_ore(const RkShape& shape, std::uint64_t seed) {
  const std::size_t a = shape.a_size, bsz = shape.b_size, c = shape.c_size,
                    d = shape.d_size;
  const std::size_t n = shape.total();
  if (a == 0 || bsz == 0 || c == 0) {
    throw GenerationError("RK shape needs nonempty A, B, C layers");
  }
  if (2 * a >= n) {
    throw GenerationError("RK shape: |A| must stay below n/2");
  }
  if (d > 0 && (bsz != 1 || c < 2 || a < d)) {
    throw GenerationError(
        "RK shape with D nonempty needs |B| = 1, |C| >= 2, |A| >= |D|");
  }

  const VertexId a_lo = 1, a_hi = static_cast<VertexId>(a);
  const VertexId b_lo = a_hi + 1, b_hi = static_cast<VertexId>(a + bsz);
  const VertexId c_lo = b_hi + 1, c_hi = static_cast<VertexId>(a + bsz + c);
  const VertexId d_lo = c_hi + 1, d_hi = static_cast<VertexId>(n - 1);

  for (int attempt = 0; attempt < 64; ++attempt) {
    RandomStream rng(mix_key(mix_key(seed, n), attempt));
    GraphBuilder b(n);
    for (VertexId u = a_lo; u <= a_hi; ++u) {
      b.add_edge(0, u);
      for (VertexId v = u + 1; v <= a_hi; ++v) b.add_edge(u, v);
    }
    for (VertexId u = b_lo; u <= b_hi; ++u) {
      for (VertexId v = a_lo; v <= a_hi; ++v) b.add_edge(u, v);
      for (VertexId v = u + 1; v <= b_hi; ++v) b.add_edge(u, v);
    }
    for (VertexId u = c_lo; u <= c_hi; ++u) {
      for (VertexId v = b_lo; v <= b_hi; ++v) b.add_edge(u, v);
      for (VertexId v = u + 1; v <= c_hi; ++v) b.add_edge(u, v);
    }
    if (d > 0) {
      for (VertexId u = d_lo; u <= d_hi; ++u) {
        for (VertexId v = c_lo; v <= c_hi; ++v) b.add_edge(u, v);
        for (VertexId v = u + 1; v <= d_hi; ++v) b.add_edge(u, v);
      }
    }
    // Texture: drop a random matching inside B on retrying shapes that
    // stay heavy without it.
    if (d == 0 && bsz >= 2 && n >= 8 && attempt % 2 == 0) {
      std::size_t removals = rng.uniform(bsz / 2 + 1);
      for (std::size_t i = 0; i + 1 < 2 * removals; i += 2) {
        VertexId u = b_lo + static_cast<VertexId>(i);
        VertexId v = b_lo + static_cast<VertexId>(i + 1);
        if (b.degree(u) > (n + 1) / 2 && b.degree(v) > (n + 1) / 2) {
          b.remove_edge(u, v);
        }
      }
    }
    Graph g = b.build();
    auto rep = classify(g);
    if (rep.is_rk && !rep.is_ore) return g;
  }
  throw GenerationError("RK generator: infeasible shape");
}

}  // namespace hamcon
