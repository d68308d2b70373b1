#include "hamcon/oracle.hpp"

#include <algorithm>
#include <numeric>

#include "doctest.h"
#include "hamcon/classify.hpp"
#include "hamcon/generators.hpp"
#include "hamcon/random.hpp"

using namespace hamcon;

namespace {

Graph k_complete(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  }
  return Graph::from_edge_list(n, edges);
}

Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return Graph::from_edge_list(n, edges);
}

Graph random_graph(std::size_t n, double p, RandomStream& rng) {
  std::vector<Edge> edges;
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = u + 1; v < n; ++v) {
      if (rng.uniform_real() < p) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edge_list(n, edges);
}

// Greedy random simple path of length >= 2, or empty on failure.
Path random_path(const Graph& g, std::size_t max_len, RandomStream& rng) {
  const std::size_t n = g.vertex_count();
  std::vector<bool> used(n, false);
  Path p;
  VertexId v = static_cast<VertexId>(rng.uniform(n));
  p.push_back(v);
  used[v] = true;
  while (p.size() < max_len) {
    std::vector<VertexId> options;
    for (VertexId u : g.neighbors(p.back())) {
      if (!used[u]) options.push_back(u);
    }
    if (options.empty()) break;
    VertexId next = options[rng.uniform(options.size())];
    used[next] = true;
    p.push_back(next);
  }
  if (p.size() < 2) return {};
  return p;
}

// Random cover with every path of size >= 2, built by cutting a random
// permutation at non-adjacent junctions; retries until no singleton.
PathCoverView random_cover(const Graph& g, RandomStream& rng) {
  const std::size_t n = g.vertex_count();
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<VertexId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
      std::swap(perm[i - 1], perm[rng.uniform(i)]);
    }
    PathCoverView cover;
    Path current{perm[0]};
    bool ok = true;
    for (std::size_t i = 1; i < n; ++i) {
      bool cut = !g.has_edge(current.back(), perm[i]) ||
                 (current.size() >= 2 && rng.uniform(3) == 0);
      if (cut) {
        if (current.size() < 2) {
          ok = false;
          break;
        }
        cover.paths.push_back(std::move(current));
        current = {perm[i]};
      } else {
        current.push_back(perm[i]);
      }
    }
    if (!ok || current.size() < 2) continue;
    cover.paths.push_back(std::move(current));
    if (cover.paths.size() >= 2) return cover;
  }
  return {};
}

}  // namespace

TEST_CASE("brute force finds a K4 cycle and rejects impossible cases") {
  Graph k4 = k_complete(4);
  auto cycle = brute_force_hamiltonian(k4, true);
  REQUIRE(cycle.has_value());
  CHECK(verify_hamiltonian(k4, *cycle, true));

  Graph star = Graph::from_edge_list(4, {{{0, 1}, {0, 2}, {0, 3}}});
  CHECK_FALSE(brute_force_hamiltonian(star, false).has_value());
  CHECK_FALSE(brute_force_hamiltonian(star, true).has_value());

  CHECK_THROWS_AS(brute_force_hamiltonian(k_complete(13), true),
                  std::invalid_argument);
}

TEST_CASE("sampled small Dirac graphs always have a cycle") {
  std::size_t found = 0, total = 0;
  for (std::size_t n = 4; n <= 8; ++n) {
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
      Graph g = gen_random_dirac(n, 0.0, seed * 31 + n);
      ++total;
      auto cycle = brute_force_hamiltonian(g, true);
      if (cycle && verify_hamiltonian(g, *cycle, true)) ++found;
    }
  }
  CHECK(found == total);
}

TEST_CASE("both enumeration orders agree on existence") {
  RandomStream rng(404);
  for (int i = 0; i < 60; ++i) {
    std::size_t n = 4 + rng.uniform(5);
    Graph g = random_graph(n, 0.25 + 0.5 * rng.uniform_real(), rng);
    for (bool want_cycle : {false, true}) {
      auto a = brute_force_hamiltonian(g, want_cycle);
      auto b = brute_force_hamiltonian_shuffled(g, want_cycle, i);
      CHECK(a.has_value() == b.has_value());
      if (b) CHECK(verify_hamiltonian(g, *b, want_cycle));
    }
  }
}

TEST_CASE("cycled and sociable reference predicates") {
  SUBCASE("2-vertex path with its edge is cycled, not sociable") {
    Graph g = path_graph(2);
    Path p{0, 1};
    CHECK(is_cycled_ref(g, p));
    CHECK_FALSE(is_sociable_ref(g, p));
  }
  SUBCASE("chordless 4-path is sociable, not cycled") {
    Graph g = path_graph(4);
    Path p{0, 1, 2, 3};
    CHECK_FALSE(is_cycled_ref(g, p));
    CHECK(is_sociable_ref(g, p));
  }
  SUBCASE("3-path with endpoint chord is cycled") {
    Graph g = Graph::from_edge_list(3, {{{0, 1}, {1, 2}, {0, 2}}});
    CHECK(is_cycled_ref(g, {0, 1, 2}));
  }
  SUBCASE("4-path cycled through a rotation edge without the closing edge") {
    // Edges {u1,u3} and {u2,u4} but no {u1,u4}.
    Graph g = Graph::from_edge_list(
        4, {{{0, 1}, {1, 2}, {2, 3}, {0, 2}, {1, 3}}});
    Path p{0, 1, 2, 3};
    REQUIRE_FALSE(g.has_edge(0, 3));
    CHECK(is_cycled_ref(g, p));
  }
  SUBCASE("invalid paths are rejected") {
    Graph g = path_graph(4);
    CHECK_THROWS_AS(is_cycled_ref(g, {0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(is_sociable_ref(g, {0, 1, 0}), std::invalid_argument);
  }
}

TEST_CASE("not cycled implies sociable on random samples") {
  RandomStream rng(777);
  std::size_t checked = 0;
  while (checked < 10000) {
    std::size_t n = 6 + rng.uniform(10);
    Graph g = random_graph(n, 0.2 + 0.6 * rng.uniform_real(), rng);
    Path p = random_path(g, 2 + rng.uniform(n), rng);
    if (p.empty()) continue;
    ++checked;
    if (!is_cycled_ref(g, p)) CHECK(is_sociable_ref(g, p));
  }
}

TEST_CASE("merge counting on the frozen 2x2 example") {
  // P = (0,1), Q = (2,3); crossing edges {0,2} and {1,3} only.
  Graph g = Graph::from_edge_list(4, {{{0, 1}, {2, 3}, {0, 2}, {1, 3}}});
  auto c = merge_count_pair(g, {0, 1}, {2, 3});
  CHECK(c.concat_vertices == 2);
  CHECK(c.merge_edges == 1);  // the edge (2,3) splices (2,0,1,3)
  CHECK(c.total() == 3);
}

TEST_CASE("zero crossing edges mean zero merges and a nonpositive bound") {
  Graph g = Graph::from_edge_list(6, {{{0, 1}, {2, 3}, {3, 4}, {4, 5}}});
  Path p{0, 1}, q{2, 3, 4, 5};
  auto c = merge_count_pair(g, p, q);
  CHECK(c.total() == 0);
  auto dq = static_cast<long>(path_degree(g, q, 0) + path_degree(g, q, 1));
  CHECK(dq - static_cast<long>(q.size()) + 1 <= 0);
}

TEST_CASE("merge count lower bound holds on random Dirac samples") {
  RandomStream rng(31337);
  std::size_t checked = 0;
  while (checked < 10000) {
    std::size_t n = 8 + rng.uniform(8);
    Graph g = gen_random_dirac(n, 0.1 * rng.uniform(4), rng.next());
    auto cover = random_cover(g, rng);
    if (cover.paths.size() < 2) continue;
    const Path& p = cover.paths[0];
    const Path& q = cover.paths[1];
    ++checked;
    long bound = static_cast<long>(path_degree(g, q, p.front())) +
                 static_cast<long>(path_degree(g, q, p.back())) -
                 static_cast<long>(q.size()) + 1;
    CHECK(static_cast<long>(merge_count_pair(g, p, q).total()) >= bound);
  }
}

TEST_CASE("good paths have at least cover-many merge options") {
  RandomStream rng(2718);
  std::size_t covers = 0;
  while (covers < 1000) {
    std::size_t n = 8 + rng.uniform(8);
    Graph g = gen_random_dirac(n, 0.0, rng.next());
    auto cover = random_cover(g, rng);
    if (cover.paths.size() < 2) continue;
    REQUIRE(verify_cover(g, cover));
    ++covers;
    auto mc = merge_count(g, cover);
    for (std::size_t i : good_paths(g, cover)) {
      CHECK(mc.per_path[i] >= cover.paths.size());
    }
  }
}

TEST_CASE("a non-cycled path is always good") {
  RandomStream rng(555);
  std::size_t checked = 0;
  while (checked < 300) {
    Graph g = gen_random_dirac(10 + rng.uniform(6), 0.0, rng.next());
    auto cover = random_cover(g, rng);
    if (cover.paths.size() < 2) continue;
    ++checked;
    auto good = good_paths(g, cover);
    for (std::size_t i = 0; i < cover.paths.size(); ++i) {
      if (!is_cycled_ref(g, cover.paths[i])) {
        CHECK(std::count(good.begin(), good.end(), i) == 1);
      }
    }
  }
}

TEST_CASE("hamiltonian verifier catches structural breakage") {
  Graph k4 = k_complete(4);
  CHECK(verify_hamiltonian(k4, {0, 1, 2, 3}, true));
  std::string reason;
  CHECK_FALSE(verify_hamiltonian(k4, {0, 1, 2, 0}, true, &reason));
  CHECK(reason.find("repeated") != std::string::npos);
  CHECK_FALSE(verify_hamiltonian(k4, {0, 1, 2}, false, &reason));
  Graph c4 = gen_two_cliques_matching(4);
  CHECK_FALSE(verify_hamiltonian(c4, {0, 3, 1, 2}, false, &reason));
  CHECK(reason.find("missing edge") != std::string::npos);
}

TEST_CASE("cover verifier catches duplicates and gaps") {
  Graph g = k_complete(5);
  std::string reason;
  CHECK(verify_cover(g, {{{0, 1}, {2, 3, 4}}}));
  CHECK_FALSE(verify_cover(g, {{{0, 1}, {1, 2, 3, 4}}}, &reason));
  CHECK(reason.find("twice") != std::string::npos);
  CHECK_FALSE(verify_cover(g, {{{0, 1}, {2, 3}}}, &reason));
  CHECK(reason.find("misses") != std::string::npos);
}
