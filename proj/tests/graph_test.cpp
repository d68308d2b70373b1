#include "hamcon/graph.hpp"

#include <set>
#include <sstream>

#include "doctest.h"
#include "hamcon/classify.hpp"
#include "hamcon/generators.hpp"

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

Graph star_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (VertexId v = 1; v < n; ++v) edges.emplace_back(0, v);
  return Graph::from_edge_list(n, edges);
}

}  // namespace

TEST_CASE("from_edge_list builds K4") {
  Graph g = Graph::from_edge_list(
      4, {{{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}, {1, 3}}});
  CHECK(g == k_complete(4));
  CHECK(g.edge_count() == 6);
  CHECK(g.degree(0) == 3);
  CHECK(g.has_edge(2, 0));
  CHECK_FALSE(g.has_edge(1, 1));
}

TEST_CASE("from_edge_list rejects self-loops and bad ids") {
  CHECK_THROWS_WITH_AS(Graph::from_edge_list(3, {{{0, 0}}}),
                       doctest::Contains("(0, 0)"), std::invalid_argument);
  CHECK_THROWS_AS(Graph::from_edge_list(3, {{{1, 3}}}), std::invalid_argument);
}

TEST_CASE("from_edge_list collapses duplicates and symmetrizes") {
  Graph g = Graph::from_edge_list(3, {{{0, 1}, {1, 0}, {0, 1}}});
  CHECK(g.edge_count() == 1);
  CHECK(g.has_edge(1, 0));
}

TEST_CASE("explicit two-clique edge list matches the generator") {
  // Cliques {0,1,2} and {3,4,5} plus the matching i <-> i+3.
  Graph g = Graph::from_edge_list(6, {{{0, 1},
                                       {0, 2},
                                       {1, 2},
                                       {3, 4},
                                       {3, 5},
                                       {4, 5},
                                       {0, 3},
                                       {1, 4},
                                       {2, 5}}});
  CHECK(g == gen_two_cliques_matching(6));
}

TEST_CASE("classify on K4") {
  auto r = classify(k_complete(4));
  CHECK(r.is_dirac);
  CHECK(r.is_ore);
  CHECK(r.is_rk);
  CHECK(r.diameter == 1);
  CHECK_FALSE(r.witness.has_value());
}

TEST_CASE("classify on the 4-vertex path graph") {
  auto r = classify(path_graph(4));
  CHECK_FALSE(r.is_dirac);
  CHECK(r.min_degree == 1);
}

TEST_CASE("classify two-cliques n=8 as Dirac") {
  auto r = classify(gen_two_cliques_matching(8));
  CHECK(r.is_dirac);
  CHECK(r.is_ore);
  CHECK(r.is_rk);
  CHECK(r.min_degree == 4);
  CHECK(r.diameter == 2);
}

TEST_CASE("classify reports disconnection as non-RK") {
  Graph g = Graph::from_edge_list(4, {{{0, 1}, {2, 3}}});
  auto r = classify(g);
  CHECK_FALSE(r.is_rk);
  CHECK_FALSE(r.is_ore);
  CHECK(r.diameter == kUnboundedDiameter);
  REQUIRE(r.witness.has_value());
  auto [u, v] = *r.witness;
  auto dist = bfs_distances(g, u);
  CHECK(dist[v] == kUnreachable);
}

TEST_CASE("degree-sum distance check") {
  Graph k4 = k_complete(4);
  CHECK(check_degree_sum_distance(k4, 0, 1));
  CHECK(bfs_distances(k4, 0)[1] == 1);

  Graph tc = gen_two_cliques_matching(8);
  for (VertexId u = 0; u < 4; ++u) {
    for (VertexId v = 4; v < 8; ++v) {
      CHECK(check_degree_sum_distance(tc, u, v));
      CHECK(bfs_distances(tc, u)[v] <= 2);
    }
  }

  Graph star = star_graph(5);
  CHECK_FALSE(check_degree_sum_distance(star, 1, 2));
}

TEST_CASE("two-cliques generator degrees and shape") {
  SUBCASE("n=4 is C4: K4 minus one perfect matching") {
    Graph g = gen_two_cliques_matching(4);
    CHECK(g.edge_count() == 4);
    for (VertexId v = 0; v < 4; ++v) CHECK(g.degree(v) == 2);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(2, 3));
    CHECK(g.has_edge(0, 2));
    CHECK(g.has_edge(1, 3));
    CHECK_FALSE(g.has_edge(0, 3));
    CHECK_FALSE(g.has_edge(1, 2));
  }
  SUBCASE("n=6 every degree 3") {
    Graph g = gen_two_cliques_matching(6);
    for (VertexId v = 0; v < 6; ++v) CHECK(g.degree(v) == 3);
  }
  SUBCASE("odd n rejected") {
    CHECK_THROWS_AS(gen_two_cliques_matching(3), GenerationError);
  }
}

TEST_CASE("random Dirac generator") {
  SUBCASE("always Dirac at surplus 0") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
      CHECK(classify(gen_random_dirac(8, 0.0, seed)).is_dirac);
      CHECK(classify(gen_random_dirac(9, 0.0, seed)).is_dirac);
    }
  }
  SUBCASE("surplus 1 gives the complete graph") {
    CHECK(gen_random_dirac(8, 1.0, 123) == k_complete(8));
  }
  SUBCASE("deterministic in the seed") {
    CHECK(gen_random_dirac(16, 0.1, 7) == gen_random_dirac(16, 0.1, 7));
    CHECK(gen_random_dirac(16, 0.1, 7) != gen_random_dirac(16, 0.1, 8));
  }
}

TEST_CASE("classify monotone under edge addition") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Graph g = gen_random_dirac(10, 0.0, seed);
    auto before = classify(g);
    auto edges = g.edges();
    // add one absent edge
    bool added = false;
    for (VertexId u = 0; u < 10 && !added; ++u) {
      for (VertexId v = u + 1; v < 10 && !added; ++v) {
        if (!g.has_edge(u, v)) {
          edges.emplace_back(u, v);
          added = true;
        }
      }
    }
    auto after = classify(Graph::from_edge_list(10, edges));
    if (before.is_dirac) CHECK(after.is_dirac);
    if (before.is_ore) CHECK(after.is_ore);
    if (before.is_rk) CHECK(after.is_rk);
  }
}

TEST_CASE("Dirac graphs have diameter at most 2") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Graph g = gen_random_dirac(12 + seed, 0.0, seed);
    auto r = classify(g);
    REQUIRE(r.is_dirac);
    CHECK(r.diameter <= 2);
  }
}

TEST_CASE("Ore generator yields Ore non-Dirac") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    for (std::size_t n : {6, 9, 12, 17}) {
      auto r = classify(gen_ore_non_dirac(n, seed));
      CHECK(r.is_ore);
      CHECK_FALSE(r.is_dirac);
      CHECK(r.is_rk);
    }
  }
}

TEST_CASE("RK generator yields RK non-Ore") {
  SUBCASE("basic shape |A|=2 |B|=3 |C|=2") {
    RkShape shape{2, 3, 2, 0};
    REQUIRE(shape.total() == 8);
    auto r = classify(gen_rk_non_ore(shape, 5));
    CHECK(r.is_rk);
    CHECK_FALSE(r.is_ore);
  }
  SUBCASE("assorted shapes") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      for (RkShape shape : {RkShape{3, 4, 3, 0}, RkShape{2, 6, 4, 0},
                            RkShape{4, 3, 2, 0}}) {
        auto r = classify(gen_rk_non_ore(shape, seed));
        CHECK(r.is_rk);
        CHECK_FALSE(r.is_ore);
      }
    }
  }
  SUBCASE("empty C rejected") {
    CHECK_THROWS_AS(gen_rk_non_ore(RkShape{2, 3, 0, 0}, 1), GenerationError);
  }
  SUBCASE("D nonempty shape reaches distance 4") {
    RkShape shape{2, 1, 2, 1};
    Graph g = gen_rk_non_ore(shape, 3);
    auto dist = bfs_distances(g, 0);
    CHECK(*std::max_element(dist.begin(), dist.end()) == 4);
    auto r = classify(g);
    CHECK(r.is_rk);
    CHECK_FALSE(r.is_ore);
  }
}

TEST_CASE("graph file format round-trips bit-exactly") {
  Graph g = gen_random_dirac(12, 0.2, 99);
  std::ostringstream first;
  g.write(first);
  std::istringstream in(first.str());
  Graph back = Graph::read(in);
  CHECK(back == g);
  std::ostringstream second;
  back.write(second);
  CHECK(second.str() == first.str());
}
