#ifndef HAMCON_GENERATORS_HPP
#define HAMCON_GENERATORS_HPP

#include <cstdint>
#include <stdexcept>

#include "hamcon/graph.hpp"

namespace hamcon {

struct GenerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Two cliques on {0..n/2-1} and {n/2..n-1} plus the perfect matching
/// i <-> i + n/2. Every degree is exactly n/2. Requires even n >= 4.
Graph gen_two_cliques_matching(std::size_t n);

/// Random graph with edge probability 1/2 + surplus/2, then any vertex
/// short of degree ceil(n/2) is repaired with random extra edges.
/// Deterministic in (n, surplus, seed). Requires n >= 3.
Graph gen_random_dirac(std::size_t n, double surplus, std::uint64_t seed);

/// Ore-but-not-Dirac instance: a clique on n-1 vertices plus one
/// low-degree vertex wired to k in [2, ceil(n/2)-1] clique vertices,
/// optionally with a sparse matching removed from the clique. Verified
/// via classify, resampled on failure. Requires n >= 5.
Graph gen_ore_non_dirac(std::size_t n, std::uint64_t seed);

/// Block sizes for the layered RK construction around the low-degree
/// vertex v* = 0: A at distance 1, B at distance 2, C at distance 3,
/// D at distance 4. d_size == 0 gives the distance-3 family; d_size > 0
/// forces b_size == 1 and builds the distance-4 family.
struct RkShape {
  std::size_t a_size = 0;
  std::size_t b_size = 0;
  std::size_t c_size = 0;
  std::size_t d_size = 0;

  std::size_t total() const { return 1 + a_size + b_size + c_size + d_size; }
};

/// RK-but-not-Ore instance with the given layer shape. The result is
/// verified via classify (is_rk and not is_ore); random texture edges
/// are resampled up to a bounded retry count, after which the shape is
/// rejected as infeasible.
Graph gen_rk_non_ore(const RkShape& shape, std::uint64_t seed);

}  // namespace hamcon

#endif  // HAMCON_GENERATORS_HPP
