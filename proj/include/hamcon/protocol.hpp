#ifndef HAMCON_PROTOCOL_HPP
#define HAMCON_PROTOCOL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hamcon/engine.hpp"
#include "hamcon/graph.hpp"
#include "hamcon/oracle.hpp"

namespace hamcon {

/// Distributed per-vertex path state, as visible to instrumentation.
struct VertexPathState {
  VertexId path = kNoVertex;  // leader id doubles as the path id
  VertexId pred = kNoVertex;
  VertexId succ = kNoVertex;
  VertexId tree_parent = kNoVertex;
  VertexId partner = kNoVertex;
  bool is_endpoint() const { return pred == kNoVertex || succ == kNoVertex; }
};

struct ProtocolConfig {
  bool rk_mode = false;    // layered handling for Ore/RK inputs
  bool want_cycle = true;  // close the final path when it is cycled
  std::uint32_t iteration_cap = 0;  // 0 derives ceil(cap_factor * log2 n)
  double cap_factor = 200.0;
  std::uint32_t max_rounds = 0;  // 0 derives a generous bound
  int bit_budget_override = 0;
  std::ostream* trace = nullptr;
};

/// Snapshot of one iteration, collected by the harness observer.
struct IterationSample {
  std::uint32_t iteration = 0;
  std::size_t cover_before = 0;      // |P_i|
  std::size_t cycle_merges = 0;      // |L_i|
  std::size_t cover_mid = 0;         // |P^a_i|
  std::size_t chosen_merges = 0;     // |M_i| before the coin gate
  std::size_t executed_merges = 0;   // merges surviving the coin gate
  std::size_t cover_after = 0;       // |P_{i+1}|
  std::size_t good_paths = 0;        // oracle-good paths in P^a_i
  std::size_t good_with_useful = 0;  // of those, got a useful reservation
  // Distributed vs oracle predicate pairs on the mid-iteration cover,
  // for cycled/sociable cross-checks.
  std::vector<std::pair<bool, bool>> cycled_pairs;    // (distributed, oracle)
  std::vector<std::pair<bool, bool>> sociable_pairs;  // (distributed, oracle)
};

struct TreeDisciplineStats {
  std::size_t max_trees_per_edge = 0;
  std::size_t max_depth = 0;
  std::size_t snapshots = 0;
};

struct RunInstrumentation {
  bool collect_samples = false;      // per-iteration counters
  bool oracle_checks = false;        // good-path sets via the oracle (slow)
  bool check_covers = true;          // validate the cover at boundaries
  bool check_trees = false;          // tree discipline accounting

  PathCoverView initial_cover;
  std::vector<IterationSample> samples;
  TreeDisciplineStats trees;
};

struct HamResult {
  std::size_t n = 0;
  std::uint64_t seed = 0;
  bool success = false;
  bool is_cycle = false;
  std::string graph_class = "dirac";  // dirac | ore | rk
  bool d_nonempty = false;
  std::size_t drained_paths = 0;
  std::uint32_t iterations = 0;
  std::uint32_t congest_rounds = 0;
  std::uint64_t total_messages = 0;
  int peak_message_bits = 0;
  std::vector<std::size_t> cover_sizes;  // |P_i| trajectory
  Path cycle;                            // vertex sequence (path or cycle)
  std::string failure;

  std::string to_record() const;
};

/// Runs the randomized path-cover merging protocol on a Dirac graph and
/// returns the found Hamiltonian cycle. The caller is responsible for
/// the Dirac promise (run_rk handles the wider classes).
HamResult run_protocol(const Graph& g, std::uint64_t seed,
                       const ProtocolConfig& config = {},
                       RunInstrumentation* instr = nullptr);

}  // namespace hamcon

#endif  // HAMCON_PROTOCOL_HPP
