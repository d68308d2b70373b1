#ifndef HAMCON_ENGINE_HPP
#define HAMCON_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamcon/graph.hpp"
#include "hamcon/message.hpp"
#include "hamcon/random.hpp"

namespace hamcon {

/// Raised when a program breaks the model: oversized message, duplicate
/// send on an edge direction, send to a non-neighbor, or send after halt.
struct CongestViolation : std::runtime_error {
  CongestViolation(std::string what, std::uint32_t round, VertexId sender,
                   VertexId receiver)
      : std::runtime_error(std::move(what)),
        round(round),
        sender(sender),
        receiver(receiver) {}
  std::uint32_t round;
  VertexId sender;
  VertexId receiver;
};

class RoundEngine;

/// Per-round view handed to a vertex program. A program sees nothing
/// beyond its own id, the graph size, its neighbor ids, this round's
/// mail, and a private randomness stream.
class StepContext {
 public:
  VertexId self() const { return self_; }
  std::size_t n() const { return n_; }
  std::uint32_t round() const { return round_; }
  std::span<const VertexId> neighbors() const { return neighbors_; }
  std::span<const Envelope> inbox() const { return inbox_; }
  RandomStream& rng() { return rng_; }

  /// Extra deterministic stream keyed by caller-chosen values (used for
  /// per-path coins keyed by (leader, iteration)).
  RandomStream derive(std::uint64_t key1, std::uint64_t key2) const {
    return derive_randomness(master_seed_, key1, key2 ^ 0x5AU);
  }

  /// Queue a message to a neighbor; delivered at the start of the next
  /// round. At most one send per neighbor per round.
  void send(VertexId to, const Message& m);
  void halt() { halt_requested_ = true; }

 private:
  friend class RoundEngine;
  StepContext(RoundEngine& engine, VertexId self, std::size_t n,
              std::uint32_t round, std::span<const VertexId> neighbors,
              std::span<const Envelope> inbox, std::uint64_t master_seed)
      : engine_(engine),
        self_(self),
        n_(n),
        round_(round),
        neighbors_(neighbors),
        inbox_(inbox),
        rng_(derive_randomness(master_seed, self, round)),
        master_seed_(master_seed) {}

  RoundEngine& engine_;
  VertexId self_;
  std::size_t n_;
  std::uint32_t round_;
  std::span<const VertexId> neighbors_;
  std::span<const Envelope> inbox_;
  RandomStream rng_;
  std::uint64_t master_seed_;
  bool halt_requested_ = false;
};

class VertexProgram {
 public:
  virtual ~VertexProgram() = default;
  virtual void step(StepContext& ctx) = 0;
};

struct EngineOptions {
  int bit_budget_override = 0;  // 0 keeps bit_budget(n)
  std::ostream* trace = nullptr;
};

struct ExecutionResult {
  std::uint32_t rounds = 0;
  std::uint64_t total_messages = 0;
  int peak_message_bits = 0;
  bool all_halted = false;

  std::string to_stats_record() const;
};

/// Synchronous round scheduler. Vertices step in id order each round;
/// messages sent in round r arrive together at the start of round r+1.
class RoundEngine {
 public:
  RoundEngine(const Graph& g, std::uint64_t master_seed,
              EngineOptions options = {});

  /// Invoked after each round with the (possibly halted) programs; used
  /// by harness instrumentation, never visible to the programs.
  using Observer =
      std::function<void(std::uint32_t round,
                         std::span<const std::unique_ptr<VertexProgram>>)>;
  void set_observer(Observer obs) { observer_ = std::move(obs); }

  /// Runs until every program halts or max_rounds elapse. programs[v]
  /// is vertex v's program; the span must have one entry per vertex.
  ExecutionResult run_rounds(
      std::span<const std::unique_ptr<VertexProgram>> programs,
      std::uint32_t max_rounds);

  const Graph& graph() const { return graph_; }
  std::uint64_t master_seed() const { return master_seed_; }
  std::uint32_t round() const { return round_; }
  int budget() const { return budget_; }

 private:
  friend class StepContext;
  void submit(VertexId from, VertexId to, const Message& m);

  const Graph& graph_;
  std::uint64_t master_seed_;
  EngineOptions options_;
  int budget_;
  std::uint32_t round_ = 0;

  std::vector<std::vector<Envelope>> inbox_;
  std::vector<std::vector<Envelope>> pending_;
  std::vector<std::uint64_t> sent_marker_;  // duplicate-send detection
  std::uint64_t send_stamp_ = 0;
  std::vector<bool> halted_;
  std::uint64_t total_messages_ = 0;
  int peak_bits_ = 0;
  Observer observer_;
};

/// Convenience wrapper: builds one program per vertex via the factory
/// and runs the engine.
ExecutionResult run_rounds(
    RoundEngine& engine,
    const std::function<std::unique_ptr<VertexProgram>(VertexId)>& factory,
    std::uint32_t max_rounds,
    std::vector<std::unique_ptr<VertexProgram>>* programs_out = nullptr);

}  // namespace hamcon

#endif  // HAMCON_ENGINE_HPP
