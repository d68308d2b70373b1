#include "hamcon/engine.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
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

// Sends own id to every neighbor once, then halts.
class BroadcastOnce : public VertexProgram {
 public:
  void step(StepContext& ctx) override {
    if (ctx.round() == 0) {
      for (VertexId u : ctx.neighbors()) {
        ctx.send(u, Message(1).push(ctx.self()));
      }
      return;
    }
    received = ctx.inbox().size();
    ctx.halt();
  }
  std::size_t received = 0;
};

// Two rounds of min-flooding, then everyone knows the minimum id on a
// diameter-2 graph; halts after reporting.
class MinLeader : public VertexProgram {
 public:
  void step(StepContext& ctx) override {
    switch (ctx.round()) {
      case 0:
        best = ctx.self();
        for (VertexId u : ctx.neighbors()) {
          ctx.send(u, Message(1).push(best));
        }
        break;
      case 1:
      case 2:
        for (const auto& env : ctx.inbox()) {
          best = std::min(best, env.msg.id(0));
        }
        if (ctx.round() == 2) {
          ctx.halt();
        } else {
          for (VertexId u : ctx.neighbors()) {
            ctx.send(u, Message(1).push(best));
          }
        }
        break;
    }
  }
  VertexId best = kNoVertex;
};

class Oversender : public VertexProgram {
 public:
  void step(StepContext& ctx) override {
    Message m(7);
    for (VertexId i = 0; i < 7; ++i) m.push(i);
    ctx.send(ctx.neighbors()[0], m);
    ctx.halt();
  }
};

class DoubleSender : public VertexProgram {
 public:
  void step(StepContext& ctx) override {
    ctx.send(ctx.neighbors()[0], Message(1));
    ctx.send(ctx.neighbors()[0], Message(2));
  }
};

class Idle : public VertexProgram {
 public:
  void step(StepContext& ctx) override { ctx.halt(); }
};

template <typename P>
std::vector<std::unique_ptr<VertexProgram>> make_programs(std::size_t n) {
  std::vector<std::unique_ptr<VertexProgram>> programs;
  for (std::size_t i = 0; i < n; ++i) {
    programs.push_back(std::make_unique<P>());
  }
  return programs;
}

}  // namespace

TEST_CASE("broadcast program on K4 halts after delivery round") {
  Graph g = k_complete(4);
  RoundEngine engine(g, 1);
  auto programs = make_programs<BroadcastOnce>(4);
  auto result = engine.run_rounds({programs.data(), programs.size()}, 10);
  CHECK(result.all_halted);
  CHECK(result.rounds == 2);
  CHECK(result.total_messages == 12);
  for (auto& p : programs) {
    CHECK(static_cast<BroadcastOnce*>(p.get())->received == 3);
  }
}

TEST_CASE("oversized payload aborts with the offending stats") {
  Graph g = k_complete(4);
  RoundEngine engine(g, 1);
  auto programs = make_programs<Oversender>(4);
  CHECK_THROWS_AS(engine.run_rounds({programs.data(), programs.size()}, 4),
                  CongestViolation);
}

TEST_CASE("duplicate send on an edge direction aborts") {
  Graph g = k_complete(3);
  RoundEngine engine(g, 1);
  auto programs = make_programs<DoubleSender>(3);
  try {
    engine.run_rounds({programs.data(), programs.size()}, 4);
    FAIL("expected violation");
  } catch (const CongestViolation& v) {
    CHECK(v.sender == 0);
    CHECK(v.receiver == 1);
    CHECK(v.round == 0);
  }
}

TEST_CASE("send to non-neighbor aborts") {
  Graph g = Graph::from_edge_list(3, {{{0, 1}, {1, 2}}});
  struct Bad : VertexProgram {
    void step(StepContext& ctx) override {
      if (ctx.self() == 0) ctx.send(2, Message(1));
      ctx.halt();
    }
  };
  RoundEngine engine(g, 1);
  auto programs = make_programs<Bad>(3);
  CHECK_THROWS_AS(engine.run_rounds({programs.data(), programs.size()}, 4),
                  CongestViolation);
}

TEST_CASE("leader election by min id halts within 4 rounds on Dirac") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Graph g = gen_random_dirac(24, 0.0, seed);
    RoundEngine engine(g, seed);
    auto programs = make_programs<MinLeader>(24);
    auto result = engine.run_rounds({programs.data(), programs.size()}, 10);
    CHECK(result.all_halted);
    CHECK(result.rounds <= 4);
    for (auto& p : programs) {
      CHECK(static_cast<MinLeader*>(p.get())->best == 0);
    }
  }
}

TEST_CASE("runs are deterministic") {
  Graph g = gen_random_dirac(16, 0.0, 3);
  std::ostringstream t1, t2;
  {
    RoundEngine engine(g, 42, {.trace = &t1});
    auto programs = make_programs<MinLeader>(16);
    engine.run_rounds({programs.data(), programs.size()}, 10);
  }
  {
    RoundEngine engine(g, 42, {.trace = &t2});
    auto programs = make_programs<MinLeader>(16);
    engine.run_rounds({programs.data(), programs.size()}, 10);
  }
  CHECK(t1.str() == t2.str());
  CHECK(!t1.str().empty());
}

TEST_CASE("bit budget override is honored") {
  Graph g = k_complete(4);
  RoundEngine engine(g, 1, {.bit_budget_override = 17});
  CHECK(engine.budget() == 17);
  // One id costs 2 bits at n=4 plus 16 framing bits: 18 > 17.
  struct OneId : VertexProgram {
    void step(StepContext& ctx) override {
      ctx.send(ctx.neighbors()[0], Message(1).push(0));
    }
  };
  auto programs = make_programs<OneId>(4);
  CHECK_THROWS_AS(engine.run_rounds({programs.data(), programs.size()}, 2),
                  CongestViolation);
}

TEST_CASE("all-idle programs finish immediately") {
  Graph g = k_complete(3);
  RoundEngine engine(g, 9);
  auto programs = make_programs<Idle>(3);
  auto result = engine.run_rounds({programs.data(), programs.size()}, 5);
  CHECK(result.all_halted);
  CHECK(result.total_messages == 0);
}

TEST_CASE("derive_randomness is deterministic and distinguishes keys") {
  auto a1 = derive_randomness(7, 3, 5);
  auto a2 = derive_randomness(7, 3, 5);
  auto b = derive_randomness(7, 4, 5);
  auto first = a1.next();
  CHECK(first == a2.next());
  CHECK(first != b.next());
}

TEST_CASE("derived fair bits are balanced") {
  std::size_t heads = 0;
  const std::size_t trials = 100000;
  for (std::size_t i = 0; i < trials; ++i) {
    auto s = derive_randomness(99, i % 512, i / 512);
    heads += s.coin();
  }
  double mean = static_cast<double>(heads) / trials;
  CHECK(std::abs(mean - 0.5) < 0.01);
}

TEST_CASE("uniform draws cover the range evenly") {
  RandomStream s(2024);
  std::array<std::size_t, 7> buckets{};
  const std::size_t trials = 70000;
  for (std::size_t i = 0; i < trials; ++i) ++buckets[s.uniform(7)];
  for (std::size_t b : buckets) {
    CHECK(std::abs(static_cast<double>(b) - trials / 7.0) < 400);
  }
}

TEST_CASE("stats record serialization") {
  ExecutionResult r;
  r.rounds = 3;
  r.total_messages = 12;
  r.peak_message_bits = 20;
  r.all_halted = true;
  CHECK(r.to_stats_record() ==
        "{\"rounds\":3,\"total_messages\":12,\"peak_message_bits\":20,"
        "\"halted\":true}");
}
