#include "hamcon/engine.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>

namespace hamcon {

void StepContext::send(VertexId to, const Message& m) {
  engine_.submit(self_, to, m);
}

std::string ExecutionResult::to_stats_record() const {
  std::ostringstream os;
  os << "{\"rounds\":" << rounds << ",\"total_messages\":" << total_messages
     << ",\"peak_message_bits\":" << peak_message_bits
     << ",\"halted\":" << (all_halted ? "true" : "false") << "}";
  return os.str();
}

RoundEngine::RoundEngine(const Graph& g, std::uint64_t master_seed,
                         EngineOptions options)
    : graph_(g),
      master_seed_(master_seed),
      options_(options),
      budget_(options.bit_budget_override > 0 ? options.bit_budget_override
                                              : bit_budget(g.vertex_count())),
      inbox_(g.vertex_count()),
      pending_(g.vertex_count()),
      sent_marker_(g.vertex_count(), 0),
      halted_(g.vertex_count(), false) {}

void RoundEngine::submit(VertexId from, VertexId to, const Message& m) {
  if (halted_[from]) {
    throw CongestViolation("send after halt", round_, from, to);
  }
  if (!graph_.has_edge(from, to)) {
    throw CongestViolation("send to non-neighbor " + std::to_string(to) +
                               " from " + std::to_string(from),
                           round_, from, to);
  }
  const int bits = message_bits(m, graph_.vertex_count());
  if (bits > budget_) {
    throw CongestViolation("message of " + std::to_string(bits) +
                               " bits exceeds budget of " +
                               std::to_string(budget_),
                           round_, from, to);
  }
  if (sent_marker_[to] == send_stamp_) {
    throw CongestViolation("duplicate send on edge direction " +
                               std::to_string(from) + "->" +
                               std::to_string(to),
                           round_, from, to);
  }
  sent_marker_[to] = send_stamp_;
  pending_[to].push_back({from, m});
  ++total_messages_;
  peak_bits_ = std::max(peak_bits_, bits);
  if (options_.trace) {
    auto& os = *options_.trace;
    os << round_ << ' ' << from << ' ' << to << ' '
       << static_cast<int>(m.kind) << ' ';
    os << std::hex << static_cast<int>(m.flags);
    for (int i = 0; i < m.id_count; ++i) os << ':' << m.id(i);
    os << std::dec << '\n';
  }
}

ExecutionResult RoundEngine::run_rounds(
    std::span<const std::unique_ptr<VertexProgram>> programs,
    std::uint32_t max_rounds) {
  const std::size_t n = graph_.vertex_count();
  ExecutionResult result;
  for (std::uint32_t r = 0; r < max_rounds; ++r) {
    bool any_active = false;
    for (VertexId v = 0; v < n; ++v) {
      if (halted_[v]) continue;
      any_active = true;
      ++send_stamp_;  // one stamp per vertex step; duplicate-send check
      // Vertices step in ascending id order, so each inbox is already
      // sorted by sender.
      auto& mail = inbox_[v];
      StepContext ctx(*this, v, n, round_, graph_.neighbors(v),
                      {mail.data(), mail.size()}, master_seed_);
      programs[v]->step(ctx);
      if (ctx.halt_requested_) halted_[v] = true;
    }
    if (!any_active) break;
    ++round_;
    ++result.rounds;
    for (VertexId v = 0; v < n; ++v) {
      inbox_[v].swap(pending_[v]);
      pending_[v].clear();
    }
    if (observer_) observer_(round_, programs);
    if (std::all_of(halted_.begin(), halted_.end(), [](bool h) { return h; })) {
      break;
    }
  }
  result.total_messages = total_messages_;
  result.peak_message_bits = peak_bits_;
  result.all_halted =
      std::all_of(halted_.begin(), halted_.end(), [](bool h) { return h; });
  return result;
}

ExecutionResult run_rounds(
    RoundEngine& engine,
    const std::function<std::unique_ptr<VertexProgram>(VertexId)>& factory,
    std::uint32_t max_rounds,
    std::vector<std::unique_ptr<VertexProgram>>* programs_out) {
  std::vector<std::unique_ptr<VertexProgram>> programs;
  const std::size_t n = engine.graph().vertex_count();
  programs.reserve(n);
  for (VertexId v = 0; v < n; ++v) programs.push_back(factory(v));
  auto result = engine.run_rounds({programs.data(), programs.size()},
                                  max_rounds);
  if (programs_out) *programs_out = std::move(programs);
  return result;
}

}  // namespace hamcon
