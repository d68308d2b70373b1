#include "hamcon/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "protocol_vertex.hpp"

namespace hamcon::detail {

namespace {
constexpr int kClsHeavy = 0;
constexpr int kClsAPlus = 1;
constexpr int kClsCHat = 2;

// Digest flag bits.
constexpr int kDgEndpoint = 0;
constexpr int kDgInHi = 1;
constexpr int kDgSingleton = 2;
constexpr int kDgClassLo = 3;  // two bits
constexpr int kDgHeavyPathNbr = 5;
}  // namespace

std::uint32_t default_iteration_cap(std::size_t n, double factor) {
  double lg = std::log2(static_cast<double>(std::max<std::size_t>(n, 2)));
  return static_cast<std::uint32_t>(std::ceil(factor * lg));
}

Script Script::build(std::size_t n, const ProtocolConfig& config) {
  Script s;
  s.rk_mode = config.rk_mode;
  s.want_cycle = config.want_cycle;
  s.iteration_cap = config.iteration_cap
                        ? config.iteration_cap
                        : default_iteration_cap(n, config.cap_factor);

  const std::uint32_t gt_depth = config.rk_mode ? 4 : 2;
  const std::uint32_t cv = config.rk_mode ? 5 : 3;
  const std::uint32_t bc = config.rk_mode ? 5 : 3;
  const std::uint32_t gt_pass = 2 * gt_depth + 3;
  const std::uint32_t match_len =
      3 * (4 * static_cast<std::uint32_t>(ceil_log2(n)) + 10);

  auto add = [&s](Ph kind, std::uint32_t len, std::uint8_t param = 0) {
    s.steps.push_back({kind, len, param});
    return s.steps.size() - 1;
  };

  if (config.rk_mode) {
    add(Ph::kRkVstar, 10);
    add(Ph::kRkBfs, 8);
    add(Ph::kRkInfo, 2);
    add(Ph::kRkDflood, 10);
    add(Ph::kRkDSolve, 3);
    add(Ph::kHalt, 1);
    // When D is empty the Dflood settle jumps here instead.
  } else {
    add(Ph::kGtFlood1, 1);
    add(Ph::kGtFlood2, 1);
    add(Ph::kGtParent, 1);
    add(Ph::kGtChildren, 1);
  }
  const std::size_t match_start = add(Ph::kMatch, match_len, 0);
  if (config.rk_mode) {
    // RK builds its global tree from the BFS layers; remember where the
    // main pipeline resumes after the constant-round fast path.
    s.endgame_start = 0;  // placeholder, set below
  }
  add(Ph::kMatchGap, 1);
  add(Ph::kMatch, match_len, 1);
  add(Ph::kPathForm, 6);
  // refresh block
  add(Ph::kDigest, 2);
  add(Ph::kTreeBuild, 5);
  add(Ph::kCvEndpoints, cv);
  add(Ph::kBcEndpoints, bc);
  add(Ph::kDigest, 2);

  s.iter_start = s.steps.size();
  if (config.rk_mode) {
    for (std::uint8_t stage = 0; stage < 2; ++stage) {
      add(Ph::kDrainPlug, 2, stage);
      add(Ph::kDrainCmd, 2, stage);
      add(Ph::kDrainCvUp, cv, stage);
      add(Ph::kDrainBcDown, bc, stage);
      add(Ph::kDigest, 2);
      add(Ph::kTreeBuild, 5);
      add(Ph::kCvEndpoints, cv);
      add(Ph::kBcEndpoints, bc);
      add(Ph::kDigest, 2);
    }
  }
  add(Ph::kPair, gt_pass);
  add(Ph::kBcPartner, bc);
  add(Ph::kCyBit, 1);
  add(Ph::kCvDetect, cv);
  add(Ph::kBcDetect, bc);
  add(Ph::kXCycled, 1);
  add(Ph::kCvPartner, cv);
  add(Ph::kBcExec, bc);
  add(Ph::kSizeCv, gt_pass);
  add(Ph::kWave, 0);  // length comes from the size convergecast
  add(Ph::kDigest, 2);
  add(Ph::kTreeBuild, 5);
  add(Ph::kCvEndpoints, cv);
  add(Ph::kBcEndpoints, bc);
  add(Ph::kDigest, 2);
  add(Ph::kReserve, 1);
  add(Ph::kNotify, 1);
  add(Ph::kCvReserve, cv);
  add(Ph::kBcChoice, bc);
  add(Ph::kExecAct, 1);
  add(Ph::kExecContact, 1);
  add(Ph::kExecAnchor, 1);
  add(Ph::kExecLink, 1);
  add(Ph::kCvExecSrc, cv);
  add(Ph::kBcExecSrc, bc);
  add(Ph::kDigest, 2);
  add(Ph::kTreeBuild, 5);
  add(Ph::kCvEndpoints, cv);
  add(Ph::kBcEndpoints, bc);
  add(Ph::kDigest, 2);
  add(Ph::kTermCheck, gt_pass);

  s.final_start = s.steps.size();
  add(Ph::kFinalCyBit, 1);
  add(Ph::kFinalCvDetect, cv);
  add(Ph::kFinalBcDetect, bc);
  add(Ph::kFinalClose, 1);
  add(Ph::kFinalWave, 0);
  s.halt_index = add(Ph::kHalt, 1);

  s.endgame_start = s.steps.size();
  if (config.rk_mode) {
    const std::uint32_t flood = 10;
    add(Ph::kEgFlood1, flood);
    add(Ph::kEgFlood2, flood);
    add(Ph::kEgFlags, 1);
    add(Ph::kEgCv, cv);
    add(Ph::kEgFlood3, flood);
    add(Ph::kEgFlood4, flood);
    add(Ph::kEgExec, 1);
    add(Ph::kEgWave, 0);
    add(Ph::kDigest, 2);
    add(Ph::kTreeBuild, 5);
    add(Ph::kCvEndpoints, cv);
    add(Ph::kBcEndpoints, bc);
    add(Ph::kDigest, 2);
    add(Ph::kTermCheck, gt_pass);
  }
  (void)match_start;
  return s;
}

PathVertex::PathVertex(const Script& script, const Graph& g, VertexId self)
    : script_(&script), graph_(&g), self_(self), n_(g.vertex_count()) {
  const std::size_t deg = g.degree(self);
  digests_.resize(deg);
  nbr_layer_.assign(deg, 255);
  nbr_heavy_.assign(deg, 0);
  mm_free_.assign(deg, 1);
  mm_active_.assign(deg, 1);
}

int PathVertex::nbr_index(VertexId u) const {
  auto nbrs = graph_->neighbors(self_);
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), u);
  if (it == nbrs.end() || *it != u) return -1;
  return static_cast<int>(it - nbrs.begin());
}

VClass PathVertex::vclass() const {
  if (!script_->rk_mode || heavy()) return VClass::kHeavy;
  if (rk_layer_ <= 1) return VClass::kAPlus;
  return VClass::kCHat;  // layer-3 non-heavy; layer-2 is provably heavy
}

bool PathVertex::in_hi_path() const {
  return head_class_ == kClsHeavy && tail_class_ == kClsHeavy;
}

VertexPathState PathVertex::state() const {
  VertexPathState st;
  st.path = path_;
  st.pred = pred_;
  st.succ = succ_;
  st.tree_parent = pt_parent_;
  st.partner = partner_;
  return st;
}

std::uint32_t PathVertex::phase_len() const {
  const PhaseStep& step = script_->steps[ip_];
  if (step.kind == Ph::kWave || step.kind == Ph::kEgWave ||
      step.kind == Ph::kFinalWave) {
    return wave_len_;
  }
  return step.len;
}

void PathVertex::fail(const std::string& why) {
  if (!violation_) {
    violation_ = true;
    failure_ = why;
  }
}

void PathVertex::advance_phase(StepContext& ctx) {
  ++phase_round_;
  while (phase_round_ >= phase_len()) {
    const Ph kind = script_->steps[ip_].kind;
    phase_round_ = 0;
    if (kind == Ph::kHalt) return;
    if (kind == Ph::kTermCheck) {
      // Everyone derived the same verdict from the broadcast.
      if (tc_verdict_ == 1) {
        ip_ = script_->want_cycle ? script_->final_start : script_->halt_index;
      } else if (tc_verdict_ == 2 && script_->rk_mode) {
        ip_ = script_->endgame_start;
      } else if (iteration_ + 1 >= script_->iteration_cap) {
        fail("iteration cap reached with more than one path");
        ip_ = script_->halt_index;
      } else {
        ++iteration_;
        ip_ = script_->iter_start;
      }
    } else if (kind == Ph::kRkDflood) {
      // Constant-round fast path only when distance-4 vertices exist.
      ip_ = rk_d_nonempty_ ? ip_ + 1 : ip_ + 3;
    } else if (kind == Ph::kRkDSolve) {
      ip_ += 1;  // the dedicated halt step right after
    } else if (kind == Ph::kFinalClose && wave_len_ == 0) {
      ip_ += 2;  // no rotation needed, skip the wave step
    } else {
      ++ip_;
    }
    (void)ctx;
  }
}

void PathVertex::step(StepContext& ctx) {
  if (violation_) {
    ctx.halt();
    return;
  }
  const PhaseStep& step = script_->steps[ip_];
  switch (step.kind) {
    case Ph::kGtFlood1:
    case Ph::kGtFlood2:
    case Ph::kGtParent:
    case Ph::kGtChildren:
      do_gt(ctx);
      break;
    case Ph::kRkVstar: do_rk_vstar(ctx); break;
    case Ph::kRkBfs: do_rk_bfs(ctx); break;
    case Ph::kRkInfo: do_rk_info(ctx); break;
    case Ph::kRkDflood: do_rk_dflood(ctx); break;
    case Ph::kRkDSolve: do_rk_dsolve(ctx); break;
    case Ph::kMatch: do_match(ctx); break;
    case Ph::kMatchGap: {
      // Exchange first-matching status so round two knows the removed
      // F' x F' edges.
      if (phase_round_ == 0) {
        Message m(kMmStatus);
        m.set_flag(1, f_partner_ != kNoVertex);
        for (VertexId u : ctx.neighbors()) ctx.send(u, m);
      }
      break;
    }
    case Ph::kPathForm: do_path_form(ctx); break;
    case Ph::kDigest: do_digest(ctx); break;
    case Ph::kTreeBuild: do_tree_build(ctx); break;
    case Ph::kCvEndpoints: do_cv_endpoints(ctx); break;
    case Ph::kBcEndpoints: do_bc_endpoints(ctx); break;
    case Ph::kDrainPlug: do_drain_plug(ctx, step.param); break;
    case Ph::kDrainCmd: do_drain_cmd(ctx, step.param); break;
    case Ph::kDrainCvUp: do_drain_cv_up(ctx); break;
    case Ph::kDrainBcDown: do_drain_bc_down(ctx); break;
    case Ph::kPair: do_pair(ctx); break;
    case Ph::kBcPartner: do_bc_partner(ctx); break;
    case Ph::kCyBit: do_cy_bit(ctx, false); break;
    case Ph::kCvDetect: do_cv_detect(ctx, false); break;
    case Ph::kBcDetect: do_bc_detect(ctx, false); break;
    case Ph::kXCycled: do_x_cycled(ctx); break;
    case Ph::kCvPartner: do_cv_partner(ctx); break;
    case Ph::kBcExec: do_bc_exec(ctx); break;
    case Ph::kSizeCv: do_size_cv(ctx); break;
    case Ph::kWave: do_wave(ctx); break;
    case Ph::kReserve: do_reserve(ctx); break;
    case Ph::kNotify: do_notify(ctx); break;
    case Ph::kCvReserve: do_cv_reserve(ctx); break;
    case Ph::kBcChoice: do_bc_choice(ctx); break;
    case Ph::kExecAct: do_exec_act(ctx); break;
    case Ph::kExecContact: do_exec_contact(ctx); break;
    case Ph::kExecAnchor: do_exec_anchor(ctx); break;
    case Ph::kExecLink: do_exec_link(ctx); break;
    case Ph::kCvExecSrc: do_cv_exec_src(ctx); break;
    case Ph::kBcExecSrc: do_bc_exec_src(ctx); break;
    case Ph::kTermCheck: do_term_check(ctx); break;
    case Ph::kFinalCyBit: do_cy_bit(ctx, true); break;
    case Ph::kFinalCvDetect: do_cv_detect(ctx, true); break;
    case Ph::kFinalBcDetect: do_bc_detect(ctx, true); break;
    case Ph::kFinalClose: do_final_close(ctx); break;
    case Ph::kFinalWave: do_final_wave(ctx); break;
    case Ph::kEgFlood1: do_eg_flood(ctx, 0); break;
    case Ph::kEgFlood2: do_eg_flood(ctx, 1); break;
    case Ph::kEgFlags: do_eg_flags(ctx); break;
    case Ph::kEgCv: do_eg_cv(ctx); break;
    case Ph::kEgFlood3: do_eg_flood(ctx, 2); break;
    case Ph::kEgFlood4: do_eg_flood(ctx, 3); break;
    case Ph::kEgExec: do_eg_exec(ctx); break;
    case Ph::kEgWave: do_wave(ctx); break;
    case Ph::kHalt:
      ctx.halt();
      return;
  }
  if (violation_) {
    ctx.halt();
    return;
  }
  advance_phase(ctx);
}

// ---------------------------------------------------------------------
// Global tree (diameter-2 case): two rounds of min flooding, then each
// vertex adopts the root or a root-adjacent neighbor as parent.
// ---------------------------------------------------------------------
void PathVertex::do_gt(StepContext& ctx) {
  switch (script_->steps[ip_].kind) {
    case Ph::kGtFlood1: {
      gt_min_seen_ = self_;
      Message m(kGtMin1);
      m.push(self_);
      for (VertexId u : ctx.neighbors()) ctx.send(u, m);
      break;
    }
    case Ph::kGtFlood2: {
      for (const auto& env : ctx.inbox()) {
        gt_min_seen_ = std::min(gt_min_seen_, env.msg.id(0));
      }
      Message m(kGtMin2);
      m.push(gt_min_seen_);
      for (VertexId u : ctx.neighbors()) ctx.send(u, m);
      break;
    }
    case Ph::kGtParent: {
      VertexId root = gt_min_seen_;
      VertexId best_mid = kNoVertex;
      for (const auto& env : ctx.inbox()) {
        root = std::min(root, env.msg.id(0));
      }
      for (const auto& env : ctx.inbox()) {
        if (env.msg.id(0) == root && env.sender != root) {
          best_mid = std::min(best_mid, env.sender);
        }
      }
      gt_root_ = root;
      if (self_ == root) {
        gt_parent_ = kNoVertex;
        gt_depth_ = 0;
      } else if (adjacent(root)) {
        gt_parent_ = root;
        gt_depth_ = 1;
      } else if (best_mid != kNoVertex) {
        gt_parent_ = best_mid;
        gt_depth_ = 2;
      } else {
        fail("no path to the global root within two hops");
        return;
      }
      if (gt_parent_ != kNoVertex) {
        ctx.send(gt_parent_, Message(kGtChild));
      }
      break;
    }
    case Ph::kGtChildren: {
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind == kGtChild) gt_children_.push_back(env.sender);
      }
      break;
    }
    default: break;
  }
}

// ---------------------------------------------------------------------
// Randomized propose-accept maximal matching; three-round sub-iterations
// until the fixed cap. param 0: first matching on all edges; param 1:
// second matching on edges with at least one first-round-free endpoint.
// ---------------------------------------------------------------------
void PathVertex::do_match(StepContext& ctx) {
  auto nbrs = ctx.neighbors();
  const bool second = script_->steps[ip_].param == 1;
  if (phase_round_ == 0) {
    mm_partner_ = kNoVertex;
    mm_proposed_ = kNoVertex;
    std::fill(mm_free_.begin(), mm_free_.end(), 1);
    if (second) {
      // F' x F' edges are inactive; neighbor F-state arrived in the gap.
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind != kMmStatus) continue;
        int idx = nbr_index(env.sender);
        if (idx >= 0) {
          mm_active_[idx] =
              !(f_partner_ != kNoVertex && env.msg.flag(1)) ? 1 : 0;
        }
      }
    } else {
      std::fill(mm_active_.begin(), mm_active_.end(), 1);
    }
  }

  switch (phase_round_ % 3) {
    case 0: {  // propose
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind == kMmStatus && env.msg.flag(0)) {
          int idx = nbr_index(env.sender);
          if (idx >= 0) mm_free_[idx] = 0;
        }
      }
      mm_proposed_ = kNoVertex;
      if (mm_partner_ != kNoVertex) break;
      std::vector<int> options;
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        if (mm_free_[i] && mm_active_[i]) options.push_back((int)i);
      }
      if (options.empty()) break;
      int pick = options[ctx.rng().uniform(options.size())];
      mm_proposed_ = nbrs[pick];
      ctx.send(mm_proposed_, Message(kMmPropose));
      break;
    }
    case 1: {  // accept
      std::vector<VertexId> proposals;
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind == kMmPropose) proposals.push_back(env.sender);
      }
      if (mm_partner_ != kNoVertex) break;
      if (mm_proposed_ != kNoVertex) {
        // Mutual proposal: both sides detect it without a message.
        for (VertexId p : proposals) {
          if (p == mm_proposed_) mm_partner_ = p;
        }
      } else if (!proposals.empty()) {
        VertexId pick = proposals[ctx.rng().uniform(proposals.size())];
        mm_partner_ = pick;
        ctx.send(pick, Message(kMmAccept));
      }
      break;
    }
    case 2: {  // confirm + status
      bool newly = false;
      if (mm_proposed_ != kNoVertex && mm_partner_ == kNoVertex) {
        for (const auto& env : ctx.inbox()) {
          if (env.msg.kind == kMmAccept && env.sender == mm_proposed_) {
            mm_partner_ = env.sender;
          }
        }
      }
      newly = mm_partner_ != kNoVertex && !mm_status_sent_;
      if (newly) {
        mm_status_sent_ = true;
        Message m(kMmStatus);
        m.set_flag(0, true);
        for (VertexId u : nbrs) ctx.send(u, m);
      }
      break;
    }
  }

  if (phase_round_ + 1 == phase_len()) {
    if (second) {
      s_partner_ = mm_partner_;
    } else {
      f_partner_ = mm_partner_;
    }
    mm_status_sent_ = false;
    // Maximality self-check; a leftover active pair means the round cap
    // was too small (pathological randomness).
    if (mm_partner_ == kNoVertex) {
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        if (mm_free_[i] && mm_active_[i]) {
          fail("matching round cap exceeded");
          return;
        }
      }
    }
  }
}

// ---------------------------------------------------------------------
// Initial cover: endpoints flood their id three hops along cover edges,
// then everyone derives orientation, leader, and endpoints locally.
// ---------------------------------------------------------------------
void PathVertex::do_path_form(StepContext& ctx) {
  std::array<VertexId, 2> partners = {f_partner_, s_partner_};
  auto side_of = [&](VertexId u) {
    if (u == partners[0] && u != kNoVertex) return 0;
    if (u == partners[1] && u != kNoVertex) return 1;
    return -1;
  };
  int deg = (partners[0] != kNoVertex) + (partners[1] != kNoVertex);

  switch (phase_round_) {
    case 0: {
      pf_end_[0] = pf_end_[1] = kNoVertex;
      pf_other_[0] = pf_other_[1] = kNoVertex;
      if (deg == 0) {
        if (!script_->rk_mode && n_ > 1) {
          fail("vertex left unmatched twice; initial cover violated");
          return;
        }
        // Singleton path (possible for non-heavy vertices on RK inputs).
        path_ = self_;
        pred_ = succ_ = kNoVertex;
        head_ = tail_ = self_;
        size_known_ = 1;
        break;
      }
      if (deg == 1) {
        VertexId p = partners[0] != kNoVertex ? partners[0] : partners[1];
        Message m(kPcEnd);
        m.push(self_);
        ctx.send(p, m);
      }
      break;
    }
    case 1:
    case 2: {
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind != kPcEnd) continue;
        int side = side_of(env.sender);
        if (side < 0) continue;
        pf_end_[side] = env.msg.id(0);
        pf_hops_[side] = static_cast<std::uint8_t>(env.msg.flags + 1);
        VertexId other = partners[1 - side];
        if (other != kNoVertex) {
          Message m(kPcEnd, static_cast<std::uint8_t>(env.msg.flags + 1));
          m.push(env.msg.id(0));
          ctx.send(other, m);
        }
      }
      break;
    }
    case 3: {
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind != kPcEnd) continue;
        int side = side_of(env.sender);
        if (side >= 0) {
          pf_end_[side] = env.msg.id(0);
          pf_hops_[side] = static_cast<std::uint8_t>(env.msg.flags + 1);
        }
      }
      for (int side = 0; side < 2; ++side) {
        if (partners[side] == kNoVertex) continue;
        Message m(kPcNbr);
        m.set_flag(0, partners[1 - side] != kNoVertex);
        m.push(partners[1 - side] != kNoVertex ? partners[1 - side] : 0);
        ctx.send(partners[side], m);
      }
      break;
    }
    case 4: {
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind != kPcNbr) continue;
        int side = side_of(env.sender);
        if (side >= 0 && env.msg.flag(0)) pf_other_[side] = env.msg.id(0);
      }
      break;
    }
    case 5: {
      if (deg == 0) break;
      // Known member set: self, partners, their far partners, endpoints.
      std::vector<VertexId> members{self_};
      for (int side = 0; side < 2; ++side) {
        if (partners[side] != kNoVertex) members.push_back(partners[side]);
        if (pf_other_[side] != kNoVertex) members.push_back(pf_other_[side]);
        if (pf_end_[side] != kNoVertex) members.push_back(pf_end_[side]);
      }
      std::sort(members.begin(), members.end());
      members.erase(std::unique(members.begin(), members.end()),
                    members.end());
      path_ = members.front();

      VertexId e0, e1;  // the two path endpoints
      if (deg == 1) {
        e0 = self_;
        VertexId p = partners[0] != kNoVertex ? partners[0] : partners[1];
        int side = side_of(p);
        e1 = pf_end_[side] != kNoVertex ? pf_end_[side] : p;
      } else {
        e0 = pf_end_[0] != kNoVertex ? pf_end_[0] : partners[0];
        e1 = pf_end_[1] != kNoVertex ? pf_end_[1] : partners[1];
      }
      head_ = std::min(e0, e1);
      tail_ = std::max(e0, e1);
      size_known_ = members.size();

      if (deg == 1) {
        VertexId p = partners[0] != kNoVertex ? partners[0] : partners[1];
        if (self_ == head_) {
          pred_ = kNoVertex;
          succ_ = p;
        } else {
          pred_ = p;
          succ_ = kNoVertex;
        }
      } else {
        // Interior vertex: pred lies on the side the head came from.
        int head_side = (pf_end_[0] == head_) ? 0 : 1;
        pred_ = partners[head_side];
        succ_ = partners[1 - head_side];
      }
      // Endpoint classes are refreshed by the first census.
      head_class_ = tail_class_ = kClsHeavy;
      break;
    }
    default: break;
  }
}

// ---------------------------------------------------------------------
// Neighborhood digest: path id, endpoint bit, class bits.
// ---------------------------------------------------------------------
void PathVertex::do_digest(StepContext& ctx) {
  if (phase_round_ == 0) {
    Message m(kDigest);
    m.push(path_);
    m.set_flag(kDgEndpoint, is_endpoint());
    bool in_hi = script_->rk_mode ? in_hi_path() : true;
    m.set_flag(kDgInHi, in_hi);
    m.set_flag(kDgSingleton, pred_ == kNoVertex && succ_ == kNoVertex);
    std::uint8_t cls = static_cast<std::uint8_t>(vclass());
    m.flags = static_cast<std::uint8_t>(m.flags | (cls << kDgClassLo));
    bool heavy_nbr = false;
    for (VertexId p : {pred_, succ_}) {
      if (p == kNoVertex) continue;
      int idx = nbr_index(p);
      if (idx >= 0 && (script_->rk_mode ? nbr_heavy_[idx] != 0 : true)) {
        heavy_nbr = true;
      }
    }
    m.set_flag(kDgHeavyPathNbr, heavy_nbr);
    for (VertexId u : ctx.neighbors()) ctx.send(u, m);
  } else {
    absorb_digests(ctx);
  }
}

void PathVertex::absorb_digests(StepContext& ctx) {
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind != kDigest) continue;
    int idx = nbr_index(env.sender);
    if (idx >= 0) {
      digests_[idx].path = env.msg.id(0);
      digests_[idx].flags = env.msg.flags;
    }
  }
}

// ---------------------------------------------------------------------
// Path trees: root = path leader, depth <= 2. A vertex far from its
// root queries all neighbors and adopts a common neighbor of itself and
// the root; that relay forwards tree traffic for the foreign path.
// ---------------------------------------------------------------------
void PathVertex::do_tree_build(StepContext& ctx) {
  switch (phase_round_) {
    case 0: {
      absorb_digests(ctx);
      pt_parent_ = kNoVertex;
      pt_attached_ = false;
      pt_children_.clear();
      relay_buf_.clear();
      bd_collector_ = kNoVertex;
      if (path_ == self_) {
        pt_attached_ = true;
      } else if (adjacent(path_)) {
        pt_parent_ = path_;
        pt_attached_ = true;
      } else {
        Message m(kPtQuery);
        m.push(path_);
        for (VertexId u : ctx.neighbors()) ctx.send(u, m);
      }
      break;
    }
    case 1: {
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind != kPtQuery) continue;
        VertexId r = env.msg.id(0);
        Message m(kPtResp);
        m.push(r);
        m.set_flag(0, self_ == r || adjacent(r));
        ctx.send(env.sender, m);
      }
      break;
    }
    case 2: {
      if (!pt_attached_) {
        VertexId best = kNoVertex;
        for (const auto& env : ctx.inbox()) {
          if (env.msg.kind == kPtResp && env.msg.id(0) == path_ &&
              env.msg.flag(0)) {
            best = std::min(best, env.sender);
          }
        }
        if (best != kNoVertex) {
          pt_parent_ = best;
          pt_attached_ = true;
        } else if (script_->rk_mode) {
          // Clique-boundary routing: report through a same-class clique
          // mate (possibly myself) that borders a heavy path member.
          VertexId cand = kNoVertex;
          bool self_ok = false;
          for (VertexId p : {pred_, succ_}) {
            int idx = p == kNoVertex ? -1 : nbr_index(p);
            if (idx >= 0 && nbr_heavy_[idx]) self_ok = true;
          }
          if (self_ok) cand = self_;
          auto nbrs = ctx.neighbors();
          for (std::size_t i = 0; i < nbrs.size(); ++i) {
            const Digest& d = digests_[i];
            if (d.path == path_ && d.vclass() == vclass() &&
                d.heavy_path_nbr()) {
              cand = std::min(cand, nbrs[i]);
            }
          }
          if (cand == kNoVertex) {
            fail("path member unreachable from its leader");
            return;
          }
          bd_collector_ = cand;
        } else {
          fail("no common neighbor with the path leader");
          return;
        }
      }
      if (pt_attached_ && pt_parent_ != kNoVertex) {
        Message m(kPtChild);
        m.push(path_);
        ctx.send(pt_parent_, m);
      }
      break;
    }
    case 3: {
      std::vector<VertexId> foreign;
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind != kPtChild) continue;
        VertexId r = env.msg.id(0);
        pt_children_.emplace_back(env.sender, r);
        if (r != path_ && r != self_) foreign.push_back(r);
      }
      std::sort(foreign.begin(), foreign.end());
      foreign.erase(std::unique(foreign.begin(), foreign.end()),
                    foreign.end());
      for (VertexId r : foreign) ctx.send(r, Message(kPtRelay));
      break;
    }
    case 4: {
      for (const auto& env : ctx.inbox()) {
        if (env.msg.kind == kPtRelay) {
          pt_children_.emplace_back(env.sender, self_);
        }
      }
      break;
    }
    default: break;
  }
}

int PathVertex::pt_depth() const {
  if (path_ == self_) return 0;
  if (pt_parent_ == path_) return 1;
  return 2;
}

// Convergecast to the path leader. Subround layout (rk adds two leading
// boundary-routing hops): boundary -> collector -> heavy member, then
// depth-2 members, then depth-1 members and relays, then the root.
void PathVertex::run_cv(StepContext& ctx, std::uint8_t kind,
                        Contribute contribute, Combine combine,
                        OnRoot on_root) {
  const std::uint32_t base = script_->rk_mode ? 2 : 0;
  const std::uint32_t sub = phase_round_;

  if (sub == 0) {
    cv_acc_ = Message(kind);
    cv_acc_has_ = false;
    relay_buf_.clear();
  }

  // Fold arrivals: same-path senders feed my aggregate, tree children of
  // foreign roots feed the relay buffer.
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind != kind) continue;
    VertexId root = kNoVertex;
    for (const auto& [child, r] : pt_children_) {
      if (child == env.sender) root = r;
    }
    if (root != kNoVertex && root != path_) {
      bool found = false;
      for (auto& [r, agg] : relay_buf_) {
        if (r == root) {
          combine(*this, agg, env.msg);
          found = true;
        }
      }
      if (!found) relay_buf_.emplace_back(root, env.msg);
    } else {
      if (cv_acc_has_) {
        combine(*this, cv_acc_, env.msg);
      } else {
        cv_acc_ = env.msg;
        cv_acc_has_ = true;
      }
    }
  }

  if (script_->rk_mode && !pt_attached_) {
    if (sub == 0 && bd_collector_ != kNoVertex && bd_collector_ != self_) {
      Message m(kind);
      if (contribute(*this, ctx, m)) ctx.send(bd_collector_, m);
    }
    if (sub == 1 && bd_collector_ == self_) {
      Message m(kind);
      if (contribute(*this, ctx, m)) {
        if (cv_acc_has_) combine(*this, cv_acc_, m);
        else { cv_acc_ = m; cv_acc_has_ = true; }
      }
      if (cv_acc_has_) {
        VertexId heavy_nbr = kNoVertex;
        for (VertexId p : {pred_, succ_}) {
          int idx = p == kNoVertex ? -1 : nbr_index(p);
          if (idx >= 0 && nbr_heavy_[idx]) {
            heavy_nbr = std::min(heavy_nbr, p);
          }
        }
        if (heavy_nbr != kNoVertex) ctx.send(heavy_nbr, cv_acc_);
      }
    }
    return;
  }

  auto my_payload = [&](Message& out) {
    Message mine(kind);
    bool has_mine = contribute(*this, ctx, mine);
    if (has_mine && cv_acc_has_) {
      combine(*this, mine, cv_acc_);
      out = mine;
      return true;
    }
    if (has_mine) {
      out = mine;
      return true;
    }
    if (cv_acc_has_) {
      out = cv_acc_;
      return true;
    }
    return false;
  };

  const int depth = pt_depth();
  if (depth == 2 && sub == base + 0) {
    Message m(kind);
    if (my_payload(m)) ctx.send(pt_parent_, m);
  }
  if (sub == base + 1) {
    if (depth == 1) {
      Message m(kind);
      if (my_payload(m)) ctx.send(pt_parent_, m);
    }
    for (auto& [root, agg] : relay_buf_) ctx.send(root, agg);
  }
  if (depth == 0 && sub == base + 2) {
    Message m(kind);
    bool has = my_payload(m);
    on_root(*this, ctx, m, has);
  }
}

// Broadcast from the path leader down the tree, then (rk) across the
// boundary into unattached clique segments.
void PathVertex::run_bc(StepContext& ctx, std::uint8_t kind,
                        Contribute payload, OnSettle settle) {
  const std::uint32_t sub = phase_round_;
  const std::uint32_t last = phase_len() - 1;

  if (sub == 0) {
    bc_msg_ = Message(kind);
    bc_has_ = false;
    if (path_ == self_) {
      Message m(kind);
      if (payload(*this, ctx, m)) {
        bc_msg_ = m;
        bc_has_ = true;
      }
      for (const auto& [child, root] : pt_children_) {
        if (root == path_ && bc_has_) ctx.send(child, bc_msg_);
      }
    }
  } else {
    for (const auto& env : ctx.inbox()) {
      if (env.msg.kind != kind) continue;
      // Own payload arriving from my parent.
      if (pt_attached_ && env.sender == pt_parent_ && !bc_has_) {
        bc_msg_ = env.msg;
        bc_has_ = true;
        for (const auto& [child, root] : pt_children_) {
          if (root == path_) ctx.send(child, bc_msg_);
        }
        continue;
      }
      // Foreign payload: relay one hop down.
      bool relayed = false;
      for (const auto& [child, root] : pt_children_) {
        if (root == env.sender) {
          ctx.send(child, env.msg);
          relayed = true;
        }
      }
      if (!relayed && script_->rk_mode && !bc_has_) {
        // Boundary delivery from a path neighbor or clique mate.
        int idx = nbr_index(env.sender);
        if (idx >= 0 && digests_[idx].path == path_) {
          bc_msg_ = env.msg;
          bc_has_ = true;
        }
      }
    }
    if (script_->rk_mode && bc_has_) {
      if (sub == 2) {
        // Heavy members hand the payload across the boundary.
        for (VertexId p : {pred_, succ_}) {
          int idx = p == kNoVertex ? -1 : nbr_index(p);
          if (idx >= 0 && !nbr_heavy_[idx]) ctx.send(p, bc_msg_);
        }
      }
      if (sub == 3 && !pt_attached_) {
        auto nbrs = ctx.neighbors();
        for (std::size_t i = 0; i < nbrs.size(); ++i) {
          const Digest& d = digests_[i];
          if (d.path == path_ && d.vclass() == vclass()) {
            ctx.send(nbrs[i], bc_msg_);
          }
        }
      }
    }
  }
  if (sub == last && bc_has_) settle(*this, ctx, bc_msg_);
}

// ---------------------------------------------------------------------
// Endpoint census: endpoints report (id, in-path degree, class); the
// leader learns head, tail, size, and endpoint classes, then broadcasts.
// ---------------------------------------------------------------------
namespace {

// CvEndpoints message: ids [e1, d1, e2, d2, count]
// flags: 0 has1, 1 has2, 2 head1, 3 head2, 4-5 cls1, 6-7 cls2
void cve_insert(Message& m, VertexId e, VertexId d, bool is_head,
                std::uint8_t cls) {
  if (!m.flag(0)) {
    m.ids[0] = e;
    m.ids[1] = d;
    m.set_flag(0);
    m.set_flag(2, is_head);
    m.flags = static_cast<std::uint8_t>(m.flags | (cls << 4));
  } else {
    m.ids[2] = e;
    m.ids[3] = d;
    m.set_flag(1);
    m.set_flag(3, is_head);
    m.flags = static_cast<std::uint8_t>(m.flags | (cls << 6));
  }
}

bool cve_contribute(PathVertex& v, StepContext& ctx, Message& m) {
  return v.cve_make(ctx, m);
}

void cve_combine(PathVertex&, Message& a, const Message& b) {
  a.ids[4] += b.ids[4];
  if (b.flag(0)) {
    cve_insert(a, b.ids[0], b.ids[1], b.flag(2),
               static_cast<std::uint8_t>((b.flags >> 4) & 3));
  }
  if (b.flag(1)) {
    cve_insert(a, b.ids[2], b.ids[3], b.flag(3),
               static_cast<std::uint8_t>((b.flags >> 6) & 3));
  }
}

void cve_on_root(PathVertex& v, StepContext& ctx, const Message& m,
                 bool has) {
  v.cve_finish(ctx, m, has);
}

bool cve_payload(PathVertex& v, StepContext&, Message& m) {
  return v.cve_bc_payload(m);
}

void cve_settle(PathVertex& v, StepContext&, const Message& m) {
  v.cve_apply(m);
}

}  // namespace

bool PathVertex::cve_make(StepContext&, Message& m) {
  m.id_count = 5;
  m.ids[4] = 1;  // subtree member count
  if (!is_endpoint()) return true;
  VertexId own_deg = 0;
  auto nbrs = graph_->neighbors(self_);
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    if (digests_[i].path == path_) ++own_deg;
  }
  const bool singleton = pred_ == kNoVertex && succ_ == kNoVertex;
  const std::uint8_t cls = static_cast<std::uint8_t>(vclass());
  cve_insert(m, self_, own_deg, pred_ == kNoVertex, cls);
  if (singleton) cve_insert(m, self_, own_deg, false, cls);
  return true;
}

void PathVertex::cve_finish(StepContext&, const Message& m, bool has) {
  if (!has || !m.flag(0) || !m.flag(1)) {
    fail("endpoint census incomplete");
    return;
  }
  size_known_ = m.ids[4];
  VertexId e1 = m.ids[0], e2 = m.ids[2];
  VertexId d1 = m.ids[1], d2 = m.ids[3];
  std::uint8_t c1 = (m.flags >> 4) & 3, c2 = (m.flags >> 6) & 3;
  if (m.flag(2)) {
    head_ = e1; tail_ = e2;
    head_class_ = c1; tail_class_ = c2;
  } else {
    head_ = e2; tail_ = e1;
    head_class_ = c2; tail_class_ = c1;
    std::swap(d1, d2);
  }
  cve_sociable_ = d1 + d2 + 1 <= size_known_;
}

bool PathVertex::cve_bc_payload(Message& m) {
  m.push(head_);
  m.push(tail_);
  m.push(static_cast<VertexId>(size_known_));
  m.flags = static_cast<std::uint8_t>(head_class_ | (tail_class_ << 2));
  return true;
}

void PathVertex::cve_apply(const Message& m) {
  head_ = m.id(0);
  tail_ = m.id(1);
  size_known_ = m.id(2);
  head_class_ = m.flags & 3;
  tail_class_ = (m.flags >> 2) & 3;
}

void PathVertex::do_cv_endpoints(StepContext& ctx) {
  if (phase_round_ == 0) absorb_digests(ctx);
  run_cv(ctx, kCveUp, &cve_contribute, &cve_combine, &cve_on_root);
}

void PathVertex::do_bc_endpoints(StepContext& ctx) {
  run_bc(ctx, kCveDown, &cve_payload, &cve_settle);
}

// ---------------------------------------------------------------------
// Pairing on the global tree: leaders bubble their ids upward; every
// tree node pairs the ids it sees in ascending order and forwards at
// most one leftover; partner notices route back down the same branches.
// ---------------------------------------------------------------------
void PathVertex::reset_iteration_scratch() {
  partner_ = kNoVertex;
  pair_pool_.clear();
  pair_route_.clear();
  cy_bit_in_ = false;
  det_cycled_ = false;
  det_wa_ = det_wb_ = det_la_ = det_lb_ = kNoVertex;
  det_has_link_ = false;
  partner_cycled_ = false;
  got_x_ = false;
  exec_merge_ = false;
  exec_direct_ = false;
  exec_cut_ = exec_next_ = kNoVertex;
  wave_pending_ = false;
  candidates_.clear();
  got_useful_ = false;
  rsv_in_v_ = rsv_in_q_ = rsv_in_w_ = rsv_in_uj_ = kNoVertex;
  rsv_self_to_ = kNoVertex;
  sel_has_choice_ = false;
  sel_holder_ = false;
  coin_heads_ = false;
  src_initiator_ = false;
  src_self_done_ = false;
  drain_partner_[0] = drain_partner_[1] = kNoVertex;
  drain_merged_ = false;
  drain_plugs_.clear();
  drain_single_.clear();
}

void PathVertex::do_pair(StepContext& ctx) {
  const int depth_limit = script_->rk_mode ? 4 : 2;
  if (phase_round_ == 0) {
    reset_iteration_scratch();
    ++iterations_entered_;
  }

  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind == kPairUp) {
      pair_pool_.push_back(env.msg.id(0));
      pair_route_.emplace_back(env.msg.id(0), env.sender);
    } else if (env.msg.kind == kPairSet) {
      VertexId target = env.msg.id(0), mate = env.msg.id(1);
      if (target == self_) {
        partner_ = mate;
      } else {
        for (const auto& [id, child] : pair_route_) {
          if (id == target) {
            Message m(kPairSet);
            m.push(target);
            m.push(mate);
            ctx.send(child, m);
            break;
          }
        }
      }
    }
  }

  const std::uint32_t slot =
      static_cast<std::uint32_t>(depth_limit - gt_depth_);
  if (phase_round_ == slot) {
    bool participates = is_leader() && (!script_->rk_mode || in_hi_path());
    if (participates) pair_pool_.push_back(self_);
    std::sort(pair_pool_.begin(), pair_pool_.end());
    std::size_t pairs = pair_pool_.size() / 2;
    for (std::size_t i = 0; i < pairs; ++i) {
      VertexId a = pair_pool_[2 * i], b = pair_pool_[2 * i + 1];
      for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        if (x == self_) {
          partner_ = y;
          continue;
        }
        for (const auto& [id, child] : pair_route_) {
          if (id == x) {
            Message m(kPairSet);
            m.push(x);
            m.push(y);
            ctx.send(child, m);
            break;
          }
        }
      }
    }
    if (pair_pool_.size() % 2 == 1 && gt_parent_ != kNoVertex) {
      Message m(kPairUp);
      m.push(pair_pool_.back());
      ctx.send(gt_parent_, m);
    }
  }
}

namespace {
bool prt_payload(PathVertex& v, StepContext&, Message& m) {
  return v.partner_bc_payload(m);
}
void prt_settle(PathVertex& v, StepContext&, const Message& m) {
  v.partner_apply(m);
}
}  // namespace

bool PathVertex::partner_bc_payload(Message& m) {
  m.set_flag(0, partner_ != kNoVertex);
  m.push(partner_ != kNoVertex ? partner_ : 0);
  return true;
}

void PathVertex::partner_apply(const Message& m) {
  partner_ = m.flag(0) ? m.id(0) : kNoVertex;
}

void PathVertex::do_bc_partner(StepContext& ctx) {
  run_bc(ctx, kPartnerDown, &prt_payload, &prt_settle);
}

// ---------------------------------------------------------------------
// Cycled detection. Along the path orientation, each vertex tells its
// successor whether it neighbors the tail; the successor completes the
// rotation-witness test with its own adjacency to the head. The direct
// closing edge shows up as the witness at the tail's incoming edge.
// ---------------------------------------------------------------------
void PathVertex::do_cy_bit(StepContext& ctx, bool final_pass) {
  final_pass_ = final_pass;
  if (succ_ != kNoVertex) {
    Message m(kCyBit);
    m.set_flag(0, graph_->has_edge(self_, tail_));
    ctx.send(succ_, m);
  }
}

namespace {

// DetUp message: ids [wa, wb, la, lb]; flags 0 has_witness, 1 has_link.
void det_combine(PathVertex&, Message& a, const Message& b) {
  if (b.flag(0) && (!a.flag(0) || std::pair(b.ids[0], b.ids[1]) <
                                      std::pair(a.ids[0], a.ids[1]))) {
    a.ids[0] = b.ids[0];
    a.ids[1] = b.ids[1];
    a.set_flag(0);
  }
  auto key = [](VertexId x, VertexId y) {
    return std::pair(std::min(x, y), std::max(x, y));
  };
  if (b.flag(1) &&
      (!a.flag(1) || key(b.ids[2], b.ids[3]) < key(a.ids[2], a.ids[3]))) {
    a.ids[2] = b.ids[2];
    a.ids[3] = b.ids[3];
    a.set_flag(1);
  }
}

bool det_contribute(PathVertex& v, StepContext& ctx, Message& m) {
  return v.det_make(ctx, m);
}
void det_on_root(PathVertex& v, StepContext& ctx, const Message& m,
                 bool has) {
  v.det_finish(ctx, m, has);
}
bool det_payload(PathVertex& v, StepContext&, Message& m) {
  return v.det_bc_payload(m);
}
void det_settle(PathVertex& v, StepContext&, const Message& m) {
  v.det_apply(m);
}

}  // namespace

bool PathVertex::det_make(StepContext&, Message& m) {
  m.id_count = 4;
  bool any = false;
  if (cy_bit_in_ && graph_->has_edge(head_, self_)) {
    m.ids[0] = pred_;
    m.ids[1] = self_;
    m.set_flag(0);
    any = true;
  }
  if (!final_pass_ && partner_ != kNoVertex) {
    auto nbrs = graph_->neighbors(self_);
    VertexId best = kNoVertex;
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
      if (digests_[i].path == partner_) {
        best = std::min(best, nbrs[i]);
      }
    }
    if (best != kNoVertex) {
      m.ids[2] = self_;
      m.ids[3] = best;
      m.set_flag(1);
      any = true;
    }
  }
  return any;
}

void PathVertex::do_cv_detect(StepContext& ctx, bool final_pass) {
  final_pass_ = final_pass;
  if (phase_round_ == 0) {
    cy_bit_in_ = false;
    for (const auto& env : ctx.inbox()) {
      if (env.msg.kind == kCyBit && env.sender == pred_) {
        cy_bit_in_ = env.msg.flag(0);
      }
    }
  }
  run_cv(ctx, kDetUp, &det_contribute, &det_combine, &det_on_root);
}

void PathVertex::det_finish(StepContext&, const Message& m, bool has) {
  det_cycled_ = has && m.flag(0);
  if (det_cycled_) {
    det_wa_ = m.ids[0];
    det_wb_ = m.ids[1];
  }
  det_has_link_ = has && m.flag(1);
  if (det_has_link_) {
    det_la_ = m.ids[2];
    det_lb_ = m.ids[3];
  }
}

bool PathVertex::det_bc_payload(Message& m) {
  m.id_count = 4;
  m.ids[0] = det_wa_;
  m.ids[1] = det_wb_;
  m.ids[2] = det_la_;
  m.ids[3] = det_lb_;
  m.set_flag(0, det_cycled_);
  m.set_flag(1, det_has_link_);
  return true;
}

void PathVertex::det_apply(const Message& m) {
  det_cycled_ = m.flag(0);
  det_wa_ = m.ids[0];
  det_wb_ = m.ids[1];
  det_has_link_ = m.flag(1);
  det_la_ = m.ids[2];
  det_lb_ = m.ids[3];
}

void PathVertex::do_bc_detect(StepContext& ctx, bool final_pass) {
  final_pass_ = final_pass;
  run_bc(ctx, kDetDown, &det_payload, &det_settle);
}

void PathVertex::do_x_cycled(StepContext& ctx) {
  if (det_has_link_ && self_ == det_la_ && partner_ != kNoVertex) {
    Message m(kXCycled);
    m.set_flag(0, det_cycled_);
    ctx.send(det_lb_, m);
  }
}

namespace {
bool pcy_contribute(PathVertex& v, StepContext& ctx, Message& m) {
  return v.pcy_make(ctx, m);
}
void pcy_combine(PathVertex&, Message& a, const Message& b) {
  if (b.flag(1)) {
    a.set_flag(1);
    a.set_flag(0, b.flag(0));
  }
}
void pcy_on_root(PathVertex& v, StepContext& ctx, const Message& m,
                 bool has) {
  v.pcy_finish(ctx, m, has);
}
}  // namespace

bool PathVertex::pcy_make(StepContext&, Message& m) {
  if (!got_x_) return false;
  m.set_flag(0, partner_cycled_);
  m.set_flag(1, true);
  return true;
}

void PathVertex::pcy_finish(StepContext&, const Message& m, bool has) {
  exec_merge_ = partner_ != kNoVertex && det_cycled_ && det_has_link_ &&
                has && m.flag(1) && m.flag(0);
}

void PathVertex::do_cv_partner(StepContext& ctx) {
  if (phase_round_ == 0) {
    for (const auto& env : ctx.inbox()) {
      if (env.msg.kind == kXCycled && env.sender == det_lb_) {
        got_x_ = true;
        partner_cycled_ = env.msg.flag(0);
      }
    }
  }
  run_cv(ctx, kPcyUp, &pcy_contribute, &pcy_combine, &pcy_on_root);
}

// ---------------------------------------------------------------------
// Cycle-merge execution. The implicit cycle of a path with rotation
// witness (wa, wb): path edges minus (wa, wb) plus (wa, tail) and
// (head, wb). Directly closed paths keep their orientation and only
// re-link around the link vertex; rotated sides re-orient by a wave.
// ---------------------------------------------------------------------
std::array<VertexId, 2> PathVertex::cycle_neighbors(VertexId wa,
                                                    VertexId wb) const {
  VertexId a = pred_, b = succ_;
  auto drop = [&](VertexId x) {
    if (a == x) a = kNoVertex;
    if (b == x) b = kNoVertex;
  };
  auto add = [&](VertexId x) {
    if (a == x || b == x) return;
    if (a == kNoVertex) a = x;
    else if (b == kNoVertex) b = x;
  };
  if (self_ == wa) {
    drop(wb);
    add(tail_);
  }
  if (self_ == wb) {
    drop(wa);
    add(head_);
  }
  if (self_ == head_) add(wb);
  if (self_ == tail_) add(wa);
  return {a, b};
}

void PathVertex::apply_direct_exit(VertexId x, VertexId y) {
  // Orientation kept: ... -> tail ~ head -> ... -> x -> y.
  const VertexId pred0 = pred_, succ0 = succ_;
  (void)pred0;
  if (self_ == x) succ_ = y;
  if (x != tail_) {
    if (pred0 == x) pred_ = kNoVertex;  // new global head
    if (self_ == tail_) succ_ = head_;  // closing edge joins the chain
    if (self_ == head_) pred_ = tail_;
  }
  (void)succ0;
}

void PathVertex::apply_direct_entry(VertexId y, VertexId x) {
  // Orientation kept: x -> y -> ... -> tail ~ head -> ... -> pred(y).
  const VertexId pred0 = pred_, succ0 = succ_;
  if (self_ == y) pred_ = x;
  if (y != head_) {
    if (succ0 == y) succ_ = kNoVertex;  // new global tail
    if (self_ == tail_) succ_ = head_;
    if (self_ == head_ && self_ != y) pred_ = tail_;
  }
  (void)pred0;
}

namespace {
bool exe_payload(PathVertex& v, StepContext&, Message& m) {
  return v.exe_bc_payload(m);
}
void exe_settle(PathVertex& v, StepContext& ctx, const Message& m) {
  v.exe_apply(ctx, m);
}
}  // namespace

bool PathVertex::exe_bc_payload(Message& m) {
  if (!exec_merge_) return false;
  m.push(det_wa_);
  m.push(det_wb_);
  m.push(det_la_);
  m.push(det_lb_);
  m.push(std::min(path_, partner_));
  m.set_flag(0, true);
  return true;
}

void PathVertex::exe_apply(StepContext&, const Message& m) {
  if (!m.flag(0)) return;
  exec_merge_ = true;
  exec_wa_ = m.id(0);
  exec_wb_ = m.id(1);
  exec_x_ = m.id(2);
  exec_y_ = m.id(3);
  exec_newid_ = m.id(4);
  exec_head_side_ = exec_newid_ == path_;
  exec_direct_ = graph_->has_edge(head_, tail_);
  path_ = exec_newid_;

  if (exec_direct_) {
    if (exec_head_side_) {
      apply_direct_exit(exec_x_, exec_y_);
    } else {
      apply_direct_entry(exec_x_, exec_y_);
    }
    return;
  }

  auto nbrs = cycle_neighbors(exec_wa_, exec_wb_);
  if (exec_head_side_) {
    // Path must end at the link vertex; the wave flows toward it.
    wave_pending_ = true;
    if (self_ == exec_x_) {
      exec_cut_ = std::min(nbrs[0], nbrs[1]);
      succ_ = exec_y_;
    }
  } else {
    wave_pending_ = true;
    if (self_ == exec_y_) {
      exec_cut_ = std::min(nbrs[0], nbrs[1]);
      exec_next_ = nbrs[0] == exec_cut_ ? nbrs[1] : nbrs[0];
      pred_ = exec_x_;
      succ_ = exec_next_;
      wave_pending_ = false;
    }
  }
}

void PathVertex::do_bc_exec(StepContext& ctx) {
  run_bc(ctx, kExeDown, &exe_payload, &exe_settle);
}

// ---------------------------------------------------------------------
// Wave-length agreement over the global tree (max-convergecast), then
// the orientation wave itself.
// ---------------------------------------------------------------------
void PathVertex::do_size_cv(StepContext& ctx) {
  const int depth_limit = script_->rk_mode ? 4 : 2;
  const std::uint32_t slot =
      static_cast<std::uint32_t>(depth_limit - gt_depth_);
  if (phase_round_ == 0) {
    wave_len_ = 0;
    tc_count_ = exec_merge_ && !exec_direct_ ? size_known_ + 4 : 0;
  }
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind == kSizeUp) {
      tc_count_ = std::max<std::uint64_t>(tc_count_, env.msg.id(0));
    } else if (env.msg.kind == kSizeDown) {
      wave_len_ = env.msg.id(0);
      for (VertexId c : gt_children_) ctx.send(c, env.msg);
    }
  }
  if (phase_round_ == slot && gt_parent_ != kNoVertex && tc_count_ > 0) {
    Message m(kSizeUp);
    m.push(static_cast<VertexId>(tc_count_));
    ctx.send(gt_parent_, m);
  }
  if (phase_round_ == static_cast<std::uint32_t>(depth_limit) &&
      gt_depth_ == 0 && tc_count_ > 0) {
    // A zero maximum needs no broadcast: silence means no wave.
    wave_len_ = static_cast<std::uint32_t>(tc_count_);
    Message m(kSizeDown);
    m.push(static_cast<VertexId>(wave_len_));
    for (VertexId c : gt_children_) ctx.send(c, m);
  }
}

void PathVertex::do_wave(StepContext& ctx) {
  if (phase_round_ == 0) {
    if (exec_merge_ && !exec_direct_ && exec_cut_ != kNoVertex) {
      Message m(kCut);
      m.set_flag(0, exec_head_side_);
      ctx.send(exec_cut_, m);
    }
    if (exec_merge_ && !exec_direct_ && self_ == exec_y_ &&
        exec_next_ != kNoVertex) {
      ctx.send(exec_next_, Message(kWave));
    }
    return;
  }
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind == kCut) {
      auto nbrs = cycle_neighbors(exec_wa_, exec_wb_);
      VertexId other = nbrs[0] == env.sender ? nbrs[1] : nbrs[0];
      if (env.msg.flag(0)) {
        // Head-side cut partner: new global head, wave starts here.
        pred_ = kNoVertex;
        succ_ = other;
        wave_pending_ = false;
        ctx.send(succ_, Message(kWave));
      } else {
        // Entry-side cut partner: new global tail, wave ends here.
        succ_ = kNoVertex;
      }
    } else if (env.msg.kind == kWave) {
      auto nbrs = cycle_neighbors(exec_wa_, exec_wb_);
      VertexId other = nbrs[0] == env.sender ? nbrs[1] : nbrs[0];
      pred_ = env.sender;
      wave_pending_ = false;
      if (self_ == exec_x_) {
        // Exit link vertex: succ already points across the pair.
      } else if (succ_ == kNoVertex && !exec_head_side_) {
        // Entry-side tail: nothing to forward.
      } else {
        succ_ = other;
        if (succ_ != kNoVertex) ctx.send(succ_, Message(kWave));
      }
    }
  }
}

// ---------------------------------------------------------------------
// Reservations. Every vertex with an outgoing path edge reserves it for
// a uniformly random adjacent path endpoint; every endpoint reserves
// itself the same way. The far edge endpoint checks usefulness and only
// then notifies the reserved-for path.
// ---------------------------------------------------------------------
void PathVertex::do_reserve(StepContext& ctx) {
  absorb_digests(ctx);
  candidates_.clear();
  got_useful_ = false;
  rsv_in_v_ = rsv_in_q_ = rsv_in_w_ = rsv_in_uj_ = kNoVertex;
  rsv_self_to_ = kNoVertex;

  auto nbrs = ctx.neighbors();
  std::vector<int> eligible;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    if (digests_[i].endpoint() && digests_[i].in_hi()) {
      eligible.push_back(static_cast<int>(i));
    }
  }
  if (eligible.empty()) return;

  if (succ_ != kNoVertex) {
    int pick = eligible[ctx.rng().uniform(eligible.size())];
    if (digests_[pick].path != path_) {
      Message m(kRsvEdge);
      m.push(nbrs[pick]);
      m.push(digests_[pick].path);
      ctx.send(succ_, m);
    }
  }
  if (is_endpoint()) {
    int pick = eligible[ctx.rng().uniform(eligible.size())];
    if (digests_[pick].path != path_ && nbrs[pick] != succ_) {
      rsv_self_to_ = nbrs[pick];
      ctx.send(rsv_self_to_, Message(kRsvSelf));
    }
  }
}

void PathVertex::do_notify(StepContext& ctx) {
  auto nbrs = ctx.neighbors();
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind == kRsvEdge) {
      if (env.sender != pred_) {
        fail("edge reservation from a non-predecessor");
        return;
      }
      rsv_in_uj_ = env.sender;
      rsv_in_v_ = env.msg.id(0);
      rsv_in_q_ = env.msg.id(1);
      // Useful only if the other endpoint of the reserved-for path is my
      // neighbor too; singleton paths have a single endpoint.
      VertexId w = kNoVertex;
      for (std::size_t i = 0; i < nbrs.size(); ++i) {
        if (digests_[i].path != rsv_in_q_ || !digests_[i].endpoint())
          continue;
        if (digests_[i].singleton()) {
          if (nbrs[i] == rsv_in_v_) w = nbrs[i];
        } else if (nbrs[i] != rsv_in_v_) {
          w = nbrs[i];
        }
      }
      if (w != kNoVertex) {
        rsv_in_w_ = w;
        Message m(kRsvNote);
        m.push(rsv_in_uj_);
        m.push(path_);
        ctx.send(w, m);
      }
    } else if (env.msg.kind == kRsvSelf) {
      int idx = nbr_index(env.sender);
      if (idx < 0) continue;
      candidates_.push_back(Reservation{env.sender, env.sender,
                                        digests_[idx].path, false});
      got_useful_ = true;
    }
  }
}

namespace {
bool sel_contribute(PathVertex& v, StepContext& ctx, Message& m) {
  return v.sel_make(ctx, m);
}
void sel_combine(PathVertex&, Message& a, const Message& b) {
  auto key = [](const Message& m) {
    return std::pair(m.ids[0], static_cast<int>(m.flag(0)));
  };
  if (key(b) < key(a)) a = b;
}
void sel_on_root(PathVertex& v, StepContext& ctx, const Message& m,
                 bool has) {
  v.sel_finish(ctx, m, has);
}
bool sel_payload(PathVertex& v, StepContext&, Message& m) {
  return v.sel_bc_payload(m);
}
void sel_settle(PathVertex& v, StepContext&, const Message& m) {
  v.sel_apply(m);
}
}  // namespace

bool PathVertex::sel_make(StepContext&, Message& m) {
  if (candidates_.empty()) return false;
  const Reservation* best = &candidates_[0];
  for (const auto& c : candidates_) {
    auto key = [](const Reservation& r) {
      return std::pair(r.owner, static_cast<int>(!r.edge_kind));
    };
    if (key(c) < key(*best)) best = &c;
  }
  m.push(best->owner);
  m.push(best->contact);
  m.set_flag(0, !best->edge_kind);  // bit set: endpoint element
  return true;
}

void PathVertex::sel_finish(StepContext& ctx, const Message& m, bool has) {
  sel_has_choice_ = has;
  if (has) {
    sel_res_.owner = m.ids[0];
    sel_res_.edge_kind = !m.flag(0);
  }
  // The fair per-path coin, keyed by (leader, iteration).
  coin_heads_ = ctx.derive(self_, iteration_).coin();
}

bool PathVertex::sel_bc_payload(Message& m) {
  m.push(sel_has_choice_ ? sel_res_.owner : 0);
  m.set_flag(0, sel_has_choice_ && !sel_res_.edge_kind);
  m.set_flag(1, sel_has_choice_);
  m.set_flag(2, coin_heads_);
  return true;
}

void PathVertex::sel_apply(const Message& m) {
  coin_heads_ = m.flag(2);
  sel_holder_ = false;
  if (!m.flag(1)) return;
  const VertexId owner = m.id(0);
  const bool edge_kind = !m.flag(0);
  for (const auto& c : candidates_) {
    if (c.owner == owner && c.edge_kind == edge_kind) {
      sel_holder_ = true;
      sel_res_ = c;
    }
  }
}

void PathVertex::do_cv_reserve(StepContext& ctx) {
  if (phase_round_ == 0) {
    for (const auto& env : ctx.inbox()) {
      if (env.msg.kind != kRsvNote) continue;
      candidates_.push_back(
          Reservation{env.msg.id(0), env.sender, env.msg.id(1), true});
      got_useful_ = true;
    }
  }
  run_cv(ctx, kSelUp, &sel_contribute, &sel_combine, &sel_on_root);
}

void PathVertex::do_bc_choice(StepContext& ctx) {
  run_bc(ctx, kSelDown, &sel_payload, &sel_settle);
}

// ---------------------------------------------------------------------
// Gated merge execution: the holder activates its element only on
// tails; the element's contact confirms only on heads. Elementary
// merges splice the source between the edge endpoints; concatenations
// hang it off the reserved endpoint. The source side then learns its
// new id and whether to flip through its own tree.
// ---------------------------------------------------------------------
void PathVertex::do_exec_act(StepContext& ctx) {
  if (sel_holder_ && !coin_heads_) {
    Message m(kSelAct);
    m.push(sel_res_.owner);
    m.set_flag(0, !sel_res_.edge_kind);
    ctx.send(sel_res_.contact, m);
  }
}

void PathVertex::do_exec_contact(StepContext& ctx) {
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind != kSelAct) continue;
    const VertexId owner = env.msg.id(0);
    const bool edge_kind = !env.msg.flag(0);
    if (!coin_heads_) continue;  // target must have tossed heads
    if (edge_kind) {
      if (owner != rsv_in_uj_ || env.sender != rsv_in_w_) {
        fail("activation does not match the reservation");
        return;
      }
      Message on(kMrgOn);
      on.push(rsv_in_v_);
      ctx.send(rsv_in_uj_, on);
      pred_ = env.sender;
      Message conf(kMrgConf);
      conf.set_flag(0, true);
      ctx.send(env.sender, conf);
    } else {
      if (owner != self_ || env.sender != rsv_self_to_) {
        fail("endpoint activation does not match the reservation");
        return;
      }
      const bool attach_tail = succ_ == kNoVertex;
      if (attach_tail) {
        succ_ = env.sender;
      } else {
        pred_ = env.sender;
      }
      Message conf(kMrgConf);
      conf.set_flag(0, true);
      conf.set_flag(1, attach_tail);
      ctx.send(env.sender, conf);
    }
  }
}

void PathVertex::do_exec_anchor(StepContext& ctx) {
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind == kMrgOn) {
      const VertexId v = env.msg.id(0);
      ctx.send(v, Message(kMrgLink));
      succ_ = v;
    } else if (env.msg.kind == kMrgConf && env.msg.flag(0)) {
      bool path_flip;
      if (sel_res_.edge_kind) {
        path_flip = self_ == head_;
        if (self_ != tail_) std::swap(pred_, succ_);
        succ_ = env.sender;
      } else if (env.msg.flag(1)) {
        path_flip = self_ != head_;
        if (self_ != head_) std::swap(pred_, succ_);
        pred_ = env.sender;
      } else {
        path_flip = self_ != tail_;
        if (self_ != tail_) std::swap(pred_, succ_);
        succ_ = env.sender;
      }
      src_initiator_ = true;
      src_flip_ = path_flip;
      src_newid_ = sel_res_.target;
      src_self_done_ = true;
      path_ = sel_res_.target;
    }
  }
}

void PathVertex::do_exec_link(StepContext& ctx) {
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind != kMrgLink) continue;
    if (self_ != head_ && self_ != tail_) {
      fail("splice entry is not an endpoint");
      return;
    }
    if (self_ != head_) std::swap(pred_, succ_);
    pred_ = env.sender;
    int idx = nbr_index(env.sender);
    if (idx >= 0) path_ = digests_[idx].path;
    src_self_done_ = true;
  }
}

namespace {
bool src_contribute(PathVertex& v, StepContext& ctx, Message& m) {
  return v.src_make(ctx, m);
}
void src_combine(PathVertex&, Message& a, const Message& b) {
  if (b.flag(0)) a = b;
}
void src_on_root(PathVertex& v, StepContext& ctx, const Message& m,
                 bool has) {
  v.src_finish(ctx, m, has);
}
bool src_payload(PathVertex& v, StepContext&, Message& m) {
  return v.src_bc_payload(m);
}
void src_settle(PathVertex& v, StepContext&, const Message& m) {
  v.src_apply(m);
}
}  // namespace

bool PathVertex::src_make(StepContext&, Message& m) {
  if (!src_initiator_) return false;
  m.push(src_newid_);
  m.set_flag(0, true);
  m.set_flag(1, src_flip_);
  return true;
}

void PathVertex::src_finish(StepContext&, const Message& m, bool has) {
  src_newid_ = has && m.flag(0) ? m.id(0) : kNoVertex;
  src_flip_ = has && m.flag(1);
  src_bc_has_ = has && m.flag(0);
}

bool PathVertex::src_bc_payload(Message& m) {
  if (!src_bc_has_) return false;
  m.push(src_newid_);
  m.set_flag(0, true);
  m.set_flag(1, src_flip_);
  return true;
}

void PathVertex::src_apply(const Message& m) {
  if (!m.flag(0) || src_self_done_) return;
  if (m.flag(1)) std::swap(pred_, succ_);
  path_ = m.id(0);
}

void PathVertex::do_cv_exec_src(StepContext& ctx) {
  run_cv(ctx, kSrcUp, &src_contribute, &src_combine, &src_on_root);
}

void PathVertex::do_bc_exec_src(StepContext& ctx) {
  run_bc(ctx, kSrcDown, &src_payload, &src_settle);
  if (phase_round_ + 1 == phase_len()) {
    src_self_done_ = false;
    src_initiator_ = false;
    src_bc_has_ = false;
  }
}

// ---------------------------------------------------------------------
// Termination check: leaders contribute one unit each up the global
// tree; the root broadcasts a verdict.
// ---------------------------------------------------------------------
void PathVertex::do_term_check(StepContext& ctx) {
  const int depth_limit = script_->rk_mode ? 4 : 2;
  const std::uint32_t slot =
      static_cast<std::uint32_t>(depth_limit - gt_depth_);
  if (phase_round_ == 0) {
    absorb_digests(ctx);
    tc_count_ = is_leader() ? 1 : 0;
    tc_hi_count_ = is_leader() && (!script_->rk_mode || in_hi_path()) ? 1 : 0;
    tc_verdict_ = 0;
  }
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind == kTcUp) {
      tc_count_ += env.msg.id(0);
      tc_hi_count_ += env.msg.id(1);
    } else if (env.msg.kind == kTcDown) {
      tc_verdict_ = env.msg.flags & 3;
      for (VertexId c : gt_children_) ctx.send(c, env.msg);
    }
  }
  if (phase_round_ == slot && gt_parent_ != kNoVertex &&
      (tc_count_ || tc_hi_count_)) {
    Message m(kTcUp);
    m.push(static_cast<VertexId>(tc_count_));
    m.push(static_cast<VertexId>(tc_hi_count_));
    ctx.send(gt_parent_, m);
  }
  if (phase_round_ == static_cast<std::uint32_t>(depth_limit) &&
      gt_depth_ == 0) {
    std::uint8_t verdict = 0;
    if (tc_count_ == 1) {
      verdict = 1;
    } else if (script_->rk_mode && tc_count_ == 2 && tc_hi_count_ <= 1) {
      verdict = 2;
    }
    tc_verdict_ = verdict;
    Message m(kTcDown, verdict);
    for (VertexId c : gt_children_) ctx.send(c, m);
  }
}

// ---------------------------------------------------------------------
// Closing the final path into a cycle. Direct closure keeps the
// orientation; a rotation witness re-orients the whole cycle by a wave
// started at the head.
// ---------------------------------------------------------------------
void PathVertex::do_final_close(StepContext&) {
  wave_len_ = 0;
  closed_cycle_ = false;
  if (!det_cycled_) {
    if (!script_->rk_mode) {
      fail("final path is not cycled on a Dirac input");
    }
    return;
  }
  if (graph_->has_edge(head_, tail_)) {
    if (self_ == tail_) succ_ = head_;
    if (self_ == head_) pred_ = tail_;
    closed_cycle_ = true;
    return;
  }
  wave_len_ = static_cast<std::uint32_t>(n_) + 4;
  closed_cycle_ = true;
}

void PathVertex::do_final_wave(StepContext& ctx) {
  if (phase_round_ == 0) {
    if (self_ == head_) ctx.send(succ_, Message(kWave));
    return;
  }
  for (const auto& env : ctx.inbox()) {
    if (env.msg.kind != kWave) continue;
    if (self_ == head_) {
      pred_ = env.sender;  // the wave came full circle
      continue;
    }
    auto nbrs = cycle_neighbors(det_wa_, det_wb_);
    VertexId other = nbrs[0] == env.sender ? nbrs[1] : nbrs[0];
    pred_ = env.sender;
    succ_ = other;
    ctx.send(succ_, Message(kWave));
  }
}

}  // namespace hamcon::detail

// =======================================================================
// Orchestration: engine setup, instrumentation, extraction.
// =======================================================================
namespace hamcon {

using detail::PathVertex;
using detail::Ph;
using detail::Script;

namespace {

PathCoverView extract_cover(
    std::span<const std::unique_ptr<VertexProgram>> programs,
    std::string* reason) {
  const std::size_t n = programs.size();
  std::vector<VertexPathState> states(n);
  for (std::size_t v = 0; v < n; ++v) {
    states[v] = static_cast<const PathVertex*>(programs[v].get())->state();
  }
  PathCoverView view;
  std::vector<bool> used(n, false);
  for (std::size_t v = 0; v < n; ++v) {
    if (states[v].pred != kNoVertex) continue;
    Path p;
    VertexId cur = static_cast<VertexId>(v);
    while (cur != kNoVertex) {
      if (used[cur]) {
        if (reason) *reason = "successor walk revisits " + std::to_string(cur);
        return {};
      }
      used[cur] = true;
      p.push_back(cur);
      cur = states[cur].succ;
    }
    view.paths.push_back(std::move(p));
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (!used[v]) {
      if (reason) {
        *reason = "vertex " + std::to_string(v) + " not on any head chain";
      }
      return {};
    }
  }
  return view;
}

Path extract_cycle(std::span<const std::unique_ptr<VertexProgram>> programs) {
  const std::size_t n = programs.size();
  Path cycle;
  std::vector<bool> used(n, false);
  VertexId cur = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (cur == kNoVertex || used[cur]) return {};
    used[cur] = true;
    cycle.push_back(cur);
    cur = static_cast<const PathVertex*>(programs[cur].get())->state().succ;
  }
  if (cur != 0) return {};
  return cycle;
}

const PathVertex* as_pv(const std::unique_ptr<VertexProgram>& p) {
  return static_cast<const PathVertex*>(p.get());
}

}  // namespace

std::string HamResult::to_record() const {
  std::ostringstream os;
  os << "{\"n\":" << n << ",\"seed\":" << seed << ",\"class\":\""
     << graph_class << "\",\"success\":" << (success ? "true" : "false")
     << ",\"is_cycle\":" << (is_cycle ? "true" : "false")
     << ",\"d_nonempty\":" << (d_nonempty ? "true" : "false")
     << ",\"drained_paths\":" << drained_paths
     << ",\"iterations\":" << iterations
     << ",\"congest_rounds\":" << congest_rounds
     << ",\"total_messages\":" << total_messages
     << ",\"peak_message_bits\":" << peak_message_bits << ",\"cover_sizes\":[";
  for (std::size_t i = 0; i < cover_sizes.size(); ++i) {
    os << (i ? "," : "") << cover_sizes[i];
  }
  os << "],\"cycle\":[";
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    os << (i ? "," : "") << cycle[i];
  }
  os << "]";
  if (!failure.empty()) os << ",\"failure\":\"" << failure << "\"";
  os << "}";
  return os.str();
}

HamResult run_protocol(const Graph& g, std::uint64_t seed,
                       const ProtocolConfig& config,
                       RunInstrumentation* instr) {
  const std::size_t n = g.vertex_count();
  HamResult result;
  result.n = n;
  result.seed = seed;
  result.graph_class = config.rk_mode ? "rk" : "dirac";
  if (n < 3 && config.want_cycle) {
    result.failure = "no Hamiltonian cycle exists on fewer than 3 vertices";
    return result;
  }
  if (n == 0) {
    result.failure = "empty graph";
    return result;
  }

  Script script = Script::build(n, config);
  EngineOptions eopts;
  eopts.bit_budget_override = config.bit_budget_override;
  eopts.trace = config.trace;
  RoundEngine engine(g, seed, eopts);

  std::vector<std::unique_ptr<VertexProgram>> programs;
  programs.reserve(n);
  for (VertexId v = 0; v < n; ++v) {
    programs.push_back(std::make_unique<PathVertex>(script, g, v));
  }
  std::span<const std::unique_ptr<VertexProgram>> view{programs.data(),
                                                       programs.size()};

  // Observer state: phase-boundary snapshots keyed off vertex 0's
  // instruction pointer (all vertices advance in lockstep).
  std::size_t prev_ip = 0;
  std::size_t pair_entry_cover = 0;
  IterationSample sample;
  bool sample_open = false;
  std::string check_reason;
  bool check_failed = false;
  PathCoverView mid_cover;

  auto close_sample = [&](std::size_t cover_now) {
    if (!sample_open) return;
    sample.cover_after = cover_now;
    sample.executed_merges = sample.cover_mid - cover_now;
    if (instr) instr->samples.push_back(sample);
    sample_open = false;
  };

  auto on_round = [&](std::uint32_t,
                      std::span<const std::unique_ptr<VertexProgram>> ps) {
    const PathVertex* p0 = as_pv(ps[0]);
    const std::size_t ip = p0->ip();
    if (ip == prev_ip) return;
    const Ph now = script.steps[ip].kind;
    const bool entered_iter = ip == script.iter_start;
    // The final sequence starts while the cover is still a single open
    // path; after closure the successor map is cyclic and no cover view
    // exists, so boundary snapshots stop there.
    const bool entered_final = ip == script.final_start;
    const bool entered_halt = now == Ph::kHalt && !p0->closed_cycle();

    if (entered_iter || entered_final || entered_halt) {
      std::string reason;
      auto cover = extract_cover(ps, &reason);
      if (cover.paths.empty() && n > 0) {
        if (instr && instr->check_covers && !p0->failed()) {
          check_failed = true;
          check_reason = "cover extraction failed: " + reason;
        }
      } else {
        if (instr && instr->check_covers && !verify_cover(g, cover, &reason)) {
          check_failed = true;
          check_reason = "invalid cover at iteration boundary: " + reason;
        }
        if (instr && instr->initial_cover.paths.empty()) {
          instr->initial_cover = cover;
        }
        result.cover_sizes.push_back(cover.paths.size());
        close_sample(cover.paths.size());
        if (entered_iter && instr && instr->collect_samples) {
          sample = IterationSample{};
          sample.iteration = p0->iteration();
          sample.cover_before = cover.paths.size();
          sample_open = true;
        }
      }
    }

    if (instr && sample_open) {
      if (now == Ph::kPair) {
        auto cover = extract_cover(ps, nullptr);
        pair_entry_cover = cover.paths.size();
      }
      if (now == Ph::kReserve) {
        mid_cover = extract_cover(ps, nullptr);
        sample.cover_mid = mid_cover.paths.size();
        sample.cycle_merges = pair_entry_cover - sample.cover_mid;
        if (instr->oracle_checks) {
          sample.good_paths = good_paths(g, mid_cover).size();
        }
      }
      if (now == Ph::kExecAct) {
        // Chosen merges and useful-reservation hits, per path.
        std::map<VertexId, bool> got;
        for (const auto& p : ps) {
          const PathVertex* pv = as_pv(p);
          auto st = pv->state();
          got[st.path] = got[st.path] || pv->got_useful_now();
          if (pv->is_leader() && pv->chose_merge_now()) {
            ++sample.chosen_merges;
          }
        }
        if (instr->oracle_checks && !mid_cover.paths.empty()) {
          auto goods = good_paths(g, mid_cover);
          sample.good_paths = goods.size();
          for (std::size_t gi : goods) {
            VertexId leader = *std::min_element(mid_cover.paths[gi].begin(),
                                                mid_cover.paths[gi].end());
            if (got.count(leader) && got[leader]) ++sample.good_with_useful;
          }
        }
      }
      if (now == Ph::kXCycled && instr->oracle_checks) {
        auto cover = extract_cover(ps, nullptr);
        for (const Path& p : cover.paths) {
          VertexId leader = *std::min_element(p.begin(), p.end());
          const PathVertex* pv = as_pv(ps[leader]);
          if (!pv->is_leader()) continue;
          sample.cycled_pairs.emplace_back(pv->dist_cycled(),
                                           is_cycled_ref(g, p));
          sample.sociable_pairs.emplace_back(pv->dist_sociable(),
                                             is_sociable_ref(g, p));
        }
      }
    }

    if (instr && instr->check_trees && now == Ph::kCvEndpoints) {
      // Tree discipline: every edge in at most two concurrent path
      // trees, every attached member within depth 2.
      std::map<std::pair<VertexId, VertexId>, std::set<VertexId>> edge_trees;
      auto edge_key = [](VertexId a, VertexId b) {
        return std::pair(std::min(a, b), std::max(a, b));
      };
      for (std::size_t vi = 0; vi < ps.size(); ++vi) {
        const PathVertex* pv = as_pv(ps[vi]);
        auto st = pv->state();
        VertexId self = static_cast<VertexId>(vi);
        if (st.tree_parent != kNoVertex) {
          edge_trees[edge_key(self, st.tree_parent)].insert(st.path);
        }
        for (const auto& [child, root] : pv->tree_children()) {
          edge_trees[edge_key(self, child)].insert(root);
        }
        std::size_t depth =
            st.path == self ? 0 : (st.tree_parent == st.path ? 1 : 2);
        instr->trees.max_depth = std::max(instr->trees.max_depth, depth);
      }
      for (const auto& [e, trees] : edge_trees) {
        instr->trees.max_trees_per_edge =
            std::max(instr->trees.max_trees_per_edge, trees.size());
      }
      ++instr->trees.snapshots;
    }

    prev_ip = ip;
  };
  engine.set_observer(on_round);

  const std::uint32_t match_len =
      3 * (4 * static_cast<std::uint32_t>(ceil_log2(n)) + 10);
  const std::uint32_t max_rounds =
      config.max_rounds
          ? config.max_rounds
          : 4000 + 2 * match_len +
                script.iteration_cap *
                    (260 + 4 * static_cast<std::uint32_t>(n));

  ExecutionResult er;
  try {
    er = engine.run_rounds(view, max_rounds);
  } catch (const CongestViolation& v) {
    result.failure = std::string("model violation: ") + v.what();
    return result;
  }

  result.congest_rounds = er.rounds;
  result.total_messages = er.total_messages;
  result.peak_message_bits = er.peak_message_bits;

  const PathVertex* p0 = as_pv(programs[0]);
  result.iterations = p0->iterations_entered();
  result.d_nonempty = p0->rk_d_nonempty();

  for (const auto& p : programs) {
    const PathVertex* pv = as_pv(p);
    if (pv->failed()) {
      result.failure = pv->failure();
      return result;
    }
  }
  if (!er.all_halted) {
    result.failure = "round budget exhausted before termination";
    return result;
  }
  if (check_failed) {
    result.failure = check_reason;
    return result;
  }

  const bool closed = p0->closed_cycle();
  if (closed) {
    result.cycle = extract_cycle(view);
    result.is_cycle = !result.cycle.empty();
    std::string reason;
    if (!result.is_cycle ||
        !verify_hamiltonian(g, result.cycle, true, &reason)) {
      result.failure = "output cycle invalid: " + reason;
      return result;
    }
  } else {
    std::string reason;
    auto cover = extract_cover(view, &reason);
    if (cover.paths.size() == 1 &&
        verify_hamiltonian(g, cover.paths[0], false, &reason)) {
      result.cycle = cover.paths[0];
      result.is_cycle = false;
    } else {
      result.failure = result.failure.empty()
                           ? "final cover is not a single valid path"
                           : result.failure;
      return result;
    }
  }
  result.success = true;
  return result;
}

}  // namespace hamcon
