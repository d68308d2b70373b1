#ifndef HAMCON_PROTOCOL_VERTEX_HPP
#define HAMCON_PROTOCOL_VERTEX_HPP

// Internal header: the vertex program realizing the path-cover merging
// protocol, shared by the base implementation and the Ore/RK extension.

#include <array>
#include <cstdint>
#include <vector>

#include "hamcon/engine.hpp"
#include "hamcon/protocol.hpp"

namespace hamcon::detail {

// Message kinds. One enum for the whole protocol so traces stay readable.
enum Mk : std::uint8_t {
  kGtMin1 = 1,
  kGtMin2,
  kGtChild,
  kRkCand,
  kRkBfs,
  kRkParent,
  kRkInfo,
  kRkDflag,
  kMmPropose,
  kMmAccept,
  kMmStatus,
  kPcEnd,
  kPcNbr,
  kPtQuery,
  kPtResp,
  kPtChild,
  kPtRelay,
  kDigest,
  kCveUp,
  kCveDown,
  kPairUp,
  kPairSet,
  kPartnerDown,
  kCyBit,
  kDetUp,
  kDetDown,
  kXCycled,
  kPcyUp,
  kExeDown,
  kSizeUp,
  kSizeDown,
  kCut,
  kWave,
  kRsvEdge,
  kRsvSelf,
  kRsvNote,
  kSelUp,
  kSelDown,
  kSelAct,
  kMrgOn,
  kMrgConf,
  kMrgLink,
  kSrcUp,
  kSrcDown,
  kTcUp,
  kTcDown,
  kDrPlug,
  kDrCmd,
  kDrUp,
  kDrDown,
  kBdCollect,   // clique member -> collector (boundary routing)
  kBdToHeavy,   // collector -> heavy path neighbor
  kBdFwdNbr,    // heavy member -> non-heavy path neighbor (downward)
  kBdFwdClique, // collector -> clique mates (downward)
  kEgFlags,
  kEgUp,
  kEgFlood1,
  kEgFlood2,
};

// Lockstep phase kinds. Every vertex advances through an identical
// script, so phase transitions never need coordination messages.
enum class Ph : std::uint8_t {
  kGtFlood1,
  kGtFlood2,
  kGtParent,
  kGtChildren,
  kRkVstar,    // flood the minimum low-degree vertex id
  kRkBfs,      // BFS layers from v*, then parent pick
  kRkInfo,     // neighbor exchange of (layer, heavy)
  kRkDflood,   // OR-flood of "layer 4 exists"
  kRkDSolve,   // constant-round build for the distance-4 family
  kMatch,      // randomized propose-accept maximal matching
  kMatchGap,   // one settle round between the two matchings
  kPathForm,
  kDigest,
  kTreeBuild,
  kCvEndpoints,
  kBcEndpoints,
  kDrainPlug,  // param 0: A-hat-plus stage, 1: C-hat stage
  kDrainCmd,
  kDrainCvUp,
  kDrainBcDown,
  kPair,
  kBcPartner,
  kCyBit,
  kCvDetect,
  kBcDetect,
  kXCycled,
  kCvPartner,
  kBcExec,
  kSizeCv,
  kWave,
  kReserve,
  kNotify,
  kCvReserve,
  kBcChoice,
  kExecAct,
  kExecContact,
  kExecAnchor,
  kExecLink,
  kCvExecSrc,
  kBcExecSrc,
  kTermCheck,
  kFinalCyBit,
  kFinalCvDetect,
  kFinalBcDetect,
  kFinalClose,
  kFinalWave,
  kEgFlood1,   // (path id, head, tail, classes) of the lower-id path
  kEgFlood2,   // same for the other path
  kEgFlags,
  kEgCv,
  kEgFlood3,   // candidate record of the lower-id path
  kEgFlood4,
  kEgExec,
  kEgWave,
  kHalt,
};

struct PhaseStep {
  Ph kind;
  std::uint32_t len;
  std::uint8_t param = 0;
};

// Shared, per-run constants; identical on every vertex.
struct Script {
  std::vector<PhaseStep> steps;
  std::size_t iter_start = 0;   // index to loop back to
  std::size_t final_start = 0;  // closure sequence
  std::size_t endgame_start = 0;
  std::size_t halt_index = 0;
  std::uint32_t iteration_cap = 0;
  bool rk_mode = false;
  bool want_cycle = true;

  static Script build(std::size_t n, const ProtocolConfig& config);
};

// Vertex classes used by the layered (RK) extension.
enum class VClass : std::uint8_t { kHeavy = 0, kAPlus = 1, kCHat = 2 };

struct Digest {
  VertexId path = kNoVertex;
  std::uint8_t flags = 0;  // bit0 endpoint, bit1 in_hi, bit2 singleton,
                           // bits3-4 class, bit5 heavy-path-neighbor
  bool endpoint() const { return flags & 1; }
  bool in_hi() const { return flags & 2; }
  bool singleton() const { return flags & 4; }
  VClass vclass() const { return static_cast<VClass>((flags >> 3) & 3); }
  bool heavy_path_nbr() const { return flags & 32; }
};

struct Reservation {
  VertexId owner = kNoVertex;    // element vertex (u_j or the endpoint)
  VertexId contact = kNoVertex;  // who to activate through
  VertexId target = kNoVertex;   // path the element belongs to
  bool edge_kind = false;
};

class PathVertex : public VertexProgram {
 public:
  PathVertex(const Script& script, const Graph& g, VertexId self);

  void step(StepContext& ctx) override;

  // Instrumentation surface (read between rounds by the harness).
  VertexPathState state() const;
  std::size_t ip() const { return ip_; }
  Ph phase() const { return script_->steps[ip_].kind; }
  std::uint32_t iteration() const { return iteration_; }
  std::uint32_t iterations_entered() const { return iterations_entered_; }
  bool failed() const { return violation_; }
  const std::string& failure() const { return failure_; }
  bool is_leader() const { return path_ == self_; }
  bool cycle_merged_now() const { return exec_merge_; }
  bool chose_merge_now() const { return sel_has_choice_ && is_leader(); }
  bool got_useful_now() const { return got_useful_; }
  bool dist_cycled() const { return det_cycled_; }
  bool dist_sociable() const { return cve_sociable_; }
  bool closed_cycle() const { return closed_cycle_; }
  bool rk_d_nonempty() const { return rk_d_nonempty_; }
  VertexId tree_parent() const { return pt_parent_; }
  VertexId head() const { return head_; }
  VertexId tail() const { return tail_; }
  const std::vector<std::pair<VertexId, VertexId>>& tree_children() const {
    return pt_children_;
  }

  // Payload hooks for the convergecast/broadcast framework; used by the
  // per-phase callback shims only.
  bool cve_make(StepContext& ctx, Message& m);
  void cve_finish(StepContext& ctx, const Message& m, bool has);
  bool cve_bc_payload(Message& m);
  void cve_apply(const Message& m);
  bool partner_bc_payload(Message& m);
  void partner_apply(const Message& m);
  void reset_iteration_scratch();
  bool det_make(StepContext& ctx, Message& m);
  void det_finish(StepContext& ctx, const Message& m, bool has);
  bool det_bc_payload(Message& m);
  void det_apply(const Message& m);
  bool pcy_make(StepContext& ctx, Message& m);
  void pcy_finish(StepContext& ctx, const Message& m, bool has);
  bool exe_bc_payload(Message& m);
  void exe_apply(StepContext& ctx, const Message& m);
  bool sel_make(StepContext& ctx, Message& m);
  void sel_finish(StepContext& ctx, const Message& m, bool has);
  bool sel_bc_payload(Message& m);
  void sel_apply(const Message& m);
  bool src_make(StepContext& ctx, Message& m);
  void src_finish(StepContext& ctx, const Message& m, bool has);
  bool src_bc_payload(Message& m);
  void src_apply(const Message& m);
  bool drn_make(StepContext& ctx, Message& m);
  void drn_finish(StepContext& ctx, const Message& m, bool has);
  bool drn_bc_payload(Message& m);
  void drn_apply(const Message& m);
  bool eg_make(StepContext& ctx, Message& m);
  void eg_finish(StepContext& ctx, const Message& m, bool has);
  bool final_pass_ = false;  // detection runs without pairing context

 protected:
  // --- helpers -----------------------------------------------------
  int nbr_index(VertexId u) const;
  bool adjacent(VertexId u) const { return graph_->has_edge(self_, u); }
  bool is_endpoint() const {
    return pred_ == kNoVertex || succ_ == kNoVertex;
  }
  bool heavy() const { return 2 * graph_->degree(self_) >= n_; }
  VClass vclass() const;
  bool in_hi_path() const;
  std::uint32_t phase_len() const;
  void advance_phase(StepContext& ctx);
  void fail(const std::string& why);

  // Path-tree plumbing. Convergecasts and broadcasts run on a fixed
  // subround schedule; combine semantics are phase-specific callbacks.
  using Combine = void (*)(PathVertex&, Message&, const Message&);
  using Contribute = bool (*)(PathVertex&, StepContext&, Message&);
  using OnRoot = void (*)(PathVertex&, StepContext&, const Message&, bool);
  using OnSettle = void (*)(PathVertex&, StepContext&, const Message&);

  int pt_depth() const;
  void run_cv(StepContext& ctx, std::uint8_t kind, Contribute contribute,
              Combine combine, OnRoot on_root);
  void run_bc(StepContext& ctx, std::uint8_t kind, Contribute payload,
              OnSettle settle);

  // --- phase handlers (base protocol) ------------------------------
  void do_gt(StepContext& ctx);
  void do_match(StepContext& ctx);
  void do_path_form(StepContext& ctx);
  void do_digest(StepContext& ctx);
  void absorb_digests(StepContext& ctx);
  void do_tree_build(StepContext& ctx);
  void do_cv_endpoints(StepContext& ctx);
  void do_bc_endpoints(StepContext& ctx);
  void do_pair(StepContext& ctx);
  void do_bc_partner(StepContext& ctx);
  void do_cy_bit(StepContext& ctx, bool final_pass);
  void do_cv_detect(StepContext& ctx, bool final_pass);
  void do_bc_detect(StepContext& ctx, bool final_pass);
  void do_x_cycled(StepContext& ctx);
  void do_cv_partner(StepContext& ctx);
  void do_bc_exec(StepContext& ctx);
  void do_size_cv(StepContext& ctx);
  void do_wave(StepContext& ctx);
  void do_reserve(StepContext& ctx);
  void do_notify(StepContext& ctx);
  void do_cv_reserve(StepContext& ctx);
  void do_bc_choice(StepContext& ctx);
  void do_exec_act(StepContext& ctx);
  void do_exec_contact(StepContext& ctx);
  void do_exec_anchor(StepContext& ctx);
  void do_exec_link(StepContext& ctx);
  void do_cv_exec_src(StepContext& ctx);
  void do_bc_exec_src(StepContext& ctx);
  void do_term_check(StepContext& ctx);
  void do_final_close(StepContext& ctx);
  void do_final_wave(StepContext& ctx);

  // --- phase handlers (RK extension, defined in rk.cpp) ------------
  void do_rk_vstar(StepContext& ctx);
  void do_rk_bfs(StepContext& ctx);
  void do_rk_info(StepContext& ctx);
  void do_rk_dflood(StepContext& ctx);
  void do_rk_dsolve(StepContext& ctx);
  void do_drain_plug(StepContext& ctx, int stage);
  void do_drain_cmd(StepContext& ctx, int stage);
  void do_drain_cv_up(StepContext& ctx);
  void do_drain_bc_down(StepContext& ctx);
  void do_eg_flood(StepContext& ctx, int which);
  void do_eg_flags(StepContext& ctx);
  void do_eg_cv(StepContext& ctx);
  void do_eg_exec(StepContext& ctx);

  // Cycle-merge helpers.
  std::array<VertexId, 2> cycle_neighbors(VertexId wa, VertexId wb) const;
  void apply_direct_exit(VertexId x, VertexId y);
  void apply_direct_entry(VertexId y, VertexId x);
  void start_rotation(StepContext& ctx, bool exit_side, VertexId link_self,
                      VertexId link_other);

  // --- immutable context -------------------------------------------
  const Script* script_;
  const Graph* graph_;
  VertexId self_;
  std::size_t n_;

  // --- scheduling ----------------------------------------------------
  std::size_t ip_ = 0;
  std::uint32_t phase_round_ = 0;
  std::uint32_t iteration_ = 0;
  std::uint32_t iterations_entered_ = 0;
  std::uint32_t wave_len_ = 0;
  bool violation_ = false;
  std::string failure_;

  // --- global tree -----------------------------------------------------
  VertexId gt_root_ = kNoVertex;
  VertexId gt_parent_ = kNoVertex;
  std::vector<VertexId> gt_children_;
  int gt_depth_ = 0;
  VertexId gt_min_seen_ = kNoVertex;
  // pairing bookkeeping: ids forwarded up and where they came from
  std::vector<std::pair<VertexId, VertexId>> pair_route_;  // (id, child)
  std::vector<VertexId> pair_pool_;
  std::vector<std::pair<VertexId, VertexId>> pair_out_;  // notifications
  std::uint64_t tc_count_ = 0;
  std::uint64_t tc_hi_count_ = 0;
  std::uint8_t tc_verdict_ = 0;

  // --- RK layering ------------------------------------------------------
  VertexId v_star_ = kNoVertex;
  int rk_layer_ = -1;
  bool rk_d_nonempty_ = false;
  std::vector<std::uint8_t> nbr_layer_;   // per neighbor index, 255 unknown
  std::vector<std::uint8_t> nbr_heavy_;
  VertexId clique_hub_ = kNoVertex;

  // --- matchings --------------------------------------------------------
  VertexId f_partner_ = kNoVertex;
  VertexId s_partner_ = kNoVertex;
  VertexId mm_partner_ = kNoVertex;
  VertexId mm_proposed_ = kNoVertex;
  bool mm_status_sent_ = false;
  std::vector<std::uint8_t> mm_free_;  // per neighbor index
  std::vector<std::uint8_t> mm_active_;

  // --- path state --------------------------------------------------------
  VertexId path_ = kNoVertex;
  VertexId pred_ = kNoVertex;
  VertexId succ_ = kNoVertex;
  VertexId head_ = kNoVertex;
  VertexId tail_ = kNoVertex;
  std::uint8_t head_class_ = 0;
  std::uint8_t tail_class_ = 0;
  std::size_t size_known_ = 0;
  VertexId partner_ = kNoVertex;

  // path-form scratch
  VertexId pf_end_[2] = {kNoVertex, kNoVertex};
  std::uint8_t pf_hops_[2] = {0, 0};
  VertexId pf_other_[2] = {kNoVertex, kNoVertex};

  // --- digests ------------------------------------------------------------
  std::vector<Digest> digests_;

  // --- path tree -----------------------------------------------------------
  VertexId pt_parent_ = kNoVertex;
  bool pt_attached_ = false;
  std::vector<std::pair<VertexId, VertexId>> pt_children_;  // (child, root)
  std::vector<std::pair<VertexId, Message>> relay_buf_;     // (root, agg)
  // boundary routing (RK): collector this vertex reports through
  VertexId bd_collector_ = kNoVertex;
  std::vector<std::pair<VertexId, Message>> bd_buf_;

  // --- shared convergecast/broadcast scratch --------------------------------
  Message cv_acc_;       // partial aggregate for my own path
  bool cv_acc_has_ = false;
  Message bc_msg_;       // broadcast payload once received
  bool bc_has_ = false;

  // --- endpoint census ------------------------------------------------------
  bool cve_sociable_ = false;

  // --- detection -------------------------------------------------------------
  bool cy_bit_in_ = false;
  bool det_cycled_ = false;
  VertexId det_wa_ = kNoVertex, det_wb_ = kNoVertex;
  VertexId det_la_ = kNoVertex, det_lb_ = kNoVertex;
  bool det_has_link_ = false;
  bool partner_cycled_ = false;
  bool got_x_ = false;
  std::uint64_t partner_size_ = 0;

  // --- cycle-merge execution ----------------------------------------------
  bool exec_merge_ = false;
  VertexId exec_wa_ = kNoVertex, exec_wb_ = kNoVertex;
  VertexId exec_x_ = kNoVertex, exec_y_ = kNoVertex;
  VertexId exec_newid_ = kNoVertex;
  VertexId exec_cut_ = kNoVertex;   // cut partner announced by the link vertex
  VertexId exec_next_ = kNoVertex;  // first wave hop on the entry side
  bool exec_head_side_ = false;
  bool exec_direct_ = false;
  bool wave_pending_ = false;  // expecting orientation from the wave

  // --- reservations -----------------------------------------------------------
  std::vector<Reservation> candidates_;
  bool got_useful_ = false;
  // bookkeeping at the far edge endpoint: reservation made through me
  VertexId rsv_in_v_ = kNoVertex;
  VertexId rsv_in_q_ = kNoVertex;
  VertexId rsv_in_w_ = kNoVertex;
  VertexId rsv_in_uj_ = kNoVertex;
  VertexId rsv_self_to_ = kNoVertex;  // I reserved myself for this vertex
  bool sel_has_choice_ = false;  // at the leader: the path picked an element
  bool sel_holder_ = false;      // at the endpoint holding the chosen element
  Reservation sel_res_;
  bool coin_heads_ = false;
  bool src_initiator_ = false;
  bool src_flip_ = false;
  bool src_bc_has_ = false;
  VertexId src_newid_ = kNoVertex;
  bool src_self_done_ = false;

  // --- drains (RK) -------------------------------------------------------------
  std::vector<std::pair<VertexId, VertexId>> drain_plugs_;  // (endpoint, path)
  std::vector<std::uint8_t> drain_single_;
  VertexId drain_partner_[2] = {kNoVertex, kNoVertex};
  VertexId drain_newid_ = kNoVertex;
  bool drain_merged_ = false;
  bool drain_exit_side_ = false;
  std::size_t drained_count_ = 0;  // at the hub: merges arranged

  // --- endgame (RK) ---------------------------------------------------------
  struct EgRecord {
    VertexId path = kNoVertex, head = kNoVertex, tail = kNoVertex;
    std::uint8_t classes = 0;  // 2 bits head, 2 bits tail
    bool cycled = false;
    bool has = false;
    // candidate record
    VertexId ea = kNoVertex, eb = kNoVertex;  // elementary edge of this path
    bool e_dir = false, has_e = false;
    VertexId la = kNoVertex, lb = kNoVertex;  // link edge (self-side first)
    bool has_l = false;
    std::uint8_t cmask = 0;
    bool has_cand = false;
  };
  EgRecord eg_[2];
  std::uint8_t eg_adj_in_ = 0;  // pred's adjacency flags
  bool eg_seen_[4] = {false, false, false, false};
  bool closed_cycle_ = false;

  std::uint64_t rng_salt_ = 0;
};

std::uint32_t default_iteration_cap(std::size_t n, double factor);

}  // namespace hamcon::detail

#endif  // HAMCON_PROTOCOL_VERTEX_HPP
