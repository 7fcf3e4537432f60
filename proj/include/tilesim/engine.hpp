#pragma once

#include <array>
#include <cstdint>
#include <queue>
#include <unordered_map>
#include <vector>

#include "tilesim/program.hpp"
#include "tilesim/topology.hpp"
#include "tilesim/trace.hpp"

namespace tilesim {

struct EngineConfig {
  uint32_t tile_remote_ports = 1;   // non-tile-local issues per tile per cycle
  uint32_t group_port_limit = 0;    // per group->group link per cycle; 0 = tiles_per_group
  uint32_t amo_bank_occupancy = 1;  // bank service cycles held by one AMO
  uint32_t wakeup_write_latency = 0;  // cycles from issue to commit; 0 = remote latency
  bool blocking_loads = true;  // false: compute may overlap one in-flight load
};

enum class PEStatus : uint8_t { Idle, Running, Blocked, Sleeping, Done };

// Wakeup register file indices: one 32-bit core register (all-ones wakes
// every PE, a value < total PEs wakes that PE), one group bitmask register,
// and one tile bitmask register per group.
constexpr uint32_t kCoreWakeupReg = 0;
constexpr uint32_t kGroupWakeupReg = 1;
constexpr uint32_t tile_wakeup_reg(uint32_t group) { return 2 + group; }

// Cycle-approximate interpreter for one cluster run: single-port banks with
// round-robin arbitration, per-tile remote issue ports, per group-to-group
// link limits, fixed base latencies per locality class, and a sticky-flag
// wakeup unit. One engine instance executes one run.
class Engine {
 public:
  Engine(const Topology& topo, EngineConfig cfg = {});

  const Topology& topology() const { return topo_; }
  const EngineConfig& config() const { return cfg_; }

  // Direct memory image access (initialization / result inspection).
  void poke(uint64_t addr, uint32_t value);
  uint32_t peek(uint64_t addr) const;

  // Registers a program for `pe`. A PE with an empty program is Done
  // immediately; double submission is an error.
  void submit(uint32_t pe, Program prog);

  // Host-side wakeup write: commits immediately and returns the asserted set.
  std::vector<uint32_t> write_wakeup(uint32_t reg, uint32_t value);

  // Advances exactly one cycle.
  void step();

  // Runs until every submitted PE is Done. Raises Deadlock if all remaining
  // PEs sleep with no wakeup in flight, CycleLimitExceeded past max_cycles.
  const Trace& run(uint64_t max_cycles = UINT64_MAX);

  uint64_t cycle() const { return cycle_; }
  PEStatus status(uint32_t pe) const { return pes_[pe].status; }
  bool all_done() const { return done_count_ == submitted_count_; }
  const Trace& trace() const { return trace_; }

  // Instrumentation counters used by tests and reports.
  uint64_t load_count(uint32_t pe, LatencyClass c) const {
    return pes_[pe].loads_by_class[uint32_t(c)];
  }
  uint64_t amo_count(uint64_t addr) const;

 private:
  struct Request {
    uint32_t pe = 0;
    OpKind kind = OpKind::Load;
    uint64_t addr = 0;
    uint32_t operand = 0;
    uint64_t ready = 0;  // cycle the request becomes eligible at this stage
    LatencyClass cls = LatencyClass::TileLocal;
  };

  struct PE {
    Program prog;
    PEStatus status = PEStatus::Idle;
    bool pending_wakeup = false;
    bool defer_front_sync = false;  // in-flight non-blocking load
    uint64_t front = 0;             // next free issue cycle of the in-order pipe
    uint32_t response_value = 0;    // value delivered by the next advance
    std::array<uint64_t, 3> loads_by_class{0, 0, 0};
  };

  struct WheelEntry {
    uint64_t cycle;
    uint64_t seq;
    uint32_t pe;        // PE to resume, or UINT32_MAX for wakeup commits
    uint32_t commit_ix; // index into pending_commits_ when pe == UINT32_MAX
    bool operator>(const WheelEntry& o) const {
      return cycle != o.cycle ? cycle > o.cycle : seq > o.seq;
    }
  };

  struct Commit {
    uint32_t reg;
    uint32_t value;
    uint32_t writer;
  };

  // Queue with oldest-round-first, round-robin-on-ties arbitration.
  struct ArbQueue {
    std::vector<Request> waiting;
    uint32_t rr_pointer = 0;
    uint64_t busy_until = 0;  // banks only: multi-cycle AMO occupancy
  };

  void schedule_resume(uint32_t pe, uint64_t cycle);
  void schedule_commit(Commit c, uint64_t cycle);
  void resume_pe(uint32_t pe);
  void execute_op(uint32_t pe);
  void issue_memory(uint32_t pe, const PEOp& op, uint64_t at);
  void enqueue_bank(Request req);
  void apply_commit(const Commit& c);
  void service_banks();
  void drain_tile_ports();
  void drain_group_links();
  void process_cycle();
  bool quiescent() const;
  uint64_t next_wheel_cycle() const;
  // Selects the index of the arbitration winner in q.waiting: the oldest
  // ready round first, ties broken round-robin over PE index.
  int arbitrate(ArbQueue& q) const;

  const Topology topo_;
  EngineConfig cfg_;
  uint32_t resolved_group_limit_;
  uint32_t resolved_wakeup_latency_;

  std::vector<uint32_t> mem_;
  std::vector<PE> pes_;
  std::vector<ArbQueue> banks_;
  std::vector<ArbQueue> tile_ports_;
  std::vector<ArbQueue> group_links_;
  std::vector<uint32_t> busy_banks_;
  std::vector<uint32_t> busy_tiles_;
  std::vector<uint32_t> busy_links_;

  std::priority_queue<WheelEntry, std::vector<WheelEntry>, std::greater<>>
      wheel_;
  std::vector<Commit> pending_commits_;
  std::vector<uint32_t> resumes_scratch_;
  uint64_t seq_ = 0;
  uint64_t cycle_ = 0;
  uint64_t inflight_ = 0;  // memory responses + wakeup commits not yet applied
  uint32_t submitted_count_ = 0;
  uint32_t done_count_ = 0;
  bool started_ = false;

  std::unordered_map<uint64_t, uint64_t> amo_counts_;
  Trace trace_;
};

}  // namespace tilesim
