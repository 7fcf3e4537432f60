#include "tilesim/engine.hpp"

#include <algorithm>
#include <string>

#include "tilesim/barriers.hpp"

namespace tilesim {

namespace {

// The round trip of a memory op splits into request travel, one service
// cycle at the bank, and response travel. Uncontended, the sum equals the
// class base latency (1/3/5 by default).
uint32_t req_travel(uint32_t base) { return (base - 1) / 2; }
uint32_t resp_travel(uint32_t base) { return base - 1 - req_travel(base); }

}  // namespace

Engine::Engine(const Topology& topo, EngineConfig cfg)
    : topo_(topo), cfg_(cfg) {
  if (cfg_.tile_remote_ports == 0 || cfg_.amo_bank_occupancy == 0)
    fail(Errc::ZeroCount, "engine port/occupancy limits must be >= 1");
  resolved_group_limit_ =
      cfg_.group_port_limit ? cfg_.group_port_limit : topo_.tiles_per_group();
  resolved_wakeup_latency_ =
      cfg_.wakeup_write_latency
          ? cfg_.wakeup_write_latency
          : topo_.base_latency(LatencyClass::Remote);
  mem_.assign(topo_.total_words(), 0);
  pes_.resize(topo_.total_pes());
  banks_.resize(topo_.total_banks());
  tile_ports_.resize(topo_.total_tiles());
  group_links_.resize(size_t(topo_.groups()) * topo_.groups());
  trace_.n_pes = topo_.total_pes();
}

void Engine::poke(uint64_t addr, uint32_t value) {
  if (addr >= mem_.size()) fail(Errc::OutOfRange, "poke beyond capacity");
  mem_[addr] = value;
}

uint32_t Engine::peek(uint64_t addr) const {
  if (addr >= mem_.size()) fail(Errc::OutOfRange, "peek beyond capacity");
  return mem_[addr];
}

uint64_t Engine::amo_count(uint64_t addr) const {
  auto it = amo_counts_.find(addr);
  return it == amo_counts_.end() ? 0 : it->second;
}

void Engine::schedule_resume(uint32_t pe, uint64_t cycle) {
  wheel_.push({cycle, seq_++, pe, 0});
}

void Engine::schedule_commit(Commit c, uint64_t cycle) {
  pending_commits_.push_back(c);
  wheel_.push({cycle, seq_++, UINT32_MAX, uint32_t(pending_commits_.size() - 1)});
}

void Engine::submit(uint32_t pe, Program prog) {
  if (pe >= pes_.size()) fail(Errc::OutOfRange, "pe out of range");
  if (pes_[pe].status != PEStatus::Idle)
    fail(Errc::DuplicateProgram,
         "pe " + std::to_string(pe) + " already has a program");
  ++submitted_count_;
  PE& st = pes_[pe];
  st.prog = std::move(prog);
  st.status = PEStatus::Running;
  st.front = cycle_;
  st.prog.start();
  if (st.prog.done()) {
    st.status = PEStatus::Done;
    ++done_count_;
    trace_.total_cycles = std::max(trace_.total_cycles, cycle_);
    return;
  }
  execute_op(pe);
}

void Engine::apply_commit(const Commit& c) {
  trace_.wakeups.push_back({cycle_, c.writer, c.reg, c.value});
  for (uint32_t pe : wakeup_assert_set(topo_, c.reg, c.value)) {
    PE& st = pes_[pe];
    if (st.status == PEStatus::Sleeping) {
      // The in-progress WFI consumes this assertion; the PE resumes next
      // cycle. Blocked prevents a second commit from re-waking it.
      st.status = PEStatus::Blocked;
      st.response_value = 0;
      schedule_resume(pe, cycle_ + 1);
    } else if (st.status != PEStatus::Done) {
      st.pending_wakeup = true;  // sticky until the next WFI
    }
  }
}

std::vector<uint32_t> Engine::write_wakeup(uint32_t reg, uint32_t value) {
  std::vector<uint32_t> set = wakeup_assert_set(topo_, reg, value);
  Commit c{reg, value, UINT32_MAX};
  apply_commit(c);
  return set;
}

void Engine::issue_memory(uint32_t pe, const PEOp& op, uint64_t at) {
  if (op.a >= mem_.size())
    fail(Errc::OutOfRange, "address " + std::to_string(op.a) + " beyond capacity");
  const uint32_t bank = op.a % topo_.total_banks();
  const LatencyClass cls = topo_.locality(pe, bank);
  if (op.kind == OpKind::Load)
    ++pes_[pe].loads_by_class[uint32_t(cls)];
  Request req{pe, op.kind, op.a, op.b, at, cls};
  if (cls == LatencyClass::TileLocal) {
    enqueue_bank(req);
    return;
  }
  const uint32_t tile = topo_.tile_of_pe(pe);
  if (tile_ports_[tile].waiting.empty()) busy_tiles_.push_back(tile);
  tile_ports_[tile].waiting.push_back(req);
}

void Engine::enqueue_bank(Request req) {
  const uint32_t bank = uint32_t(req.addr % topo_.total_banks());
  if (banks_[bank].waiting.empty()) busy_banks_.push_back(bank);
  banks_[bank].waiting.push_back(req);
}

int Engine::arbitrate(ArbQueue& q) const {
  // Oldest ready round first; ties broken round-robin over PE index starting
  // at the pointer left by the previous grant.
  int winner = -1;
  uint64_t best_ready = UINT64_MAX;
  uint32_t best_dist = UINT32_MAX;
  const uint32_t n = topo_.total_pes();
  for (size_t i = 0; i < q.waiting.size(); ++i) {
    const Request& r = q.waiting[i];
    if (r.ready > cycle_) continue;
    const uint32_t dist = (r.pe + n - q.rr_pointer) % n;
    if (r.ready < best_ready || (r.ready == best_ready && dist < best_dist)) {
      best_ready = r.ready;
      best_dist = dist;
      winner = int(i);
    }
  }
  return winner;
}

void Engine::drain_tile_ports() {
  size_t out = 0;
  for (size_t i = 0; i < busy_tiles_.size(); ++i) {
    const uint32_t tile = busy_tiles_[i];
    ArbQueue& q = tile_ports_[tile];
    for (uint32_t granted = 0;
         granted < cfg_.tile_remote_ports && !q.waiting.empty(); ++granted) {
      const int w = arbitrate(q);
      if (w < 0) break;
      Request req = q.waiting[size_t(w)];
      q.rr_pointer = (req.pe + 1) % topo_.total_pes();
      q.waiting[size_t(w)] = q.waiting.back();
      q.waiting.pop_back();
      if (req.cls == LatencyClass::GroupLocal) {
        req.ready = cycle_ + req_travel(topo_.base_latency(req.cls));
        enqueue_bank(req);
      } else {
        req.ready = cycle_ + 1;  // hop to the group boundary
        const uint32_t src = topo_.group_of_pe(req.pe);
        const uint32_t dst =
            topo_.group_of_bank(uint32_t(req.addr % topo_.total_banks()));
        const uint32_t link = src * topo_.groups() + dst;
        if (group_links_[link].waiting.empty()) busy_links_.push_back(link);
        group_links_[link].waiting.push_back(req);
      }
    }
    if (!q.waiting.empty()) busy_tiles_[out++] = tile;
  }
  busy_tiles_.resize(out);
}

void Engine::drain_group_links() {
  size_t out = 0;
  for (size_t i = 0; i < busy_links_.size(); ++i) {
    const uint32_t link = busy_links_[i];
    ArbQueue& q = group_links_[link];
    for (uint32_t granted = 0;
         granted < resolved_group_limit_ && !q.waiting.empty(); ++granted) {
      const int w = arbitrate(q);
      if (w < 0) break;
      Request req = q.waiting[size_t(w)];
      q.rr_pointer = (req.pe + 1) % topo_.total_pes();
      q.waiting[size_t(w)] = q.waiting.back();
      q.waiting.pop_back();
      const uint32_t base = topo_.base_latency(req.cls);
      req.ready = cycle_ + (req_travel(base) - 1);
      enqueue_bank(req);
    }
    if (!q.waiting.empty()) busy_links_[out++] = link;
  }
  busy_links_.resize(out);
}

void Engine::service_banks() {
  size_t out = 0;
  for (size_t i = 0; i < busy_banks_.size(); ++i) {
    const uint32_t bank = busy_banks_[i];
    ArbQueue& q = banks_[bank];
    if (cycle_ >= q.busy_until) {
      const int w = arbitrate(q);
      if (w >= 0) {
        Request req = q.waiting[size_t(w)];
        q.rr_pointer = (req.pe + 1) % topo_.total_pes();
        q.waiting[size_t(w)] = q.waiting.back();
        q.waiting.pop_back();
        uint32_t result = 0;
        switch (req.kind) {
          case OpKind::Load:
            result = mem_[req.addr];
            break;
          case OpKind::Store:
            mem_[req.addr] = req.operand;
            break;
          case OpKind::AmoAdd:
            result = mem_[req.addr];
            mem_[req.addr] = result + req.operand;
            ++amo_counts_[req.addr];
            q.busy_until = cycle_ + cfg_.amo_bank_occupancy;
            break;
          default:
            break;
        }
        PE& st = pes_[req.pe];
        st.response_value = result;
        schedule_resume(req.pe,
                        cycle_ + 1 + resp_travel(topo_.base_latency(req.cls)));
      }
    }
    if (!q.waiting.empty()) busy_banks_[out++] = bank;
  }
  busy_banks_.resize(out);
}

void Engine::resume_pe(uint32_t pe) {
  PE& st = pes_[pe];
  if (st.defer_front_sync)
    st.defer_front_sync = false;  // load flight may overlap compute
  else
    st.front = std::max(st.front, cycle_);
  st.status = PEStatus::Running;
  st.prog.advance(st.response_value);
  if (st.prog.done()) {
    st.status = PEStatus::Done;
    ++done_count_;
    trace_.total_cycles = std::max(trace_.total_cycles, std::max(st.front, cycle_));
    return;
  }
  execute_op(pe);
}

// Executes ops for `pe` starting from the program's current op, until the PE
// blocks on memory, sleeps, schedules a future resume, or finishes.
//
// st.front is the PE's logical timeline. It can lag cycle_ only after a
// non-blocking load resumed without syncing: compute and markers then
// backdate into the load's flight time, while memory issues, sleeps, and
// wakeup writes clamp to the present (nothing enters the machine in the
// past).
void Engine::execute_op(uint32_t pe) {
  PE& st = pes_[pe];
  while (true) {
    const PEOp& op = st.prog.op();
    switch (op.kind) {
      case OpKind::Event:
        trace_.events.push_back({st.front, pe, EventKind(op.a), op.b});
        break;  // zero cost; advance below
      case OpKind::Compute: {
        st.front += op.a;
        if (st.front > cycle_) {
          st.response_value = 0;
          schedule_resume(pe, st.front);
          return;
        }
        break;  // fully hidden under an in-flight load (or zero cycles)
      }
      case OpKind::Load:
      case OpKind::Store:
      case OpKind::AmoAdd: {
        const uint64_t at = std::max(st.front, cycle_);
        st.front = at + 1;
        st.status = PEStatus::Blocked;
        st.defer_front_sync = (op.kind == OpKind::Load && !cfg_.blocking_loads);
        issue_memory(pe, op, at);
        return;
      }
      case OpKind::Wfi: {
        const uint64_t at = std::max(st.front, cycle_);
        if (st.pending_wakeup) {
          st.pending_wakeup = false;
          st.front = at + 1;
          break;  // completes immediately
        }
        st.front = at;
        st.status = PEStatus::Sleeping;
        return;
      }
      case OpKind::WakeupWrite: {
        const uint64_t at = std::max(st.front, cycle_);
        wakeup_assert_set(topo_, op.a, op.b);  // validate register and width
        schedule_commit({op.a, op.b, pe}, at + resolved_wakeup_latency_);
        st.front = at + 1;
        break;  // posted write; continue next cycle
      }
    }
    st.prog.advance(st.response_value = 0);
    if (st.prog.done()) {
      st.status = PEStatus::Done;
      ++done_count_;
      trace_.total_cycles =
          std::max(trace_.total_cycles, std::max(st.front, cycle_));
      return;
    }
  }
}

bool Engine::quiescent() const {
  return wheel_.empty() && busy_banks_.empty() && busy_tiles_.empty() &&
         busy_links_.empty();
}

void Engine::process_cycle() {
  // Wakeup commits first so that a WFI executed this cycle observes them,
  // then program resumes, then interconnect and bank stages.
  resumes_scratch_.clear();
  while (!wheel_.empty() && wheel_.top().cycle == cycle_) {
    WheelEntry e = wheel_.top();
    wheel_.pop();
    if (e.pe == UINT32_MAX)
      apply_commit(pending_commits_[e.commit_ix]);
    else
      resumes_scratch_.push_back(e.pe);
  }
  for (uint32_t pe : resumes_scratch_) resume_pe(pe);
  drain_tile_ports();
  drain_group_links();
  service_banks();
}

void Engine::step() {
  started_ = true;
  process_cycle();
  ++cycle_;
}

uint64_t Engine::next_wheel_cycle() const {
  return wheel_.empty() ? UINT64_MAX : wheel_.top().cycle;
}

const Trace& Engine::run(uint64_t max_cycles) {
  if (submitted_count_ == 0)
    fail(Errc::EmptyInput, "no programs submitted");
  started_ = true;
  while (!all_done()) {
    if (quiescent())
      fail(Errc::Deadlock,
           "all remaining PEs sleep with no wakeup in flight at cycle " +
               std::to_string(cycle_));
    uint64_t next = cycle_;
    const bool stages_busy =
        !busy_banks_.empty() || !busy_tiles_.empty() || !busy_links_.empty();
    if (!stages_busy) next = std::max(cycle_, next_wheel_cycle());
    if (next > max_cycles)
      fail(Errc::CycleLimitExceeded,
           "exceeded " + std::to_string(max_cycles) + " cycles");
    cycle_ = next;
    process_cycle();
    ++cycle_;
  }
  return trace_;
}

}  // namespace tilesim
