#pragma once

#include <cassert>
#include <coroutine>
#include <cstdint>
#include <utility>
#include <vector>

namespace tilesim {

enum class OpKind : uint8_t {
  Compute,      // occupy the issue slot for `a` cycles
  Load,         // read word `a`, yields the loaded value
  Store,        // write value `b` to word `a`
  AmoAdd,       // fetch-and-add `b` to word `a`, yields the pre-update value
  Wfi,          // sleep until a wakeup assertion is consumed
  WakeupWrite,  // posted write of value `b` to wakeup register `a`
  Event,        // zero-cost trace marker
};

enum class EventKind : uint8_t {
  KernelStart = 0,
  KernelEnd = 1,
  BarrierEnter = 2,
  BarrierExit = 3,
  Custom = 4,
};

struct PEOp {
  OpKind kind = OpKind::Compute;
  uint32_t a = 0;  // cycles | word address | register index | event kind
  uint32_t b = 0;  // store value | amo delta | wakeup value | event id

  static PEOp compute(uint32_t cycles) { return {OpKind::Compute, cycles, 0}; }
  static PEOp load(uint32_t addr) { return {OpKind::Load, addr, 0}; }
  static PEOp store(uint32_t addr, uint32_t value) {
    return {OpKind::Store, addr, value};
  }
  static PEOp amo_add(uint32_t addr, uint32_t delta) {
    return {OpKind::AmoAdd, addr, delta};
  }
  static PEOp wfi() { return {OpKind::Wfi, 0, 0}; }
  static PEOp wakeup_write(uint32_t reg, uint32_t value) {
    return {OpKind::WakeupWrite, reg, value};
  }
  static PEOp event(EventKind k, uint32_t id = 0) {
    return {OpKind::Event, uint32_t(k), id};
  }

  bool is_memory() const {
    return kind == OpKind::Load || kind == OpKind::Store ||
           kind == OpKind::AmoAdd;
  }
};

// A PE program is a coroutine that yields PEOps and receives each op's
// response (loaded word / fetched counter value) as the value of the
// co_yield expression. Yielding another Program splices it in place, which
// is how workloads embed barrier fragments:
//
//   uint32_t v = co_yield PEOp::load(addr);
//   co_yield barrier_program(plan, pe);      // runs the whole fragment
//
// The driver (engine or a scripted test) calls start(), then repeatedly
// inspects op() and calls advance(response) until done().
class Program {
 public:
  struct promise_type;
  using Handle = std::coroutine_handle<promise_type>;

  struct promise_type {
    PEOp current{};
    uint32_t response = 0;
    Handle nested{};

    Program get_return_object() { return Program(Handle::from_promise(*this)); }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    void return_void() {}
    void unhandled_exception() { throw; }

    struct OpAwaiter {
      promise_type* p;
      bool await_ready() const noexcept { return false; }
      void await_suspend(std::coroutine_handle<>) const noexcept {}
      uint32_t await_resume() const noexcept { return p->response; }
    };
    OpAwaiter yield_value(PEOp op) {
      current = op;
      return {this};
    }

    struct SpliceAwaiter {
      bool await_ready() const noexcept { return false; }
      void await_suspend(std::coroutine_handle<>) const noexcept {}
      void await_resume() const noexcept {}
    };
    SpliceAwaiter yield_value(Program&& sub) {
      nested = sub.release();
      return {};
    }
  };

  Program() = default;
  explicit Program(Handle h) { frames_.push_back(h); }
  Program(Program&& other) noexcept
      : frames_(std::move(other.frames_)), started_(other.started_) {
    other.frames_.clear();
  }
  Program& operator=(Program&& other) noexcept {
    if (this != &other) {
      destroy();
      frames_ = std::move(other.frames_);
      started_ = other.started_;
      other.frames_.clear();
    }
    return *this;
  }
  Program(const Program&) = delete;
  Program& operator=(const Program&) = delete;
  ~Program() { destroy(); }

  bool valid() const { return started_ || !frames_.empty(); }
  bool done() const { return frames_.empty(); }

  // Run to the first yielded op (or completion).
  void start() {
    assert(!started_ && !frames_.empty());
    started_ = true;
    frames_.back().resume();
    settle();
  }

  const PEOp& op() const {
    assert(!done());
    return frames_.back().promise().current;
  }

  // Deliver the current op's response and run to the next op.
  void advance(uint32_t response) {
    assert(started_ && !done());
    frames_.back().promise().response = response;
    frames_.back().resume();
    settle();
  }

 private:
  // Pop finished frames (resuming their parents) and push spliced
  // sub-programs until the innermost frame is suspended at a PEOp or
  // everything has completed.
  void settle() {
    while (!frames_.empty()) {
      Handle h = frames_.back();
      if (h.done()) {
        h.destroy();
        frames_.pop_back();
        if (frames_.empty()) return;
        frames_.back().resume();
        continue;
      }
      if (h.promise().nested) {
        Handle child = std::exchange(h.promise().nested, Handle{});
        frames_.push_back(child);
        child.resume();
        continue;
      }
      return;
    }
  }

  Handle release() {
    assert(!started_ && frames_.size() == 1);
    Handle h = frames_.back();
    frames_.clear();
    return h;
  }

  void destroy() {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) it->destroy();
    frames_.clear();
  }

  std::vector<Handle> frames_;
  bool started_ = false;
};

}  // namespace tilesim
