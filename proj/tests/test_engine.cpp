#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <vector>

#include "tilesim/engine.hpp"
#include "tilesim/topology.hpp"
#include "tilesim/workloads.hpp"

using namespace tilesim;

namespace {

Program one_load(uint32_t addr) {
  co_yield PEOp::load(addr);
}

Program one_compute(uint32_t cycles) {
  co_yield PEOp::compute(cycles);
}

Program amo_then_record(uint32_t counter, uint32_t result_addr) {
  const uint32_t old = co_yield PEOp::amo_add(counter, 1);
  co_yield PEOp::store(result_addr, old);
}

Program sleep_forever() {
  co_yield PEOp::wfi();
}

Program load_then_compute(uint32_t addr, uint32_t cycles) {
  co_yield PEOp::load(addr);
  co_yield PEOp::compute(cycles);
}

}  // namespace

TEST_CASE("uncontended load round trips take exactly 1/3/5 cycles") {
  Topology topo = build_topology({});
  // PE 0: bank 0 is tile-local, bank 33 group-local, bank 512 remote.
  const struct {
    uint32_t bank;
    uint64_t want;
  } cases[] = {{0, 1}, {33, 3}, {512, 5}};
  for (const auto& c : cases) {
    Engine eng(topo);
    // Word addresses are bank-interleaved, so word == bank hits row 0.
    eng.submit(0, one_load(c.bank));
    eng.run();
    CHECK(eng.trace().total_cycles == c.want);
    CHECK(eng.load_count(0, topo.locality(0, c.bank)) == 1);
  }
}

TEST_CASE("compute occupies the pipe for its full budget") {
  Topology topo = build_topology({});
  Engine eng(topo);
  eng.submit(0, one_compute(10));
  eng.run();
  CHECK(eng.trace().total_cycles == 10);
}

TEST_CASE("same-cycle fetch-adds serialize into consecutive services") {
  Topology topo = build_topology({});
  Engine eng(topo);
  const uint32_t counter = 0;  // bank 0, tile-local to PEs 0..7
  // Each PE records its fetched value into its own bank of the tile (the
  // uncontended store adds the same constant to every completion time).
  for (uint32_t pe = 0; pe < 8; ++pe) {
    eng.submit(pe, amo_then_record(counter, 4096 + 1 + pe));
  }
  std::vector<uint64_t> done_at(8, 0);
  while (!eng.all_done()) {
    eng.step();
    for (uint32_t pe = 0; pe < 8; ++pe) {
      if (done_at[pe] == 0 && eng.status(pe) == PEStatus::Done) {
        done_at[pe] = eng.cycle();
      }
    }
  }
  CHECK(eng.peek(counter) == 8);
  CHECK(eng.amo_count(counter) == 8);
  std::vector<uint32_t> got;
  for (uint32_t pe = 0; pe < 8; ++pe) got.push_back(eng.peek(4096 + 1 + pe));
  std::sort(got.begin(), got.end());
  for (uint32_t i = 0; i < 8; ++i) CHECK(got[i] == i);  // a permutation of 0..7
  // Single-port bank, one fetch-add service per cycle: the eight
  // completions land on eight consecutive cycles.
  std::sort(done_at.begin(), done_at.end());
  for (uint32_t i = 1; i < 8; ++i) CHECK(done_at[i] == done_at[0] + i);
  CHECK(eng.cycle() == done_at.back());
}

TEST_CASE("sleeping with no wakeup in flight is a deadlock") {
  Topology topo = build_topology({});
  Engine eng(topo);
  eng.submit(0, sleep_forever());
  CHECK_THROWS_AS(eng.run(), SimError);
}

TEST_CASE("cycle cap raises instead of spinning") {
  Topology topo = build_topology({});
  Engine eng(topo);
  eng.submit(0, one_compute(1000));
  try {
    eng.run(10);
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::CycleLimitExceeded);
  }
}

TEST_CASE("host wakeup releases a sleeper") {
  Topology topo = build_topology({});
  Engine eng(topo);
  eng.submit(0, sleep_forever());
  eng.step();
  CHECK(eng.status(0) == PEStatus::Sleeping);
  const std::vector<uint32_t> woken = eng.write_wakeup(kCoreWakeupReg, 0);
  CHECK(woken == std::vector<uint32_t>{0});
  eng.run();
  CHECK(eng.status(0) == PEStatus::Done);
}

TEST_CASE("an assertion before the WFI is sticky, never lost") {
  Topology topo = build_topology({});
  Engine eng(topo);
  eng.submit(0, []() -> Program {
    co_yield PEOp::compute(5);
    co_yield PEOp::wfi();  // flag already pending: completes immediately
  }());
  eng.step();
  eng.write_wakeup(kCoreWakeupReg, 0);  // PE 0 still computing
  eng.run();  // would deadlock if the early assertion were lost
  CHECK(eng.status(0) == PEStatus::Done);
  CHECK(eng.trace().total_cycles == 6);  // 5 compute + the satisfied WFI
}

TEST_CASE("wakeup register writes validate register and width") {
  Topology topo = build_topology({});
  Engine eng(topo);
  try {
    eng.write_wakeup(kCoreWakeupReg, 5000);  // neither all-ones nor a PE id
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::ValueOutOfWidth);
  }
  try {
    eng.write_wakeup(kGroupWakeupReg, 1u << 8);  // only 8 groups
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::ValueOutOfWidth);
  }
  try {
    eng.write_wakeup(tile_wakeup_reg(8), 1);  // groups are 0..7
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::InvalidRegister);
  }
  // All-ones is the broadcast encoding and always legal.
  const std::vector<uint32_t> all = eng.write_wakeup(kCoreWakeupReg, UINT32_MAX);
  CHECK(all.size() == topo.total_pes());
}

TEST_CASE("double submission is rejected") {
  Topology topo = build_topology({});
  Engine eng(topo);
  eng.submit(0, one_compute(1));
  try {
    eng.submit(0, one_compute(1));
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::DuplicateProgram);
  }
}

TEST_CASE("poke and peek reach every word") {
  Topology topo = build_topology({});
  Engine eng(topo);
  eng.poke(0, 42);
  eng.poke(topo.total_words() - 1, 7);
  CHECK(eng.peek(0) == 42);
  CHECK(eng.peek(topo.total_words() - 1) == 7);
  CHECK_THROWS_AS(eng.poke(topo.total_words(), 1), SimError);
}

TEST_CASE("blocking loads stall compute; non-blocking overlap hides latency") {
  Topology topo = build_topology({});
  {
    Engine eng(topo);  // default: blocking
    eng.submit(0, load_then_compute(512, 3));  // remote: 5 cycles
    eng.run();
    CHECK(eng.trace().total_cycles == 8);  // 5 + 3, strictly serial
  }
  {
    EngineConfig cfg;
    cfg.blocking_loads = false;
    Engine eng(topo, cfg);
    eng.submit(0, load_then_compute(512, 3));
    eng.run();
    CHECK(eng.trace().total_cycles == 5);  // compute hides inside the load flight
  }
}

TEST_CASE("runs are deterministic: identical traces and memory") {
  Workload w1 = random_delay_workload(DelaySpec{0, 2048, 9}, 8);
  Workload w2 = random_delay_workload(DelaySpec{0, 2048, 9}, 8);
  Topology topo = build_topology({});
  Engine a(topo), b(topo);
  w1.instantiate(a);
  w2.instantiate(b);
  a.run();
  b.run();
  CHECK(a.trace().total_cycles == b.trace().total_cycles);
  REQUIRE(a.trace().events.size() == b.trace().events.size());
  CHECK(a.trace().events == b.trace().events);
  CHECK(a.trace().wakeups.size() == b.trace().wakeups.size());
}
