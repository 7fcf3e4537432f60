#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "tilesim/barriers.hpp"
#include "tilesim/engine.hpp"
#include "tilesim/rng.hpp"
#include "tilesim/topology.hpp"

using namespace tilesim;

namespace {

std::vector<uint32_t> all_pes(const Topology& topo) {
  std::vector<uint32_t> ps(topo.total_pes());
  std::iota(ps.begin(), ps.end(), 0u);
  return ps;
}

std::vector<uint32_t> pe_range(uint32_t lo, uint32_t hi) {
  std::vector<uint32_t> ps(hi - lo);
  std::iota(ps.begin(), ps.end(), lo);
  return ps;
}

std::vector<uint32_t> step_sizes(const BarrierPlan& plan) {
  std::vector<uint32_t> out;
  for (const auto& s : plan.steps) out.push_back(s.group_size);
  return out;
}

std::vector<size_t> counters_per_step(const BarrierPlan& plan) {
  std::vector<size_t> out;
  for (const auto& s : plan.steps) out.push_back(s.counters.size());
  return out;
}

std::vector<uint32_t> all_counters(const BarrierPlan& plan) {
  std::vector<uint32_t> out;
  for (const auto& s : plan.steps) {
    out.insert(out.end(), s.counters.begin(), s.counters.end());
  }
  return out;
}

// Enter/exit envelope of one barrier instance in a trace.
struct InstanceStats {
  uint64_t max_enter = 0;
  uint64_t min_exit = UINT64_MAX;
  size_t enters = 0;
  size_t exits = 0;
};

InstanceStats stats_for(const Trace& tr, uint32_t id) {
  InstanceStats st;
  for (const auto& ev : tr.events) {
    if (ev.id != id) continue;
    if (ev.kind == EventKind::BarrierEnter) {
      st.max_enter = std::max(st.max_enter, ev.cycle);
      ++st.enters;
    } else if (ev.kind == EventKind::BarrierExit) {
      st.min_exit = std::min(st.min_exit, ev.cycle);
      ++st.exits;
    }
  }
  return st;
}

Program delayed_barrier(const BarrierPlan* plan, uint32_t pe, uint32_t delay,
                        uint32_t instance_id) {
  if (delay > 0) co_yield PEOp::compute(delay);
  co_yield barrier_program(*plan, pe, instance_id);
}

Program two_barriers(const BarrierPlan* plan, uint32_t pe, uint32_t d1,
                     uint32_t d2) {
  if (d1 > 0) co_yield PEOp::compute(d1);
  co_yield barrier_program(*plan, pe, 1);
  if (d2 > 0) co_yield PEOp::compute(d2);
  co_yield barrier_program(*plan, pe, 2);
}

}  // namespace

TEST_CASE("arrival trees put the residual step first") {
  Topology topo = build_topology({});
  const auto ps = all_pes(topo);

  CounterArena arena(topo);
  SUBCASE("1024 PEs at radix 8 need a half-width leading step") {
    BarrierPlan plan = plan_tree(topo, ps, 8, arena, 7);
    CHECK(plan.id == 7);
    CHECK(step_sizes(plan) == std::vector<uint32_t>{2, 8, 8, 8});
    CHECK(counters_per_step(plan) == std::vector<size_t>{512, 64, 8, 1});
    CHECK(plan.has_wakeup);
    CHECK(plan.wakeup.reg == kCoreWakeupReg);
    CHECK(plan.wakeup.value == UINT32_MAX);
  }
  SUBCASE("1024 PEs at radix 32 is an exact two-level tree") {
    BarrierPlan plan = plan_tree(topo, ps, 32, arena);
    CHECK(step_sizes(plan) == std::vector<uint32_t>{32, 32});
    CHECK(counters_per_step(plan) == std::vector<size_t>{32, 1});
  }
  SUBCASE("radix 2 gives the deepest tree") {
    BarrierPlan plan = plan_tree(topo, ps, 2, arena);
    CHECK(plan.steps.size() == 10);
    CHECK(step_sizes(plan) ==
          std::vector<uint32_t>(10, 2));
    std::vector<size_t> want;
    for (uint32_t s = 0; s < 10; ++s) want.push_back(512u >> s);
    CHECK(counters_per_step(plan) == want);
  }
  SUBCASE("radix == participant count degenerates to one shared counter") {
    BarrierPlan plan = plan_tree(topo, ps, 1024, arena);
    CHECK(step_sizes(plan) == std::vector<uint32_t>{1024});
    CHECK(counters_per_step(plan) == std::vector<size_t>{1});
  }
  SUBCASE("256 PEs at radix 32 leads with groups of 8") {
    BarrierPlan plan = plan_tree(topo, pe_range(0, 256), 32, arena);
    CHECK(step_sizes(plan) == std::vector<uint32_t>{8, 32});
    CHECK(counters_per_step(plan) == std::vector<size_t>{32, 1});
    CHECK(plan.wakeup.reg == kGroupWakeupReg);
    CHECK(plan.wakeup.value == 0x3u);
  }
}

TEST_CASE("every counter word is unique and lives in the top memory rows") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  BarrierPlan a = plan_tree(topo, all_pes(topo), 8, arena);
  BarrierPlan b = plan_tree(topo, all_pes(topo), 2, arena);

  std::vector<uint32_t> words = all_counters(a);
  const auto more = all_counters(b);
  words.insert(words.end(), more.begin(), more.end());

  std::set<uint32_t> distinct(words.begin(), words.end());
  CHECK(distinct.size() == words.size());

  // 585 + 1023 counters fit in one layer of the 4096 banks, so every word
  // sits in the top row and no two share a bank.
  std::set<uint32_t> banks;
  for (uint32_t w : words) {
    const BankSlot slot = topo.bank_of(MappingMode::Interleaved, w);
    CHECK(slot.row == topo.words_per_bank() - 1);
    banks.insert(slot.bank);
  }
  CHECK(banks.size() == words.size());
  CHECK(arena.low_row() == topo.words_per_bank() - 1);
}

TEST_CASE("the counter arena walks tiles before reusing one") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  std::vector<uint32_t> first;
  for (uint32_t i = 0; i < topo.total_tiles() + 1; ++i) {
    first.push_back(arena.alloc());
  }
  for (uint32_t i = 0; i < topo.total_tiles(); ++i) {
    const BankSlot slot = topo.bank_of(MappingMode::Interleaved, first[i]);
    CHECK(topo.tile_of_bank(slot.bank) == i);
  }
  // Allocation total_tiles lands back on tile 0, one bank over.
  const BankSlot wrap =
      topo.bank_of(MappingMode::Interleaved, first[topo.total_tiles()]);
  CHECK(topo.tile_of_bank(wrap.bank) == 0);
  CHECK(wrap.bank == 1);
  CHECK(arena.allocated() == topo.total_tiles() + 1);
}

TEST_CASE("the counter arena refuses to overrun memory") {
  Topology topo = build_topology({1, 1, 2, 1, 1});  // 2 banks, 1 word each
  CounterArena arena(topo);
  CHECK(arena.low_row() == 1);
  arena.alloc();
  arena.alloc();
  CHECK(arena.low_row() == 0);
  CHECK_THROWS_AS(arena.alloc(), SimError);
  try {
    arena.alloc();
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::OutOfRange);
  }
}

TEST_CASE("wakeup actions cover exactly the aligned participant shapes") {
  Topology topo = build_topology({});

  SUBCASE("the whole cluster uses the broadcast pattern") {
    const WakeupAction a = wakeup_for(topo, all_pes(topo));
    CHECK(a.reg == kCoreWakeupReg);
    CHECK(a.value == UINT32_MAX);
  }
  SUBCASE("a single PE is addressed by id") {
    const WakeupAction a = wakeup_for(topo, {5});
    CHECK(a.reg == kCoreWakeupReg);
    CHECK(a.value == 5);
  }
  SUBCASE("whole groups become a group mask") {
    const WakeupAction a = wakeup_for(topo, pe_range(512, 768));
    CHECK(a.reg == kGroupWakeupReg);
    CHECK(a.value == 0x30u);
  }
  SUBCASE("whole tiles of one group become a tile mask") {
    std::vector<uint32_t> ps = pe_range(0, 8);
    const auto t2 = pe_range(16, 24);
    ps.insert(ps.end(), t2.begin(), t2.end());
    const WakeupAction a = wakeup_for(topo, ps);
    CHECK(a.reg == tile_wakeup_reg(0));
    CHECK(a.value == 0x5u);
  }
  SUBCASE("ragged subsets are rejected") {
    CHECK_THROWS_AS(wakeup_for(topo, {0, 9}), SimError);
    try {
      wakeup_for(topo, {0, 9});
    } catch (const SimError& e) {
      CHECK(e.code() == Errc::UnalignedSubset);
    }
  }
  SUBCASE("tiles straddling two groups are rejected") {
    std::vector<uint32_t> ps = pe_range(0, 8);
    const auto other = pe_range(128, 136);
    ps.insert(ps.end(), other.begin(), other.end());
    CHECK_THROWS_AS(wakeup_for(topo, ps), SimError);
  }

  SUBCASE("assert sets mirror the actions") {
    CHECK(wakeup_assert_set(topo, kCoreWakeupReg, 5) ==
          std::vector<uint32_t>{5});
    CHECK(wakeup_assert_set(topo, kCoreWakeupReg, UINT32_MAX).size() == 1024);
    CHECK(wakeup_assert_set(topo, kGroupWakeupReg, 0x30u) ==
          pe_range(512, 768));
    CHECK(wakeup_assert_set(topo, tile_wakeup_reg(1), 0x1u) ==
          pe_range(128, 136));
  }
}

TEST_CASE("plan construction rejects malformed inputs") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  const auto ps = all_pes(topo);

  auto code_of = [&](auto&& fn) {
    try {
      fn();
    } catch (const SimError& e) {
      return e.code();
    }
    return Errc::ConfigParse;  // sentinel: "did not throw"
  };

  CHECK(code_of([&] { plan_tree(topo, {}, 2, arena); }) == Errc::ZeroCount);
  CHECK(code_of([&] { plan_tree(topo, {0, 1, 2}, 2, arena); }) ==
        Errc::NonPowerOfTwoParticipants);
  CHECK(code_of([&] { plan_tree(topo, ps, 3, arena); }) == Errc::InvalidRadix);
  CHECK(code_of([&] { plan_tree(topo, ps, 1, arena); }) == Errc::InvalidRadix);
  CHECK(code_of([&] { plan_tree(topo, ps, 2048, arena); }) ==
        Errc::InvalidRadix);
  CHECK(code_of([&] { plan_tree(topo, {0, 5000}, 2, arena); }) ==
        Errc::OutOfRange);
  CHECK(code_of([&] { plan_tree(topo, {7, 7}, 2, arena); }) ==
        Errc::OutOfRange);
  CHECK(code_of([&] { plan_tree(topo, {0, 9}, 2, arena); }) ==
        Errc::UnalignedSubset);
  CHECK(code_of([&] {
          plan_partial(topo, {0, 1, 8, 9, 16, 17, 24, 25}, 2, arena);
        }) == Errc::UnalignedSubset);

  BarrierPlan plan = plan_tree(topo, pe_range(0, 8), 2, arena);
  CHECK(plan.rank_of(5) == 5);
  CHECK(code_of([&] { plan.rank_of(8); }) == Errc::PENotInPlan);
}

TEST_CASE("a single-participant plan is markers only") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  BarrierPlan plan = plan_tree(topo, {3}, 2, arena, 9);
  CHECK(plan.steps.empty());
  CHECK_FALSE(plan.has_wakeup);
  CHECK(arena.allocated() == 0);

  Engine eng(topo);
  eng.submit(3, barrier_program(plan, 3));
  eng.run();
  const auto st = stats_for(eng.trace(), 9);
  CHECK(st.enters == 1);
  CHECK(st.exits == 1);
  CHECK(eng.trace().wakeups.empty());
}

TEST_CASE("a two-PE cluster meets at the barrier and leaves together") {
  Topology topo = build_topology({1, 1, 2, 4, 256});
  CounterArena arena(topo);
  BarrierPlan plan = plan_tree(topo, {0, 1}, 2, arena, 42);

  Engine eng(topo);
  eng.submit(0, delayed_barrier(&plan, 0, 0, 42));
  eng.submit(1, delayed_barrier(&plan, 1, 50, 42));
  eng.run();

  const auto st = stats_for(eng.trace(), 42);
  CHECK(st.enters == 2);
  CHECK(st.exits == 2);
  CHECK(st.max_enter <= st.min_exit);
  CHECK(st.min_exit >= 50);

  REQUIRE(eng.trace().wakeups.size() == 1);
  CHECK(eng.trace().wakeups[0].writer == 1);  // the late arriver survives
  CHECK(eng.trace().wakeups[0].reg == kCoreWakeupReg);
  CHECK(eng.trace().wakeups[0].value == UINT32_MAX);
  for (uint32_t w : all_counters(plan)) CHECK(eng.peek(w) == 0);
}

TEST_CASE("a full-cluster barrier releases nobody early") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  BarrierPlan plan = plan_tree(topo, all_pes(topo), 8, arena, 5);

  Engine eng(topo);
  SplitMix64 rng(2024);
  for (uint32_t pe = 0; pe < topo.total_pes(); ++pe) {
    eng.submit(pe, delayed_barrier(&plan, pe, rng.below(100), 5));
  }
  eng.run();

  const auto st = stats_for(eng.trace(), 5);
  CHECK(st.enters == 1024);
  CHECK(st.exits == 1024);
  CHECK(st.max_enter <= st.min_exit);
  REQUIRE(eng.trace().wakeups.size() == 1);
  CHECK(eng.trace().wakeups[0].value == UINT32_MAX);
  for (uint32_t w : all_counters(plan)) CHECK(eng.peek(w) == 0);
}

TEST_CASE("a partial barrier wakes only its own groups") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  const auto ps = pe_range(512, 768);
  BarrierPlan plan = plan_partial(topo, ps, 16, arena, 6);

  Engine eng(topo);
  SplitMix64 rng(7);
  for (uint32_t pe : ps) {
    eng.submit(pe, delayed_barrier(&plan, pe, rng.below(64), 6));
  }
  eng.run();

  const auto st = stats_for(eng.trace(), 6);
  CHECK(st.enters == 256);
  CHECK(st.exits == 256);
  CHECK(st.max_enter <= st.min_exit);
  REQUIRE(eng.trace().wakeups.size() == 1);
  CHECK(eng.trace().wakeups[0].reg == kGroupWakeupReg);
  CHECK(eng.trace().wakeups[0].value == 0x30u);
  for (uint32_t w : all_counters(plan)) CHECK(eng.peek(w) == 0);
}

TEST_CASE("re-armed counters survive back-to-back instances") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  const auto ps = pe_range(0, 128);  // group 0
  BarrierPlan plan = plan_partial(topo, ps, 4, arena);

  Engine eng(topo);
  SplitMix64 rng(99);
  for (uint32_t pe : ps) {
    eng.submit(pe, two_barriers(&plan, pe, rng.below(40), rng.below(40)));
  }
  eng.run();

  const auto first = stats_for(eng.trace(), 1);
  const auto second = stats_for(eng.trace(), 2);
  CHECK(first.enters == 128);
  CHECK(first.exits == 128);
  CHECK(second.enters == 128);
  CHECK(second.exits == 128);
  CHECK(first.max_enter <= first.min_exit);
  CHECK(second.max_enter <= second.min_exit);
  // Program order: nobody re-enters before leaving the first instance.
  CHECK(first.min_exit <= second.max_enter);
  CHECK(eng.trace().wakeups.size() == 2);
  for (uint32_t w : all_counters(plan)) CHECK(eng.peek(w) == 0);
}

TEST_CASE("strided leaf placement still forms a correct barrier") {
  Topology topo = build_topology({});
  CounterArena arena(topo);
  BarrierPlan plan =
      plan_tree(topo, all_pes(topo), 8, arena, 3, LeafOrder::Strided);
  CHECK(plan.order == LeafOrder::Strided);
  CHECK(step_sizes(plan) == std::vector<uint32_t>{2, 8, 8, 8});

  Engine eng(topo);
  SplitMix64 rng(11);
  for (uint32_t pe = 0; pe < topo.total_pes(); ++pe) {
    eng.submit(pe, delayed_barrier(&plan, pe, rng.below(100), 3));
  }
  eng.run();

  const auto st = stats_for(eng.trace(), 3);
  CHECK(st.enters == 1024);
  CHECK(st.exits == 1024);
  CHECK(st.max_enter <= st.min_exit);
  for (uint32_t w : all_counters(plan)) CHECK(eng.peek(w) == 0);
}
