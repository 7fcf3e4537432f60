#pragma once

#include <cstdint>
#include <vector>

#include "tilesim/program.hpp"
#include "tilesim/topology.hpp"

namespace tilesim {

struct WakeupAction {
  uint32_t reg = 0;
  uint32_t value = 0;
};

// One level of the arrival tree: incoming PEs are partitioned into
// synchronization groups of `group_size`, one shared counter word each.
struct BarrierStep {
  uint32_t group_size = 0;
  std::vector<uint32_t> counters;  // word address per group
};

// How leaf ranks map onto step-0 groups.
enum class LeafOrder : uint8_t { Contiguous = 0, Strided = 1 };

struct BarrierPlan {
  uint32_t id = 0;
  std::vector<uint32_t> participants;  // ascending, power-of-two count
  std::vector<BarrierStep> steps;      // steps[0] may be the residual step
  WakeupAction wakeup{};
  bool has_wakeup = false;  // false only for single-participant plans
  LeafOrder order = LeafOrder::Contiguous;

  uint32_t rank_of(uint32_t pe) const;  // PENotInPlan if absent
};

// Hands out counter words from the top rows of memory, round-robin over
// tiles and then over a tile's banks, so concurrent counters never share a
// bank until every bank holds one.
class CounterArena {
 public:
  explicit CounterArena(const Topology& topo);
  uint32_t alloc();
  uint32_t allocated() const { return next_; }
  // Lowest memory row touched so far; data slabs must stay below it.
  uint32_t low_row() const;

 private:
  const Topology* topo_;
  uint32_t next_ = 0;
};

// Wakeup action covering exactly `participants`: the all-PE core pattern, a
// single PE id, a group bitmask, or a tile bitmask within one group.
// Anything else is UnalignedSubset.
WakeupAction wakeup_for(const Topology& topo,
                        const std::vector<uint32_t>& participants);

// The asserted PE set of a register write (also used by the engine).
std::vector<uint32_t> wakeup_assert_set(const Topology& topo, uint32_t reg,
                                        uint32_t value);

// Builds a radix-k arrival tree over the participants. The step count is
// ceil(log_k N); when that is not exact the smaller residual step runs
// first, so every later step is a full radix-k merge.
BarrierPlan plan_tree(const Topology& topo, std::vector<uint32_t> participants,
                      uint32_t radix, CounterArena& arena, uint32_t id = 0,
                      LeafOrder order = LeafOrder::Contiguous);

// Same, for a tile- or group-aligned subset of the cluster.
BarrierPlan plan_partial(const Topology& topo,
                         std::vector<uint32_t> participants, uint32_t radix,
                         CounterArena& arena, uint32_t id = 0);

// Per-PE fragment: enter marker, one fetch-and-add per survived step (the
// last arriver of a group resets the counter and advances; everyone else
// sleeps), the final survivor's wakeup write, exit marker. `instance_id`
// labels the enter/exit markers so one plan can be reused for many barrier
// instances.
Program barrier_program(const BarrierPlan& plan, uint32_t pe);
Program barrier_program(const BarrierPlan& plan, uint32_t pe,
                        uint32_t instance_id);

}  // namespace tilesim
