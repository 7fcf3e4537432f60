#include "tilesim/barriers.hpp"

#include <algorithm>

#include "tilesim/engine.hpp"
#include "tilesim/errors.hpp"

namespace tilesim {

uint32_t BarrierPlan::rank_of(uint32_t pe) const {
  auto it = std::lower_bound(participants.begin(), participants.end(), pe);
  if (it == participants.end() || *it != pe) {
    fail(Errc::PENotInPlan,
         "PE " + std::to_string(pe) + " is not in barrier plan " +
             std::to_string(id));
  }
  return static_cast<uint32_t>(it - participants.begin());
}

CounterArena::CounterArena(const Topology& topo) : topo_(&topo) {}

uint32_t CounterArena::alloc() {
  const uint32_t tiles = topo_->total_tiles();
  const uint32_t bpt = topo_->banks_per_tile();
  const uint32_t j = next_;
  const uint32_t tile = j % tiles;
  const uint32_t bank = tile * bpt + (j / tiles) % bpt;
  const uint32_t layer = j / (tiles * bpt);
  if (layer >= topo_->config().words_per_bank) {
    fail(Errc::OutOfRange, "counter arena exhausted memory rows");
  }
  const uint32_t row = topo_->config().words_per_bank - 1 - layer;
  ++next_;
  return row * topo_->total_banks() + bank;
}

uint32_t CounterArena::low_row() const {
  const uint32_t wpb = topo_->config().words_per_bank;
  if (next_ == 0) return wpb;
  const uint32_t layers = (next_ + topo_->total_banks() - 1) / topo_->total_banks();
  return wpb - layers;
}

std::vector<uint32_t> wakeup_assert_set(const Topology& topo, uint32_t reg,
                                        uint32_t value) {
  const uint32_t n_pes = topo.total_pes();
  std::vector<uint32_t> out;
  if (reg == kCoreWakeupReg) {
    if (value == UINT32_MAX) {
      out.resize(n_pes);
      for (uint32_t p = 0; p < n_pes; ++p) out[p] = p;
    } else if (value < n_pes) {
      out.push_back(value);
    } else {
      fail(Errc::ValueOutOfWidth,
           "core wakeup value " + std::to_string(value) +
               " is neither a PE id nor the all-ones pattern");
    }
  } else if (reg == kGroupWakeupReg) {
    const uint32_t groups = topo.config().groups;
    if (groups < 32 && value >= (1u << groups)) {
      fail(Errc::ValueOutOfWidth, "group wakeup mask wider than group count");
    }
    const uint32_t ppg = topo.pes_per_group();
    for (uint32_t g = 0; g < groups; ++g) {
      if (value & (1u << g)) {
        for (uint32_t p = g * ppg; p < (g + 1) * ppg; ++p) out.push_back(p);
      }
    }
  } else {
    const uint32_t groups = topo.config().groups;
    if (reg < 2 || reg >= 2 + groups) {
      fail(Errc::InvalidRegister, "unknown wakeup register " + std::to_string(reg));
    }
    const uint32_t g = reg - 2;
    const uint32_t tpg = topo.config().tiles_per_group;
    if (tpg < 32 && value >= (1u << tpg)) {
      fail(Errc::ValueOutOfWidth, "tile wakeup mask wider than tile count");
    }
    const uint32_t ppt = topo.config().pes_per_tile;
    for (uint32_t t = 0; t < tpg; ++t) {
      if (value & (1u << t)) {
        const uint32_t tile = g * tpg + t;
        for (uint32_t p = tile * ppt; p < (tile + 1) * ppt; ++p) {
          out.push_back(p);
        }
      }
    }
  }
  return out;
}

WakeupAction wakeup_for(const Topology& topo,
                        const std::vector<uint32_t>& ps) {
  if (ps.size() == topo.total_pes()) {
    return {kCoreWakeupReg, UINT32_MAX};
  }
  if (ps.size() == 1) {
    return {kCoreWakeupReg, ps[0]};
  }
  const uint32_t ppg = topo.pes_per_group();
  if (ps.size() % ppg == 0 && ps[0] % ppg == 0) {
    bool whole_groups = true;
    uint32_t mask = 0;
    for (size_t i = 0; i < ps.size() && whole_groups; i += ppg) {
      const uint32_t g = ps[i] / ppg;
      for (uint32_t j = 0; j < ppg; ++j) {
        if (ps[i + j] != g * ppg + j) {
          whole_groups = false;
          break;
        }
      }
      mask |= 1u << g;
    }
    if (whole_groups) return {kGroupWakeupReg, mask};
  }
  const uint32_t ppt = topo.config().pes_per_tile;
  if (ps.size() % ppt == 0 && ps[0] % ppt == 0) {
    const uint32_t g = topo.group_of_pe(ps[0]);
    bool whole_tiles = (topo.group_of_pe(ps.back()) == g);
    uint32_t mask = 0;
    for (size_t i = 0; i < ps.size() && whole_tiles; i += ppt) {
      const uint32_t tile = ps[i] / ppt;
      for (uint32_t j = 0; j < ppt; ++j) {
        if (ps[i + j] != tile * ppt + j) {
          whole_tiles = false;
          break;
        }
      }
      mask |= 1u << (tile % topo.config().tiles_per_group);
    }
    if (whole_tiles) return {tile_wakeup_reg(g), mask};
  }
  fail(Errc::UnalignedSubset,
       "participant set is not the full cluster, a single PE, whole groups, "
       "or whole tiles of one group");
}

namespace {

void validate_participants(const Topology& topo,
                           const std::vector<uint32_t>& ps) {
  if (ps.empty()) fail(Errc::ZeroCount, "barrier needs at least one PE");
  if (!is_power_of_two(ps.size())) {
    fail(Errc::NonPowerOfTwoParticipants,
         "participant count " + std::to_string(ps.size()) +
             " is not a power of two");
  }
  for (size_t i = 0; i < ps.size(); ++i) {
    if (ps[i] >= topo.total_pes()) {
      fail(Errc::OutOfRange, "participant PE " + std::to_string(ps[i]) +
                                 " outside the cluster");
    }
    if (i > 0 && ps[i] <= ps[i - 1]) {
      fail(Errc::OutOfRange, "participants must be strictly ascending");
    }
  }
}

}  // namespace

BarrierPlan plan_tree(const Topology& topo, std::vector<uint32_t> participants,
                      uint32_t radix, CounterArena& arena, uint32_t id,
                      LeafOrder order) {
  std::sort(participants.begin(), participants.end());
  validate_participants(topo, participants);
  const uint64_t n = participants.size();

  BarrierPlan plan;
  plan.id = id;
  plan.order = order;
  plan.participants = std::move(participants);

  if (n == 1) {
    plan.has_wakeup = false;
    return plan;  // markers only; nothing to merge, nobody to wake
  }
  if (radix < 2 || !is_power_of_two(radix) || radix > n) {
    fail(Errc::InvalidRadix, "radix " + std::to_string(radix) +
                                 " must be a power of two in [2, " +
                                 std::to_string(n) + "]");
  }

  // ceil(log_radix n), exact because both are powers of two.
  uint32_t depth = 0;
  uint64_t reach = 1;
  while (reach < n) {
    reach *= radix;
    ++depth;
  }
  // Sizes per step, residual first: n / radix^(depth-1), then radix each.
  uint64_t survivors = n;
  for (uint32_t s = 0; s < depth; ++s) {
    uint64_t full_rest = 1;
    for (uint32_t t = s + 1; t < depth; ++t) full_rest *= radix;
    const uint64_t size = (s == 0) ? survivors / full_rest : radix;
    BarrierStep step;
    step.group_size = static_cast<uint32_t>(size);
    const uint64_t n_groups = survivors / size;
    step.counters.reserve(n_groups);
    for (uint64_t g = 0; g < n_groups; ++g) step.counters.push_back(arena.alloc());
    survivors = n_groups;
    plan.steps.push_back(std::move(step));
  }

  plan.wakeup = wakeup_for(topo, plan.participants);
  plan.has_wakeup = true;
  return plan;
}

BarrierPlan plan_partial(const Topology& topo,
                         std::vector<uint32_t> participants, uint32_t radix,
                         CounterArena& arena, uint32_t id) {
  std::sort(participants.begin(), participants.end());
  validate_participants(topo, participants);
  wakeup_for(topo, participants);  // reject unexpressible subsets up front
  return plan_tree(topo, std::move(participants), radix, arena, id);
}

namespace {

Program barrier_fragment(const BarrierPlan* plan, uint32_t rank,
                         uint32_t instance_id) {
  co_yield PEOp::event(EventKind::BarrierEnter, instance_id);
  bool survivor = true;
  uint32_t idx = rank;  // index among the PEs entering the current step
  for (size_t s = 0; s < plan->steps.size(); ++s) {
    const BarrierStep& step = plan->steps[s];
    const uint32_t n_groups = static_cast<uint32_t>(step.counters.size());
    uint32_t grp;
    if (s == 0 && plan->order == LeafOrder::Strided) {
      grp = idx % n_groups;
    } else {
      grp = idx / step.group_size;
    }
    const uint32_t old = co_yield PEOp::amo_add(step.counters[grp], 1);
    if (old == step.group_size - 1) {
      // Last arriver: re-arm the counter for the next use and move up.
      co_yield PEOp::store(step.counters[grp], 0);
      idx = grp;
    } else {
      co_yield PEOp::wfi();
      survivor = false;
      break;
    }
  }
  if (survivor && plan->has_wakeup) {
    co_yield PEOp::wakeup_write(plan->wakeup.reg, plan->wakeup.value);
    co_yield PEOp::wfi();  // the write covers this PE too; leave with the pack
  }
  co_yield PEOp::event(EventKind::BarrierExit, instance_id);
}

}  // namespace

Program barrier_program(const BarrierPlan& plan, uint32_t pe) {
  return barrier_fragment(&plan, plan.rank_of(pe), plan.id);
}

Program barrier_program(const BarrierPlan& plan, uint32_t pe,
                        uint32_t instance_id) {
  return barrier_fragment(&plan, plan.rank_of(pe), instance_id);
}

}  // namespace tilesim
