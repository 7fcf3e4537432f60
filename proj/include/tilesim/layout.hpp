#pragma once

#include <cstdint>
#include <vector>

#include "tilesim/barriers.hpp"
#include "tilesim/topology.hpp"

namespace tilesim {

// A buffer striped word-interleaved across all banks: element i lives at
// physical word base + i.
struct RowBuffer {
  uint64_t base = 0;
  uint64_t count = 0;
  uint32_t addr(uint64_t i) const { return static_cast<uint32_t>(base + i); }
};

// A contiguous run of slots inside one tile's banks. Every address is
// TILE_LOCAL to that tile's PEs; resolve slots to words via Layout::word().
struct LocalSlab {
  uint32_t tile = 0;
  uint32_t first_slot = 0;
  uint32_t count = 0;
};

// Carves simulated memory into three disjoint regions: whole interleaved
// rows grow from row 0, per-tile slabs stack above them, and barrier
// counters descend from the top row (see CounterArena). Allocate counters
// and row buffers before the first tile slab; Layout rejects any
// allocation that would reach the counter region.
class Layout {
 public:
  Layout(const Topology& topo, const CounterArena& counters);

  // n words across all banks, rounded up to whole rows.
  RowBuffer alloc_rows(uint64_t n_words);
  // n words inside one tile. Freezes row allocation.
  LocalSlab alloc_local(uint32_t tile, uint32_t n_words);
  // Convenience: slab local to the tile of `pe`.
  LocalSlab alloc_pe_local(uint32_t pe, uint32_t n_words);

  // Physical word address of slab slot i.
  uint32_t word(const LocalSlab& slab, uint32_t i) const;

  const Topology& topology() const { return *topo_; }
  uint32_t data_rows_used() const;

 private:
  void check_row(uint64_t row) const;

  const Topology* topo_;
  const CounterArena* counters_;
  uint64_t row_cursor_ = 0;        // next free interleaved row
  uint64_t tile_floor_row_ = 0;    // first row available to tile slabs
  bool tiles_started_ = false;
  std::vector<uint32_t> tile_slots_;  // per-tile next free slot
};

}  // namespace tilesim
