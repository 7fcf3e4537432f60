#include "tilesim/layout.hpp"

#include <algorithm>
#include <string>

#include "tilesim/errors.hpp"

namespace tilesim {

Layout::Layout(const Topology& topo, const CounterArena& counters)
    : topo_(&topo), counters_(&counters) {
  tile_slots_.assign(topo.total_tiles(), 0);
}

void Layout::check_row(uint64_t row) const {
  if (row >= counters_->low_row()) {
    fail(Errc::OutOfRange,
         "data row " + std::to_string(row) + " reaches the counter region (low row " +
             std::to_string(counters_->low_row()) + ")");
  }
}

RowBuffer Layout::alloc_rows(uint64_t n_words) {
  if (n_words == 0) fail(Errc::ZeroCount, "empty row buffer");
  if (tiles_started_) {
    fail(Errc::OutOfRange, "row buffers must be allocated before tile slabs");
  }
  const uint64_t banks = topo_->total_banks();
  const uint64_t rows = (n_words + banks - 1) / banks;
  check_row(row_cursor_ + rows - 1);
  RowBuffer buf{row_cursor_ * banks, n_words};
  row_cursor_ += rows;
  return buf;
}

LocalSlab Layout::alloc_local(uint32_t tile, uint32_t n_words) {
  if (n_words == 0) fail(Errc::ZeroCount, "empty tile slab");
  if (tile >= topo_->total_tiles()) fail(Errc::OutOfRange, "tile out of range");
  if (!tiles_started_) {
    tiles_started_ = true;
    tile_floor_row_ = row_cursor_;
  }
  const uint32_t bpt = topo_->banks_per_tile();
  const uint32_t first = tile_slots_[tile];
  const uint64_t last_row = tile_floor_row_ + (uint64_t(first) + n_words - 1) / bpt;
  check_row(last_row);
  tile_slots_[tile] = first + n_words;
  return LocalSlab{tile, first, n_words};
}

LocalSlab Layout::alloc_pe_local(uint32_t pe, uint32_t n_words) {
  if (pe >= topo_->total_pes()) fail(Errc::OutOfRange, "pe out of range");
  return alloc_local(topo_->tile_of_pe(pe), n_words);
}

uint32_t Layout::word(const LocalSlab& slab, uint32_t i) const {
  if (i >= slab.count) fail(Errc::OutOfRange, "slab index out of range");
  const uint32_t bpt = topo_->banks_per_tile();
  const uint32_t slot = slab.first_slot + i;
  const uint64_t row = tile_floor_row_ + slot / bpt;
  return static_cast<uint32_t>(row * topo_->total_banks() +
                               uint64_t(slab.tile) * bpt + slot % bpt);
}

uint32_t Layout::data_rows_used() const {
  uint64_t rows = row_cursor_;
  if (tiles_started_) {
    uint32_t max_slots = 0;
    for (uint32_t s : tile_slots_) max_slots = std::max(max_slots, s);
    const uint32_t bpt = topo_->banks_per_tile();
    rows = tile_floor_row_ + (uint64_t(max_slots) + bpt - 1) / bpt;
  }
  return static_cast<uint32_t>(rows);
}

}  // namespace tilesim
