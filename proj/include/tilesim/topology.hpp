#pragma once

#include <cstdint>

#include "tilesim/errors.hpp"

namespace tilesim {

// Round-trip latency classes of the hierarchical interconnect. A processing
// element (PE) reaches banks of its own tile through the tile crossbar,
// banks of other tiles in its group through the group interconnect, and
// banks of other groups through the top-level interconnect.
enum class LatencyClass : uint8_t { TileLocal = 0, GroupLocal = 1, Remote = 2 };

struct LatencyCycles {
  uint32_t tile_local = 1;
  uint32_t group_local = 3;
  uint32_t remote = 5;
};

struct TopologyConfig {
  uint32_t pes_per_tile = 8;
  uint32_t tiles_per_group = 16;
  uint32_t groups = 8;
  uint32_t banks_per_pe = 4;    // banking factor
  uint32_t words_per_bank = 256;
  LatencyCycles latency{};
};

// Address views used when laying out buffers. The physical bank map is
// word-interleaved; TileSequential is the block view that walks one tile's
// banks round-robin before moving to the next tile.
enum class MappingMode : uint8_t { Interleaved = 0, TileSequential = 1 };

struct BankSlot {
  uint32_t bank = 0;
  uint32_t row = 0;
  bool operator==(const BankSlot&) const = default;
};

class Topology {
 public:
  explicit Topology(const TopologyConfig& cfg);

  const TopologyConfig& config() const { return cfg_; }

  uint32_t pes_per_tile() const { return cfg_.pes_per_tile; }
  uint32_t tiles_per_group() const { return cfg_.tiles_per_group; }
  uint32_t groups() const { return cfg_.groups; }
  uint32_t banks_per_pe() const { return cfg_.banks_per_pe; }
  uint32_t words_per_bank() const { return cfg_.words_per_bank; }

  uint32_t total_pes() const { return total_pes_; }
  uint32_t total_tiles() const { return total_tiles_; }
  uint32_t total_banks() const { return total_banks_; }
  uint32_t pes_per_group() const { return pes_per_group_; }
  uint32_t banks_per_tile() const { return banks_per_tile_; }
  uint32_t tile_words() const { return tile_words_; }
  uint64_t total_words() const { return total_words_; }

  uint32_t tile_of_pe(uint32_t pe) const { return pe / cfg_.pes_per_tile; }
  uint32_t group_of_pe(uint32_t pe) const { return pe / pes_per_group_; }
  uint32_t tile_of_bank(uint32_t bank) const { return bank / banks_per_tile_; }
  uint32_t group_of_bank(uint32_t bank) const {
    return tile_of_bank(bank) / cfg_.tiles_per_group;
  }

  // Word -> (bank, row) under the given view; bijective over
  // [0, total_words()) for both views.
  BankSlot bank_of(MappingMode mode, uint64_t word) const;
  // Inverse of bank_of.
  uint64_t word_of(MappingMode mode, BankSlot slot) const;

  LatencyClass locality(uint32_t pe, uint32_t bank) const;
  uint32_t base_latency(LatencyClass c) const;

 private:
  TopologyConfig cfg_;
  uint32_t total_pes_ = 0;
  uint32_t total_tiles_ = 0;
  uint32_t total_banks_ = 0;
  uint32_t pes_per_group_ = 0;
  uint32_t banks_per_tile_ = 0;
  uint32_t tile_words_ = 0;
  uint64_t total_words_ = 0;
};

Topology build_topology(const TopologyConfig& cfg = {});

bool is_power_of_two(uint64_t v);

}  // namespace tilesim
