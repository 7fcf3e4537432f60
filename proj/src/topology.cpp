#include "tilesim/topology.hpp"

#include <string>

namespace tilesim {

bool is_power_of_two(uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

namespace {

void require_pow2(uint64_t v, const char* what) {
  if (v == 0) fail(Errc::ZeroCount, std::string(what) + " must be >= 1");
  if (!is_power_of_two(v))
    fail(Errc::NonPowerOfTwo,
         std::string(what) + " must be a power of two, got " +
             std::to_string(v));
}

}  // namespace

Topology::Topology(const TopologyConfig& cfg) : cfg_(cfg) {
  require_pow2(cfg.pes_per_tile, "pes_per_tile");
  require_pow2(cfg.tiles_per_group, "tiles_per_group");
  require_pow2(cfg.groups, "groups");
  require_pow2(cfg.banks_per_pe, "banks_per_pe");
  require_pow2(cfg.words_per_bank, "words_per_bank");
  const auto& l = cfg.latency;
  if (l.tile_local == 0) fail(Errc::ZeroCount, "tile_local latency must be >= 1");
  if (!(l.tile_local < l.group_local && l.group_local < l.remote))
    fail(Errc::OutOfRange, "latency classes must be strictly increasing");

  total_pes_ = cfg.pes_per_tile * cfg.tiles_per_group * cfg.groups;
  total_tiles_ = cfg.tiles_per_group * cfg.groups;
  banks_per_tile_ = cfg.pes_per_tile * cfg.banks_per_pe;
  total_banks_ = banks_per_tile_ * total_tiles_;
  pes_per_group_ = cfg.pes_per_tile * cfg.tiles_per_group;
  tile_words_ = banks_per_tile_ * cfg.words_per_bank;
  total_words_ = uint64_t(total_banks_) * cfg.words_per_bank;
}

BankSlot Topology::bank_of(MappingMode mode, uint64_t word) const {
  if (word >= total_words_)
    fail(Errc::OutOfRange, "word " + std::to_string(word) + " beyond capacity " +
                               std::to_string(total_words_));
  switch (mode) {
    case MappingMode::Interleaved:
      return {uint32_t(word % total_banks_), uint32_t(word / total_banks_)};
    case MappingMode::TileSequential: {
      const uint32_t tile = uint32_t(word / tile_words_);
      const uint32_t off = uint32_t(word % tile_words_);
      return {tile * banks_per_tile_ + off % banks_per_tile_,
              off / banks_per_tile_};
    }
  }
  fail(Errc::OutOfRange, "bad mapping mode");
}

uint64_t Topology::word_of(MappingMode mode, BankSlot slot) const {
  if (slot.bank >= total_banks_ || slot.row >= cfg_.words_per_bank)
    fail(Errc::OutOfRange, "bank/row beyond capacity");
  switch (mode) {
    case MappingMode::Interleaved:
      return uint64_t(slot.row) * total_banks_ + slot.bank;
    case MappingMode::TileSequential: {
      const uint32_t tile = tile_of_bank(slot.bank);
      const uint32_t bank_in_tile = slot.bank % banks_per_tile_;
      return uint64_t(tile) * tile_words_ +
             uint64_t(slot.row) * banks_per_tile_ + bank_in_tile;
    }
  }
  fail(Errc::OutOfRange, "bad mapping mode");
}

LatencyClass Topology::locality(uint32_t pe, uint32_t bank) const {
  if (pe >= total_pes_) fail(Errc::OutOfRange, "pe out of range");
  if (bank >= total_banks_) fail(Errc::OutOfRange, "bank out of range");
  if (tile_of_pe(pe) == tile_of_bank(bank)) return LatencyClass::TileLocal;
  if (group_of_pe(pe) == group_of_bank(bank)) return LatencyClass::GroupLocal;
  return LatencyClass::Remote;
}

uint32_t Topology::base_latency(LatencyClass c) const {
  switch (c) {
    case LatencyClass::TileLocal: return cfg_.latency.tile_local;
    case LatencyClass::GroupLocal: return cfg_.latency.group_local;
    case LatencyClass::Remote: return cfg_.latency.remote;
  }
  return cfg_.latency.remote;
}

Topology build_topology(const TopologyConfig& cfg) { return Topology(cfg); }

}  // namespace tilesim
