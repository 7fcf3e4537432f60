#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "tilesim/topology.hpp"

using namespace tilesim;

TEST_CASE("default shape") {
  Topology topo = build_topology({});
  CHECK(topo.total_pes() == 1024);
  CHECK(topo.total_tiles() == 128);
  CHECK(topo.total_banks() == 4096);
  CHECK(topo.banks_per_tile() == 32);
  CHECK(topo.pes_per_group() == 128);
  CHECK(topo.total_words() == 4096ull * 256);
  CHECK(topo.tile_words() == 32u * 256);
}

TEST_CASE("interleaved view walks banks round-robin") {
  Topology topo = build_topology({});
  CHECK(topo.bank_of(MappingMode::Interleaved, 0) == BankSlot{0, 0});
  CHECK(topo.bank_of(MappingMode::Interleaved, 1) == BankSlot{1, 0});
  CHECK(topo.bank_of(MappingMode::Interleaved, 4095) == BankSlot{4095, 0});
  // One full row plus one word: bank 1, row 1.
  CHECK(topo.bank_of(MappingMode::Interleaved, 4097) == BankSlot{1, 1});
}

TEST_CASE("tile-sequential view fills one tile before the next") {
  Topology topo = build_topology({});
  // Tile 3 starts at word 3 * tile_words; offset 32 wraps its 32 banks once.
  const uint64_t base = 3ull * topo.tile_words();
  CHECK(topo.bank_of(MappingMode::TileSequential, base) == BankSlot{96, 0});
  CHECK(topo.bank_of(MappingMode::TileSequential, base + 32) == BankSlot{96, 1});
  CHECK(topo.bank_of(MappingMode::TileSequential, base + 33) == BankSlot{97, 1});
}

TEST_CASE("both views are bijective over the full word range") {
  TopologyConfig cfg;
  cfg.pes_per_tile = 2;
  cfg.tiles_per_group = 2;
  cfg.groups = 2;
  cfg.banks_per_pe = 2;
  cfg.words_per_bank = 4;
  Topology topo = build_topology(cfg);
  for (MappingMode mode :
       {MappingMode::Interleaved, MappingMode::TileSequential}) {
    std::set<std::pair<uint32_t, uint32_t>> seen;
    for (uint64_t w = 0; w < topo.total_words(); ++w) {
      const BankSlot s = topo.bank_of(mode, w);
      CHECK(s.bank < topo.total_banks());
      CHECK(s.row < topo.words_per_bank());
      CHECK(seen.emplace(s.bank, s.row).second);
      CHECK(topo.word_of(mode, s) == w);
    }
    CHECK(seen.size() == topo.total_words());
  }
}

TEST_CASE("locality classes and base latencies") {
  Topology topo = build_topology({});
  // PE 0 lives in tile 0 (banks 0..31), group 0 (banks 0..511).
  CHECK(topo.locality(0, 0) == LatencyClass::TileLocal);
  CHECK(topo.locality(0, 31) == LatencyClass::TileLocal);
  CHECK(topo.locality(0, 33) == LatencyClass::GroupLocal);
  CHECK(topo.locality(0, 511) == LatencyClass::GroupLocal);
  CHECK(topo.locality(0, 512) == LatencyClass::Remote);
  CHECK(topo.base_latency(LatencyClass::TileLocal) == 1);
  CHECK(topo.base_latency(LatencyClass::GroupLocal) == 3);
  CHECK(topo.base_latency(LatencyClass::Remote) == 5);
  // Monotone in hierarchy distance, also for custom latency values.
  TopologyConfig cfg;
  cfg.latency = {2, 7, 20};
  Topology custom = build_topology(cfg);
  CHECK(custom.base_latency(LatencyClass::TileLocal) <
        custom.base_latency(LatencyClass::GroupLocal));
  CHECK(custom.base_latency(LatencyClass::GroupLocal) <
        custom.base_latency(LatencyClass::Remote));
}

TEST_CASE("invalid configurations are rejected") {
  TopologyConfig cfg;
  cfg.pes_per_tile = 3;
  CHECK_THROWS_AS(build_topology(cfg), SimError);
  cfg = {};
  cfg.groups = 0;
  CHECK_THROWS_AS(build_topology(cfg), SimError);
  cfg = {};
  cfg.latency = {3, 3, 5};  // not strictly increasing
  CHECK_THROWS_AS(build_topology(cfg), SimError);
  cfg = {};
  cfg.latency = {0, 3, 5};
  CHECK_THROWS_AS(build_topology(cfg), SimError);
}

TEST_CASE("error codes carry the failing condition") {
  TopologyConfig cfg;
  cfg.pes_per_tile = 3;
  try {
    build_topology(cfg);
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::NonPowerOfTwo);
  }
  Topology topo = build_topology({});
  try {
    topo.bank_of(MappingMode::Interleaved, topo.total_words());
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::OutOfRange);
  }
  try {
    topo.locality(topo.total_pes(), 0);
    FAIL("expected a throw");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::OutOfRange);
  }
}
