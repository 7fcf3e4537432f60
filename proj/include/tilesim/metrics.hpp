#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "tilesim/trace.hpp"

namespace tilesim {

// Per-PE offsets from the earliest arrival at one barrier, with fixed
// nearest-rank percentile points.
struct SpreadCdf {
  uint64_t min_arrival = 0;
  std::vector<uint64_t> offsets;  // sorted, one per arriving PE
  struct Point {
    uint32_t pct;
    uint64_t value;
  };
  std::vector<Point> points;  // at {1,5,25,50,75,95,99}%
  uint64_t spread() const { return offsets.empty() ? 0 : offsets.back(); }
};

struct BarrierStat {
  uint32_t id = 0;
  uint64_t last_enter = 0;
  uint64_t last_exit = 0;
  uint64_t span = 0;  // last_exit - last_enter
  uint32_t arrivals = 0;
};

// Digest of one run's trace. "Active" PEs are those that emitted at least
// one event; idle PEs do not dilute averages.
struct RunReport {
  uint64_t total_cycles = 0;
  uint32_t active_pes = 0;
  std::vector<uint64_t> kernel_cycles;   // per PE: first start to last end
  std::vector<uint64_t> barrier_cycles;  // per PE: sum of enter->exit stays
  std::map<uint32_t, BarrierStat> barriers;         // by barrier id
  std::map<uint32_t, std::vector<uint64_t>> first_arrival;  // id -> per-PE
  double barrier_fraction = 0.0;   // mean over active PEs of barrier/total
  double mean_barrier_cycles = 0;  // mean barrier-resident cycles per active PE
  double mean_span = 0.0;          // mean span over barrier ids
};

uint64_t barrier_span(const Trace& trace, uint32_t barrier_id);
double barrier_fraction(const Trace& trace);
SpreadCdf arrival_spread_cdf(const Trace& trace, uint32_t barrier_id);
RunReport build_report(const Trace& trace);

double speedup(uint64_t baseline_cycles, uint64_t variant_cycles);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n-1); 0 for a single value
};

// Order-independent: values are sorted before accumulation, so permuting
// the input leaves the result bit-identical.
Aggregate aggregate(std::vector<double> values);

}  // namespace tilesim
