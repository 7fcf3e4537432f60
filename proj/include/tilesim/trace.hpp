#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "tilesim/program.hpp"

namespace tilesim {

struct TraceEvent {
  uint64_t cycle = 0;
  uint32_t pe = 0;
  EventKind kind = EventKind::Custom;
  uint32_t id = 0;
  bool operator==(const TraceEvent&) const = default;
};

// One committed wakeup-register write.
struct WakeupRecord {
  uint64_t cycle = 0;   // commit cycle (assertion cycle)
  uint32_t writer = 0;  // issuing PE, or UINT32_MAX for host writes
  uint32_t reg = 0;
  uint32_t value = 0;
};

struct Trace {
  std::vector<TraceEvent> events;
  std::vector<WakeupRecord> wakeups;
  uint64_t total_cycles = 0;
  uint32_t n_pes = 0;
};

const char* event_kind_name(EventKind k);

// Writes "cycle,pe,kind,id" rows (with header) for offline inspection.
void dump_trace_csv(const Trace& trace, std::ostream& os);

}  // namespace tilesim
