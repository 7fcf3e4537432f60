#include "tilesim/trace.hpp"

#include <ostream>

namespace tilesim {

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::KernelStart: return "KERNEL_START";
    case EventKind::KernelEnd: return "KERNEL_END";
    case EventKind::BarrierEnter: return "BARRIER_ENTER";
    case EventKind::BarrierExit: return "BARRIER_EXIT";
    case EventKind::Custom: return "CUSTOM";
  }
  return "UNKNOWN";
}

void dump_trace_csv(const Trace& trace, std::ostream& os) {
  os << "cycle,pe,kind,id\n";
  for (const TraceEvent& e : trace.events)
    os << e.cycle << ',' << e.pe << ',' << event_kind_name(e.kind) << ','
       << e.id << '\n';
}

}  // namespace tilesim
