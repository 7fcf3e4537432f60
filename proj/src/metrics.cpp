#include "tilesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tilesim/errors.hpp"

namespace tilesim {

namespace {

constexpr uint32_t kPercentiles[] = {1, 5, 25, 50, 75, 95, 99};

struct IdTally {
  uint64_t last_enter = 0;
  uint64_t last_exit = 0;
  uint64_t enters = 0;
  uint64_t exits = 0;
};

// Per-id enter/exit extremes and counts in one pass.
std::map<uint32_t, IdTally> tally_ids(const Trace& trace) {
  std::map<uint32_t, IdTally> tallies;
  for (const TraceEvent& ev : trace.events) {
    if (ev.kind == EventKind::BarrierEnter) {
      IdTally& t = tallies[ev.id];
      ++t.enters;
      t.last_enter = std::max(t.last_enter, ev.cycle);
    } else if (ev.kind == EventKind::BarrierExit) {
      IdTally& t = tallies[ev.id];
      ++t.exits;
      t.last_exit = std::max(t.last_exit, ev.cycle);
    }
  }
  return tallies;
}

const IdTally& complete_tally(const std::map<uint32_t, IdTally>& tallies,
                              uint32_t id) {
  auto it = tallies.find(id);
  if (it == tallies.end() || it->second.enters == 0) {
    fail(Errc::IncompleteBarrier,
         "no barrier events with id " + std::to_string(id));
  }
  if (it->second.exits != it->second.enters) {
    fail(Errc::IncompleteBarrier,
         "barrier " + std::to_string(id) + " has " +
             std::to_string(it->second.enters) + " enters but " +
             std::to_string(it->second.exits) + " exits");
  }
  return it->second;
}

}  // namespace

uint64_t barrier_span(const Trace& trace, uint32_t barrier_id) {
  const IdTally& t = complete_tally(tally_ids(trace), barrier_id);
  return t.last_exit - t.last_enter;
}

double barrier_fraction(const Trace& trace) {
  if (trace.events.empty()) fail(Errc::EmptyTrace, "trace has no events");
  // Sum of enter->exit stays per PE. Events of one PE are in program order.
  std::vector<uint64_t> in_barrier(trace.n_pes, 0);
  std::vector<uint64_t> open_since(trace.n_pes, 0);
  std::vector<uint32_t> depth(trace.n_pes, 0);
  std::vector<bool> active(trace.n_pes, false);
  for (const TraceEvent& ev : trace.events) {
    active[ev.pe] = true;
    if (ev.kind == EventKind::BarrierEnter) {
      if (depth[ev.pe]++ == 0) open_since[ev.pe] = ev.cycle;
    } else if (ev.kind == EventKind::BarrierExit) {
      if (depth[ev.pe] == 0) {
        fail(Errc::IncompleteBarrier, "exit without matching enter on pe " +
                                          std::to_string(ev.pe));
      }
      if (--depth[ev.pe] == 0) in_barrier[ev.pe] += ev.cycle - open_since[ev.pe];
    }
  }
  double sum = 0.0;
  uint32_t n_active = 0;
  for (uint32_t p = 0; p < trace.n_pes; ++p) {
    if (!active[p]) continue;
    if (depth[p] != 0) {
      fail(Errc::IncompleteBarrier,
           "pe " + std::to_string(p) + " never left a barrier");
    }
    ++n_active;
    if (in_barrier[p] > 0) {
      if (trace.total_cycles == 0) fail(Errc::ZeroCycles, "zero-cycle trace");
      sum += double(in_barrier[p]) / double(trace.total_cycles);
    }
  }
  return n_active ? sum / n_active : 0.0;
}

SpreadCdf arrival_spread_cdf(const Trace& trace, uint32_t barrier_id) {
  complete_tally(tally_ids(trace), barrier_id);
  // First enter per PE for this id.
  std::vector<uint64_t> arrival(trace.n_pes, UINT64_MAX);
  for (const TraceEvent& ev : trace.events) {
    if (ev.kind == EventKind::BarrierEnter && ev.id == barrier_id &&
        arrival[ev.pe] == UINT64_MAX) {
      arrival[ev.pe] = ev.cycle;
    }
  }
  SpreadCdf cdf;
  for (uint64_t a : arrival) {
    if (a != UINT64_MAX) cdf.offsets.push_back(a);
  }
  std::sort(cdf.offsets.begin(), cdf.offsets.end());
  cdf.min_arrival = cdf.offsets.front();
  for (uint64_t& a : cdf.offsets) a -= cdf.min_arrival;
  for (uint32_t pct : kPercentiles) {
    // Nearest-rank: smallest value with at least pct% of mass at or below.
    size_t rank = (pct * cdf.offsets.size() + 99) / 100;
    if (rank == 0) rank = 1;
    cdf.points.push_back({pct, cdf.offsets[rank - 1]});
  }
  return cdf;
}

RunReport build_report(const Trace& trace) {
  if (trace.events.empty()) fail(Errc::EmptyTrace, "trace has no events");
  RunReport rep;
  rep.total_cycles = trace.total_cycles;
  rep.kernel_cycles.assign(trace.n_pes, 0);
  rep.barrier_cycles.assign(trace.n_pes, 0);

  std::vector<uint64_t> kernel_start(trace.n_pes, UINT64_MAX);
  std::vector<uint64_t> open_since(trace.n_pes, 0);
  std::vector<uint32_t> depth(trace.n_pes, 0);
  std::vector<bool> active(trace.n_pes, false);

  for (const TraceEvent& ev : trace.events) {
    active[ev.pe] = true;
    switch (ev.kind) {
      case EventKind::KernelStart:
        if (kernel_start[ev.pe] == UINT64_MAX) kernel_start[ev.pe] = ev.cycle;
        break;
      case EventKind::KernelEnd:
        if (kernel_start[ev.pe] != UINT64_MAX) {
          rep.kernel_cycles[ev.pe] = ev.cycle - kernel_start[ev.pe];
        }
        break;
      case EventKind::BarrierEnter: {
        if (depth[ev.pe]++ == 0) open_since[ev.pe] = ev.cycle;
        auto& arr = rep.first_arrival[ev.id];
        if (arr.empty()) arr.assign(trace.n_pes, UINT64_MAX);
        if (arr[ev.pe] == UINT64_MAX) arr[ev.pe] = ev.cycle;
        BarrierStat& st = rep.barriers[ev.id];
        st.id = ev.id;
        ++st.arrivals;
        st.last_enter = std::max(st.last_enter, ev.cycle);
        break;
      }
      case EventKind::BarrierExit: {
        if (depth[ev.pe] == 0) {
          fail(Errc::IncompleteBarrier, "exit without matching enter on pe " +
                                            std::to_string(ev.pe));
        }
        if (--depth[ev.pe] == 0) {
          rep.barrier_cycles[ev.pe] += ev.cycle - open_since[ev.pe];
        }
        rep.barriers[ev.id].last_exit =
            std::max(rep.barriers[ev.id].last_exit, ev.cycle);
        break;
      }
      case EventKind::Custom:
        break;
    }
  }

  double frac_sum = 0.0;
  double barrier_sum = 0.0;
  for (uint32_t p = 0; p < trace.n_pes; ++p) {
    if (!active[p]) continue;
    if (depth[p] != 0) {
      fail(Errc::IncompleteBarrier,
           "pe " + std::to_string(p) + " never left a barrier");
    }
    ++rep.active_pes;
    barrier_sum += double(rep.barrier_cycles[p]);
    if (rep.barrier_cycles[p] > 0) {
      if (trace.total_cycles == 0) fail(Errc::ZeroCycles, "zero-cycle trace");
      frac_sum += double(rep.barrier_cycles[p]) / double(trace.total_cycles);
    }
  }
  if (rep.active_pes) {
    rep.barrier_fraction = frac_sum / rep.active_pes;
    rep.mean_barrier_cycles = barrier_sum / rep.active_pes;
  }
  double span_sum = 0.0;
  for (auto& [id, st] : rep.barriers) {
    st.span = st.last_exit - st.last_enter;
    span_sum += double(st.span);
  }
  if (!rep.barriers.empty()) rep.mean_span = span_sum / rep.barriers.size();
  return rep;
}

double speedup(uint64_t baseline_cycles, uint64_t variant_cycles) {
  if (baseline_cycles == 0 || variant_cycles == 0) {
    fail(Errc::ZeroCycles, "speedup needs nonzero cycle counts");
  }
  return double(baseline_cycles) / double(variant_cycles);
}

Aggregate aggregate(std::vector<double> values) {
  if (values.empty()) fail(Errc::EmptyInput, "nothing to aggregate");
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  Aggregate agg;
  agg.mean = sum / double(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
    agg.stddev = std::sqrt(ss / double(values.size() - 1));
  }
  return agg;
}

}  // namespace tilesim
