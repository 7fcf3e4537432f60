#include <cmath>
#include <complex>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <vector>

#include "tilesim/barriers.hpp"
#include "tilesim/errors.hpp"
#include "tilesim/layout.hpp"
#include "tilesim/rng.hpp"
#include "tilesim/workloads.hpp"

namespace tilesim {

namespace {

using cplx = std::complex<double>;

constexpr double kPi = 3.141592653589793238462643383279502884;

[[noreturn]] void mismatch(const std::string& what) {
  throw std::runtime_error("verification failed: " + what);
}

// A complex double occupies four consecutive words per component pair:
// [re_lo, re_hi, im_lo, im_hi].
uint32_t f64_lo(double v) {
  uint64_t b;
  std::memcpy(&b, &v, 8);
  return static_cast<uint32_t>(b);
}
uint32_t f64_hi(double v) {
  uint64_t b;
  std::memcpy(&b, &v, 8);
  return static_cast<uint32_t>(b >> 32);
}
double f64_from(uint32_t lo, uint32_t hi) {
  uint64_t b = (uint64_t(hi) << 32) | lo;
  double v;
  std::memcpy(&v, &b, 8);
  return v;
}

// Reverses the base-4 digits of n (for n_points = 4^stages). The butterfly
// network leaves bin k of the spectrum at data index rev4(k); rev4 is its
// own inverse.
uint32_t rev4(uint32_t n, uint32_t stages) {
  uint32_t r = 0;
  for (uint32_t s = 0; s < stages; ++s) {
    r = (r << 2) | (n & 3);
    n >>= 2;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Butterfly schedule. Stage s of a 4^stages-point decimation-in-frequency
// transform combines indices {hi*4Q + lo + j*Q : j = 0..3} with Q =
// n/4^(s+1), butterfly index b = hi*Q + lo. Four consecutive butterflies
// live on one PE, so the PE holding index n as *input* to stage s is
// butterfly_of(n)/4 and every stage read is slab-local; outputs are stored
// into the tiles of their next-stage owners. After the last stage the data
// lands contiguously: index n at PE n/16, slot n%16.

struct FftGeometry {
  uint32_t n_points = 0;
  uint32_t stages = 0;
  uint32_t pes_per_fft = 0;

  uint32_t q_of(uint32_t s) const { return n_points >> (2 * (s + 1)); }
  uint32_t butterflies() const { return n_points / 4; }

  uint32_t butterfly_of(uint32_t s, uint32_t n) const {
    const uint32_t q = q_of(s);
    return (n / (4 * q)) * q + n % q;
  }
  uint32_t owner_in(uint32_t s, uint32_t n) const {
    return butterfly_of(s, n) / 4;
  }
  uint32_t slot_in(uint32_t s, uint32_t n) const {
    return (butterfly_of(s, n) % 4) * 4 + (n / q_of(s)) % 4;
  }
  // Layout the stage writes into: stage s feeds stage s+1; the last stage
  // feeds the final contiguous layout.
  uint32_t owner_out(uint32_t s, uint32_t n) const {
    return s + 1 < stages ? owner_in(s + 1, n) : n / 16;
  }
  uint32_t slot_out(uint32_t s, uint32_t n) const {
    return s + 1 < stages ? slot_in(s + 1, n) : n % 16;
  }
};

// One radix-4 DIF butterfly with twiddles for position lo within a
// 4Q-point block.
void butterfly4(const cplx in[4], cplx out[4], uint32_t lo, uint32_t q) {
  const cplx t0 = in[0] + in[2], t1 = in[1] + in[3];
  const cplx t2 = in[0] - in[2], t3 = in[1] - in[3];
  const cplx jt3(-t3.imag(), t3.real());  // i * t3
  const double ang = -2.0 * kPi * double(lo) / double(4 * q);
  const cplx w1(std::cos(ang), std::sin(ang));
  const cplx w2(std::cos(2 * ang), std::sin(2 * ang));
  const cplx w3(std::cos(3 * ang), std::sin(3 * ang));
  out[0] = t0 + t1;
  out[1] = (t2 - jt3) * w1;
  out[2] = (t0 - t1) * w2;
  out[3] = (t2 + jt3) * w3;
}

constexpr uint32_t kButterflyBudget = 24;  // three complex mults + adds
constexpr uint32_t kMacBudget = 6;         // one complex multiply-accumulate

// ---------------------------------------------------------------------------
// Shared state for the FFT batch and the full pipeline.

struct FftState {
  CounterArena arena;
  Layout layout;
  FftGeometry geo;
  uint32_t subsets = 0;
  uint32_t ffts_per_subset = 0;  // F
  uint32_t folds = 0;
  uint32_t rounds = 0;
  BarrierConfig barriers;

  std::vector<BarrierPlan> stage_plans;  // per subset if partial, else [0]
  bool pipeline = false;

  // Pipeline extras.
  uint32_t n_beams = 0, n_sc = 0;
  BarrierPlan full_plan;  // between FFT and beamforming
  std::vector<LocalSlab> h_tiles;  // per-tile copy of the coefficient matrix
  std::vector<LocalSlab> y_slabs;  // per PE

  // slabs[pe][g]: 16 complex values = 64 words each.
  std::vector<std::vector<LocalSlab>> ping, pong;

  std::vector<std::vector<cplx>> inputs;  // per fft
  std::vector<cplx> h;                    // row-major n_beams x n_rx

  FftState(const Topology& topo) : arena(topo), layout(topo, arena) {}

  uint32_t global_pe(uint32_t subset, uint32_t q_local) const {
    return subset * geo.pes_per_fft + q_local;
  }
  uint32_t subset_of_fft(uint32_t fft) const { return fft / ffts_per_subset; }
  uint32_t slab_index_of_fft(uint32_t fft) const {
    return fft % ffts_per_subset;
  }

  // Word address of component `comp` of index n in fft `fft`'s buffer for
  // stage s input (src=true) or stage s output (src=false).
  uint32_t addr(uint32_t fft, uint32_t s, bool src, uint32_t n,
                uint32_t comp) const {
    const uint32_t subset = subset_of_fft(fft);
    const uint32_t g = slab_index_of_fft(fft);
    const uint32_t owner = src ? geo.owner_in(s, n) : geo.owner_out(s, n);
    const uint32_t slot = src ? geo.slot_in(s, n) : geo.slot_out(s, n);
    const uint32_t pe = global_pe(subset, owner);
    // Stage s reads ping when even, writes the opposite buffer; the final
    // stage always lands back in ping (stage count is even for 4096).
    const bool read_ping = (s % 2 == 0);
    const bool ping_side = src ? read_ping : !read_ping;
    const auto& slabs = ping_side ? ping : pong;
    return layout.word(slabs[pe][g], slot * 4 + comp);
  }
  // Word address of spectrum bin k of fft `fft` after all stages.
  uint32_t bin_addr(uint32_t fft, uint32_t k, uint32_t comp) const {
    const uint32_t n = rev4(k, geo.stages);
    const uint32_t pe = global_pe(subset_of_fft(fft), n / 16);
    const bool final_in_ping = (geo.stages % 2 == 0);
    const auto& slabs = final_in_ping ? ping : pong;
    return layout.word(slabs[pe][slab_index_of_fft(fft)],
                       (n % 16) * 4 + comp);
  }
  uint32_t h_addr(uint32_t tile, uint32_t b, uint32_t rx, uint32_t comp) const {
    const uint32_t n_rx = subsets * ffts_per_subset;
    return layout.word(h_tiles[tile], (b * n_rx + rx) * 4 + comp);
  }
};

void check_fft_params(uint32_t n_ffts, uint32_t n_points, uint32_t pes_per_fft,
                      uint32_t folds, uint32_t n_pes) {
  uint32_t stages = 0, reach = 1;
  while (reach < n_points) {
    reach *= 4;
    ++stages;
  }
  if (reach != n_points || n_points < 16) {
    fail(Errc::BadSize,
         "fft size " + std::to_string(n_points) + " is not a power of four");
  }
  if (pes_per_fft != n_points / 16) {
    fail(Errc::BadSize, "each PE owns 16 points: " +
                            std::to_string(n_points) + " points need " +
                            std::to_string(n_points / 16) + " PEs");
  }
  if (pes_per_fft > n_pes || n_pes % pes_per_fft != 0) {
    fail(Errc::BadSize, "PE count not divisible into FFT subsets");
  }
  const uint32_t subsets = n_pes / pes_per_fft;
  if (folds == 0 || n_ffts == 0 || n_ffts % (subsets * folds) != 0) {
    fail(Errc::BadSize, "fft count " + std::to_string(n_ffts) +
                            " not divisible by subsets x folds = " +
                            std::to_string(subsets) + "x" +
                            std::to_string(folds));
  }
}

std::vector<uint32_t> subset_pes(uint32_t subset, uint32_t pes_per_fft) {
  std::vector<uint32_t> pes(pes_per_fft);
  for (uint32_t i = 0; i < pes_per_fft; ++i) {
    pes[i] = subset * pes_per_fft + i;
  }
  return pes;
}

std::vector<uint32_t> every_pe(uint32_t n) {
  std::vector<uint32_t> pes(n);
  for (uint32_t i = 0; i < n; ++i) pes[i] = i;
  return pes;
}

// Builds geometry, barrier plans, and slabs. Pipeline extras (H tiles,
// output slabs, the full barrier) only when n_beams != 0.
std::shared_ptr<FftState> make_fft_state(const Topology& topo, uint32_t n_ffts,
                                         uint32_t n_points,
                                         uint32_t pes_per_fft, uint32_t folds,
                                         const BarrierConfig& barriers,
                                         uint32_t n_beams, uint32_t n_sc,
                                         uint64_t seed) {
  check_fft_params(n_ffts, n_points, pes_per_fft, folds, topo.total_pes());
  auto st = std::make_shared<FftState>(topo);
  st->geo.n_points = n_points;
  st->geo.pes_per_fft = pes_per_fft;
  for (uint32_t reach = 1; reach < n_points; reach *= 4) ++st->geo.stages;
  st->subsets = topo.total_pes() / pes_per_fft;
  st->ffts_per_subset = n_ffts / st->subsets;
  st->folds = folds;
  st->rounds = st->ffts_per_subset / folds;
  st->barriers = barriers;
  st->pipeline = (n_beams != 0);
  st->n_beams = n_beams;
  st->n_sc = n_sc;

  // Plans first: counters live at the top of memory.
  const uint32_t n_pes = topo.total_pes();
  if (barriers.partial && st->subsets > 1) {
    const uint32_t k =
        barriers.radix ? std::min(barriers.radix, pes_per_fft) : pes_per_fft;
    for (uint32_t q = 0; q < st->subsets; ++q) {
      st->stage_plans.push_back(
          plan_partial(topo, subset_pes(q, pes_per_fft), k, st->arena, 16 + q));
    }
  } else {
    const uint32_t k = barriers.radix ? barriers.radix : n_pes;
    st->stage_plans.push_back(
        plan_tree(topo, every_pe(n_pes), k, st->arena, 16));
  }
  if (st->pipeline) {
    const uint32_t k = barriers.radix ? barriers.radix : n_pes;
    st->full_plan = plan_tree(topo, every_pe(n_pes), k, st->arena, 15);
  }

  // H replicas next (tile slabs, before the big slab loops, so each tile's
  // copy starts at the same slot).
  if (st->pipeline) {
    const uint32_t n_rx = n_ffts;
    for (uint32_t t = 0; t < topo.total_tiles(); ++t) {
      st->h_tiles.push_back(
          st->layout.alloc_local(t, n_beams * n_rx * 4));
    }
  }

  st->ping.resize(n_pes);
  st->pong.resize(n_pes);
  for (uint32_t pe = 0; pe < n_pes; ++pe) {
    for (uint32_t g = 0; g < st->ffts_per_subset; ++g) {
      st->ping[pe].push_back(st->layout.alloc_pe_local(pe, 64));
    }
    for (uint32_t g = 0; g < st->ffts_per_subset; ++g) {
      st->pong[pe].push_back(st->layout.alloc_pe_local(pe, 64));
    }
  }
  if (st->pipeline) {
    const uint32_t cols = (n_sc + n_pes - 1) / n_pes;
    for (uint32_t pe = 0; pe < n_pes; ++pe) {
      st->y_slabs.push_back(st->layout.alloc_pe_local(pe, cols * n_beams * 4));
    }
  }

  // Input data.
  SplitMix64 rng(seed);
  st->inputs.resize(n_ffts);
  for (auto& in : st->inputs) {
    in.resize(n_points);
    for (auto& v : in) {
      v = cplx(rng.unit() * 2.0 - 1.0, rng.unit() * 2.0 - 1.0);
    }
  }
  if (st->pipeline) {
    st->h.resize(uint64_t(n_beams) * n_ffts);
    for (auto& v : st->h) {
      v = cplx(rng.unit() * 2.0 - 1.0, rng.unit() * 2.0 - 1.0);
    }
  }
  return st;
}

// Pokes inputs (stage-0 layout) and H replicas into engine memory.
void load_fft_data(Engine& eng, const FftState& st) {
  const uint32_t n_ffts = st.subsets * st.ffts_per_subset;
  for (uint32_t fft = 0; fft < n_ffts; ++fft) {
    for (uint32_t n = 0; n < st.geo.n_points; ++n) {
      const cplx v = st.inputs[fft][n];
      eng.poke(st.addr(fft, 0, true, n, 0), f64_lo(v.real()));
      eng.poke(st.addr(fft, 0, true, n, 1), f64_hi(v.real()));
      eng.poke(st.addr(fft, 0, true, n, 2), f64_lo(v.imag()));
      eng.poke(st.addr(fft, 0, true, n, 3), f64_hi(v.imag()));
    }
  }
  if (st.pipeline) {
    const Topology& topo = eng.topology();
    const uint32_t n_rx = n_ffts;
    for (uint32_t t = 0; t < topo.total_tiles(); ++t) {
      for (uint32_t b = 0; b < st.n_beams; ++b) {
        for (uint32_t rx = 0; rx < n_rx; ++rx) {
          const cplx v = st.h[uint64_t(b) * n_rx + rx];
          eng.poke(st.h_addr(t, b, rx, 0), f64_lo(v.real()));
          eng.poke(st.h_addr(t, b, rx, 1), f64_hi(v.real()));
          eng.poke(st.h_addr(t, b, rx, 2), f64_lo(v.imag()));
          eng.poke(st.h_addr(t, b, rx, 3), f64_hi(v.imag()));
        }
      }
    }
  }
}

// The butterfly work of one (pe, stage, fft): four butterflies of sixteen
// loads, the arithmetic budget, and sixteen stores into the next owners'
// slabs. Shared by the parallel program and the serial baseline.
Program butterfly_block(std::shared_ptr<const FftState> st, uint32_t fft,
                        uint32_t s, uint32_t q_local) {
  const uint32_t q = st->geo.q_of(s);
  for (uint32_t t = 0; t < 4; ++t) {
    const uint32_t b = q_local * 4 + t;
    const uint32_t hi = b / q, lo = b % q;
    cplx in[4], out[4];
    for (uint32_t j = 0; j < 4; ++j) {
      const uint32_t n = hi * 4 * q + lo + j * q;
      const uint32_t w0 = co_yield PEOp::load(st->addr(fft, s, true, n, 0));
      const uint32_t w1 = co_yield PEOp::load(st->addr(fft, s, true, n, 1));
      const uint32_t w2 = co_yield PEOp::load(st->addr(fft, s, true, n, 2));
      const uint32_t w3 = co_yield PEOp::load(st->addr(fft, s, true, n, 3));
      in[j] = cplx(f64_from(w0, w1), f64_from(w2, w3));
    }
    butterfly4(in, out, lo, q);
    co_yield PEOp::compute(kButterflyBudget);
    for (uint32_t j = 0; j < 4; ++j) {
      const uint32_t n = hi * 4 * q + lo + j * q;
      co_yield PEOp::store(st->addr(fft, s, false, n, 0), f64_lo(out[j].real()));
      co_yield PEOp::store(st->addr(fft, s, false, n, 1), f64_hi(out[j].real()));
      co_yield PEOp::store(st->addr(fft, s, false, n, 2), f64_lo(out[j].imag()));
      co_yield PEOp::store(st->addr(fft, s, false, n, 3), f64_hi(out[j].imag()));
    }
  }
}

// One column of the beamforming product: stage the antenna spectra for
// subcarrier j, then accumulate every beam with tile-local coefficient
// loads. The coefficient tile and the output slab are passed separately so
// the serial baseline can keep its local coefficients while writing to the
// same output addresses the parallel runs use.
Program beam_column(std::shared_ptr<const FftState> st, uint32_t h_tile,
                    uint32_t y_pe, uint32_t col_index, uint32_t j) {
  const uint32_t n_rx = st->subsets * st->ffts_per_subset;
  std::vector<cplx> x(n_rx);
  for (uint32_t rx = 0; rx < n_rx; ++rx) {
    const uint32_t w0 = co_yield PEOp::load(st->bin_addr(rx, j, 0));
    const uint32_t w1 = co_yield PEOp::load(st->bin_addr(rx, j, 1));
    const uint32_t w2 = co_yield PEOp::load(st->bin_addr(rx, j, 2));
    const uint32_t w3 = co_yield PEOp::load(st->bin_addr(rx, j, 3));
    x[rx] = cplx(f64_from(w0, w1), f64_from(w2, w3));
  }
  for (uint32_t b = 0; b < st->n_beams; ++b) {
    cplx acc(0.0, 0.0);
    for (uint32_t rx = 0; rx < n_rx; ++rx) {
      const uint32_t w0 = co_yield PEOp::load(st->h_addr(h_tile, b, rx, 0));
      const uint32_t w1 = co_yield PEOp::load(st->h_addr(h_tile, b, rx, 1));
      const uint32_t w2 = co_yield PEOp::load(st->h_addr(h_tile, b, rx, 2));
      const uint32_t w3 = co_yield PEOp::load(st->h_addr(h_tile, b, rx, 3));
      co_yield PEOp::compute(kMacBudget);
      acc += cplx(f64_from(w0, w1), f64_from(w2, w3)) * x[rx];
    }
    const uint32_t base = (col_index * st->n_beams + b) * 4;
    const LocalSlab& slab = st->y_slabs[y_pe];
    co_yield PEOp::store(st->layout.word(slab, base + 0), f64_lo(acc.real()));
    co_yield PEOp::store(st->layout.word(slab, base + 1), f64_hi(acc.real()));
    co_yield PEOp::store(st->layout.word(slab, base + 2), f64_lo(acc.imag()));
    co_yield PEOp::store(st->layout.word(slab, base + 3), f64_hi(acc.imag()));
  }
}

Program fft_pe(std::shared_ptr<const FftState> st, uint32_t pe) {
  const uint32_t subset = pe / st->geo.pes_per_fft;
  const uint32_t q_local = pe % st->geo.pes_per_fft;
  const BarrierPlan& stage_plan =
      st->stage_plans[st->stage_plans.size() > 1 ? subset : 0];
  co_yield PEOp::event(EventKind::KernelStart, 0);
  uint32_t sync = 0;
  for (uint32_t r = 0; r < st->rounds; ++r) {
    for (uint32_t s = 0; s < st->geo.stages; ++s) {
      for (uint32_t f = 0; f < st->folds; ++f) {
        const uint32_t g = r * st->folds + f;
        const uint32_t fft = subset * st->ffts_per_subset + g;
        co_yield butterfly_block(st, fft, s, q_local);
      }
      co_yield barrier_program(stage_plan, pe, 100 + sync++);
    }
  }
  if (st->pipeline) {
    co_yield barrier_program(st->full_plan, pe, 99);
    const uint32_t n_pes = st->layout.topology().total_pes();
    const uint32_t tile = st->layout.topology().tile_of_pe(pe);
    uint32_t ci = 0;
    for (uint32_t j = pe; j < st->n_sc; j += n_pes, ++ci) {
      co_yield beam_column(st, tile, pe, ci, j);
    }
  }
  co_yield PEOp::event(EventKind::KernelEnd, 0);
}

// The whole pipeline on PE 0, no synchronization: the speedup baseline.
Program fft_serial(std::shared_ptr<const FftState> st) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  const uint32_t n_ffts = st->subsets * st->ffts_per_subset;
  for (uint32_t fft = 0; fft < n_ffts; ++fft) {
    for (uint32_t s = 0; s < st->geo.stages; ++s) {
      for (uint32_t q = 0; q < st->geo.pes_per_fft; ++q) {
        co_yield butterfly_block(st, fft, s, q);
      }
    }
  }
  if (st->pipeline) {
    const uint32_t n_pes = st->layout.topology().total_pes();
    for (uint32_t j = 0; j < st->n_sc; ++j) {
      co_yield beam_column(st, 0, j % n_pes, j / n_pes, j);
    }
  }
  co_yield PEOp::event(EventKind::KernelEnd, 0);
}

double rel_l2(const std::vector<cplx>& got, const std::vector<cplx>& want) {
  double num = 0.0, den = 0.0;
  for (size_t i = 0; i < got.size(); ++i) {
    num += std::norm(got[i] - want[i]);
    den += std::norm(want[i]);
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<cplx> read_spectrum(const Engine& eng, const FftState& st,
                                uint32_t fft) {
  std::vector<cplx> out(st.geo.n_points);
  for (uint32_t k = 0; k < st.geo.n_points; ++k) {
    const uint32_t w0 = eng.peek(st.bin_addr(fft, k, 0));
    const uint32_t w1 = eng.peek(st.bin_addr(fft, k, 1));
    const uint32_t w2 = eng.peek(st.bin_addr(fft, k, 2));
    const uint32_t w3 = eng.peek(st.bin_addr(fft, k, 3));
    out[k] = cplx(f64_from(w0, w1), f64_from(w2, w3));
  }
  return out;
}

void verify_spectra(const Engine& eng, const FftState& st) {
  const uint32_t n_ffts = st.subsets * st.ffts_per_subset;
  for (uint32_t fft = 0; fft < n_ffts; ++fft) {
    std::vector<cplx> want = st.inputs[fft];
    reference_fft(want);
    const std::vector<cplx> got = read_spectrum(eng, st, fft);
    const double err = rel_l2(got, want);
    if (!(err < 1e-9)) {
      mismatch("fft " + std::to_string(fft) + " spectrum error " +
               std::to_string(err));
    }
  }
}

void verify_beams(const Engine& eng, const FftState& st) {
  const uint32_t n_rx = st.subsets * st.ffts_per_subset;
  std::vector<std::vector<cplx>> spectra(n_rx);
  for (uint32_t rx = 0; rx < n_rx; ++rx) {
    spectra[rx] = st.inputs[rx];
    reference_fft(spectra[rx]);
  }
  const uint32_t n_pes = eng.topology().total_pes();
  std::vector<cplx> got, want;
  got.reserve(uint64_t(st.n_beams) * st.n_sc);
  want.reserve(got.capacity());
  for (uint32_t j = 0; j < st.n_sc; ++j) {
    const uint32_t pe = j % n_pes;
    const uint32_t ci = j / n_pes;
    for (uint32_t b = 0; b < st.n_beams; ++b) {
      const uint32_t base = (ci * st.n_beams + b) * 4;
      const LocalSlab& slab = st.y_slabs[pe];
      got.emplace_back(
          f64_from(eng.peek(st.layout.word(slab, base + 0)),
                   eng.peek(st.layout.word(slab, base + 1))),
          f64_from(eng.peek(st.layout.word(slab, base + 2)),
                   eng.peek(st.layout.word(slab, base + 3))));
      cplx acc(0.0, 0.0);
      for (uint32_t rx = 0; rx < n_rx; ++rx) {
        acc += st.h[uint64_t(b) * n_rx + rx] * spectra[rx][j];
      }
      want.push_back(acc);
    }
  }
  const double err = rel_l2(got, want);
  if (!(err < 1e-9)) {
    mismatch("pipeline output error " + std::to_string(err));
  }
}

// Capacity hint for the default machine shape (1024 PEs, 32 banks and
// 8 PEs per tile): slab words per tile spread over the tile's banks, plus
// headroom for counters and coefficient rows.
uint32_t wpb_hint(uint32_t n_ffts, uint32_t pes_per_fft, uint32_t n_beams,
                  uint32_t n_sc) {
  if (pes_per_fft == 0 || pes_per_fft > 1024 || 1024 % pes_per_fft != 0) {
    return 256;  // instantiation will report the real error
  }
  const uint32_t subsets = 1024 / pes_per_fft;
  if (n_ffts == 0 || n_ffts % subsets != 0) return 256;
  const uint64_t ffts_per_subset = n_ffts / subsets;
  const uint64_t per_pe =
      ffts_per_subset * 128 +
      (n_beams ? uint64_t((n_sc + 1023) / 1024) * n_beams * 4 : 0);
  const uint64_t h_words = uint64_t(n_beams) * n_ffts * 4;
  const uint64_t rows = (8 * per_pe + h_words) / 32 + 8;
  uint32_t wpb = 256;
  while (wpb < rows) wpb *= 2;
  return wpb;
}

}  // namespace

void reference_fft(std::vector<std::complex<double>>& a) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0) {
    fail(Errc::BadSize, "transform size must be a power of two");
  }
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / double(len);
    const cplx wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k], v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

Workload fft_batch_workload(uint32_t n_ffts, uint32_t n_points,
                            uint32_t pes_per_fft, uint32_t folds,
                            const BarrierConfig& barriers, uint64_t seed) {
  Workload w;
  w.name = "fft_batch";
  w.size_label = std::to_string(n_ffts) + "x" + std::to_string(n_points);
  w.min_words_per_bank = wpb_hint(n_ffts, pes_per_fft, 0, 0);
  auto box = std::make_shared<std::shared_ptr<const FftState>>();
  w.instantiate = [=](Engine& eng) {
    auto st = make_fft_state(eng.topology(), n_ffts, n_points, pes_per_fft,
                             folds, barriers, 0, 0, seed);
    load_fft_data(eng, *st);
    for (uint32_t pe = 0; pe < eng.topology().total_pes(); ++pe) {
      eng.submit(pe, fft_pe(st, pe));
    }
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("fft_batch ran without instantiation");
    verify_spectra(eng, *st);
  };
  return w;
}

Workload ofdm_pipeline_workload(uint32_t n_rx, uint32_t n_beams, uint32_t n_sc,
                                const BarrierConfig& barriers, uint32_t folds,
                                uint64_t seed) {
  Workload w;
  w.name = "ofdm";
  w.size_label = std::to_string(n_rx) + "rx";
  w.min_words_per_bank = wpb_hint(n_rx, n_sc / 16, n_beams, n_sc);
  auto box = std::make_shared<std::shared_ptr<const FftState>>();
  w.instantiate = [=](Engine& eng) {
    auto st = make_fft_state(eng.topology(), n_rx, n_sc, n_sc / 16, folds,
                             barriers, n_beams, n_sc, seed);
    load_fft_data(eng, *st);
    for (uint32_t pe = 0; pe < eng.topology().total_pes(); ++pe) {
      eng.submit(pe, fft_pe(st, pe));
    }
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("ofdm ran without instantiation");
    verify_beams(eng, *st);
  };
  return w;
}

Workload ofdm_serial_workload(uint32_t n_rx, uint32_t n_beams, uint32_t n_sc,
                              uint64_t seed) {
  Workload w;
  w.name = "ofdm_serial";
  w.size_label = std::to_string(n_rx) + "rx";
  w.min_words_per_bank = wpb_hint(n_rx, n_sc / 16, n_beams, n_sc);
  auto box = std::make_shared<std::shared_ptr<const FftState>>();
  w.instantiate = [=](Engine& eng) {
    auto st = make_fft_state(eng.topology(), n_rx, n_sc, n_sc / 16, 1,
                             BarrierConfig{}, n_beams, n_sc, seed);
    load_fft_data(eng, *st);
    eng.submit(0, fft_serial(st));
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("ofdm_serial ran without instantiation");
    verify_beams(eng, *st);
  };
  return w;
}

}  // namespace tilesim
