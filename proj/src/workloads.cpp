#include "tilesim/workloads.hpp"

#include <memory>
#include <stdexcept>
#include <vector>

#include "tilesim/barriers.hpp"
#include "tilesim/errors.hpp"
#include "tilesim/layout.hpp"
#include "tilesim/metrics.hpp"
#include "tilesim/rng.hpp"

namespace tilesim {

std::string BarrierConfig::label() const {
  std::string s = radix ? "tree" + std::to_string(radix) : "central";
  if (partial) s += "+partial";
  return s;
}

namespace {

std::vector<uint32_t> all_pes(const Topology& topo) {
  std::vector<uint32_t> pes(topo.total_pes());
  for (uint32_t p = 0; p < pes.size(); ++p) pes[p] = p;
  return pes;
}

[[noreturn]] void mismatch(const std::string& what) {
  throw std::runtime_error("verification failed: " + what);
}

// Shared base: every kernel owns its counters, its memory map, and (when
// barrier_radix != 0) one arrival-tree plan over all PEs with id 1.
struct KernelState {
  CounterArena arena;
  Layout layout;
  BarrierPlan plan;
  bool has_barrier = false;

  KernelState(const Topology& topo, uint32_t barrier_radix)
      : arena(topo), layout(topo, arena) {
    if (barrier_radix != 0) {
      plan = plan_tree(topo, all_pes(topo), barrier_radix, arena, 1);
      has_barrier = true;
    }
  }
};

// ---------------------------------------------------------------------------
// random delay: COMPUTE(sfr) of common work, COMPUTE(delay_i) of jitter,
// then the barrier.

struct DelayState : KernelState {
  DelaySpec spec;
  std::vector<uint32_t> delays;

  DelayState(const Topology& topo, const DelaySpec& s, uint32_t radix)
      : KernelState(topo, radix), spec(s) {
    SplitMix64 rng(s.seed);
    delays.resize(topo.total_pes());
    for (auto& d : delays) d = static_cast<uint32_t>(rng.up_to(s.max_delay));
  }
};

Program delay_pe(std::shared_ptr<const DelayState> st, uint32_t pe) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  co_yield PEOp::compute(static_cast<uint32_t>(st->spec.sfr));
  co_yield PEOp::compute(st->delays[pe]);
  co_yield PEOp::event(EventKind::KernelEnd, 0);
  if (st->has_barrier) co_yield barrier_program(st->plan, pe);
}

// ---------------------------------------------------------------------------
// AXPY / DOTP: per-PE chunks in local tile slabs; every access TILE_LOCAL.
// The chunks of a tile's PEs are packed into one slab interleaved by PE
// index, so PEs walking their chunks in lockstep always touch distinct
// banks and never queue behind each other.

struct StripedChunks {
  std::vector<LocalSlab> slabs;  // one per tile
  uint32_t ppt = 0;
  uint64_t chunk = 0;

  void allocate(Layout& layout, const Topology& topo, uint64_t chunk_) {
    ppt = topo.pes_per_tile();
    chunk = chunk_;
    slabs.clear();
    for (uint32_t t = 0; t < topo.total_tiles(); ++t) {
      slabs.push_back(layout.alloc_local(t, static_cast<uint32_t>(chunk * ppt)));
    }
  }
  uint32_t addr(const Layout& layout, uint32_t pe, uint64_t i) const {
    return layout.word(slabs[pe / ppt],
                       static_cast<uint32_t>(i * ppt + pe % ppt));
  }
};

struct AxpyState : KernelState {
  uint64_t chunk;
  uint32_t a;
  StripedChunks xs, ys;
  std::vector<uint32_t> y_expect;  // host reference, chunk-major per PE

  AxpyState(const Topology& topo, uint64_t n, uint32_t radix, uint64_t seed)
      : KernelState(topo, radix) {
    const uint32_t n_pes = topo.total_pes();
    if (n == 0 || n % n_pes != 0) {
      fail(Errc::IndivisibleSize, "axpy length " + std::to_string(n) +
                                      " not divisible by " +
                                      std::to_string(n_pes) + " PEs");
    }
    chunk = n / n_pes;
    SplitMix64 rng(seed);
    a = static_cast<uint32_t>(rng.below(256));
    xs.allocate(layout, topo, chunk);
    ys.allocate(layout, topo, chunk);
    y_expect.resize(n);
  }
};

Program axpy_pe(std::shared_ptr<const AxpyState> st, uint32_t pe) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  for (uint64_t i = 0; i < st->chunk; ++i) {
    const uint32_t ya = st->ys.addr(st->layout, pe, i);
    const uint32_t x = co_yield PEOp::load(st->xs.addr(st->layout, pe, i));
    const uint32_t y = co_yield PEOp::load(ya);
    co_yield PEOp::compute(1);
    co_yield PEOp::store(ya, st->a * x + y);
  }
  co_yield PEOp::event(EventKind::KernelEnd, 0);
  if (st->has_barrier) co_yield barrier_program(st->plan, pe);
}

struct DotpState : KernelState {
  uint64_t chunk;
  StripedChunks xs, ys;
  uint32_t result_addr;
  uint32_t expect = 0;

  DotpState(const Topology& topo, uint64_t n, uint32_t radix, uint64_t seed)
      : KernelState(topo, radix) {
    const uint32_t n_pes = topo.total_pes();
    if (n == 0 || n % n_pes != 0) {
      fail(Errc::IndivisibleSize, "dotp length " + std::to_string(n) +
                                      " not divisible by " +
                                      std::to_string(n_pes) + " PEs");
    }
    chunk = n / n_pes;
    result_addr = arena.alloc();  // shared word, clear of every data slab
    (void)seed;
    xs.allocate(layout, topo, chunk);
    ys.allocate(layout, topo, chunk);
  }
};

Program dotp_pe(std::shared_ptr<const DotpState> st, uint32_t pe) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  uint32_t sum = 0;
  for (uint64_t i = 0; i < st->chunk; ++i) {
    const uint32_t x = co_yield PEOp::load(st->xs.addr(st->layout, pe, i));
    const uint32_t y = co_yield PEOp::load(st->ys.addr(st->layout, pe, i));
    co_yield PEOp::compute(1);
    sum += x * y;
  }
  co_yield PEOp::amo_add(st->result_addr, sum);
  co_yield PEOp::event(EventKind::KernelEnd, 0);
  if (st->has_barrier) co_yield barrier_program(st->plan, pe);
}

// ---------------------------------------------------------------------------
// GEMM: interleaved row-major buffers, output elements round-robin over PEs.

struct GemmState : KernelState {
  uint32_t m, n, p;
  RowBuffer a, b, c;
  std::vector<uint32_t> c_expect;

  GemmState(const Topology& topo, uint32_t m_, uint32_t n_, uint32_t p_,
            uint32_t radix, uint64_t seed)
      : KernelState(topo, radix), m(m_), n(n_), p(p_) {
    if (uint64_t(m) * p < topo.total_pes()) {
      fail(Errc::TooFewElements,
           "gemm output " + std::to_string(m) + "x" + std::to_string(p) +
               " smaller than the PE count");
    }
    if (m == 0 || n == 0 || p == 0) fail(Errc::ZeroCount, "empty gemm");
    a = layout.alloc_rows(uint64_t(m) * n);
    b = layout.alloc_rows(uint64_t(n) * p);
    c = layout.alloc_rows(uint64_t(m) * p);
    (void)seed;
    c_expect.assign(uint64_t(m) * p, 0);
  }
};

Program gemm_pe(std::shared_ptr<const GemmState> st, uint32_t pe,
                uint32_t n_pes) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  const uint64_t total = uint64_t(st->m) * st->p;
  for (uint64_t o = pe; o < total; o += n_pes) {
    const uint32_t i = static_cast<uint32_t>(o / st->p);
    const uint32_t j = static_cast<uint32_t>(o % st->p);
    uint32_t acc = 0;
    for (uint32_t k = 0; k < st->n; ++k) {
      const uint32_t av = co_yield PEOp::load(st->a.addr(uint64_t(i) * st->n + k));
      const uint32_t bv = co_yield PEOp::load(st->b.addr(uint64_t(k) * st->p + j));
      co_yield PEOp::compute(1);
      acc += av * bv;
    }
    co_yield PEOp::store(st->c.addr(o), acc);
  }
  co_yield PEOp::event(EventKind::KernelEnd, 0);
  if (st->has_barrier) co_yield barrier_program(st->plan, pe);
}

// ---------------------------------------------------------------------------
// Conv2D 3x3, zero padding. Pixels are split into contiguous row-major
// ranges. Each PE's in-image taps are staged into a local slab in
// consumption order (an im2col gather), so the load stream is tile-local
// and the runtime differences between PEs come from the tap counts alone:
// out-of-image taps are skipped outright, which is what puts the PEs that
// own border rows far ahead of the pack.

constexpr int32_t kConvKernel[3][3] = {{1, 2, 1}, {2, 4, 2}, {1, 2, 1}};

struct ConvJob {
  uint32_t out_index;   // slot in the PE's output slab
  uint32_t first_tap;   // slot of the first staged tap
  uint32_t n_taps;
};

struct ConvState : KernelState {
  uint32_t height, width;
  std::vector<LocalSlab> tap_slabs, out_slabs;
  std::vector<std::vector<ConvJob>> jobs;        // per PE
  std::vector<std::vector<uint32_t>> tap_coeff;  // per PE, per staged tap
  std::vector<std::vector<uint32_t>> tap_value;  // per PE, poked at startup
  std::vector<uint32_t> out_expect;              // row-major image
  std::vector<std::vector<uint64_t>> pixels;     // per-PE output pixel ids

  ConvState(const Topology& topo, uint32_t h, uint32_t w, uint32_t radix,
            uint64_t seed)
      : KernelState(topo, radix), height(h), width(w) {
    const uint32_t n_pes = topo.total_pes();
    const uint64_t total = uint64_t(h) * w;
    if (total < n_pes) {
      fail(Errc::TooFewElements, "conv2d image smaller than the PE count");
    }
    SplitMix64 rng(seed);
    std::vector<uint32_t> image(total);
    for (auto& v : image) v = static_cast<uint32_t>(rng.below(256));

    // Reference: direct zero-padded convolution.
    out_expect.assign(total, 0);
    for (uint32_t r = 0; r < h; ++r) {
      for (uint32_t c = 0; c < w; ++c) {
        uint32_t acc = 0;
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int64_t rr = int64_t(r) + dr, cc = int64_t(c) + dc;
            if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
            acc += image[rr * w + cc] *
                   static_cast<uint32_t>(kConvKernel[dr + 1][dc + 1]);
          }
        }
        out_expect[uint64_t(r) * w + c] = acc;
      }
    }

    // The zero-padded ring goes to a dedicated eighth of the cluster; its
    // pixels shortcut the out-of-image taps, so that cohort finishes far
    // ahead of the rest. The predominant interior pixels are split into
    // contiguous row-major runs over the remaining PEs.
    const uint32_t border_pes = std::max(1u, n_pes / 8);
    const uint32_t inner_pes = n_pes - border_pes;
    std::vector<uint64_t> ring, inner;
    for (uint64_t px = 0; px < total; ++px) {
      const uint32_t r = static_cast<uint32_t>(px / w);
      const uint32_t c = static_cast<uint32_t>(px % w);
      const bool edge = r == 0 || r + 1 == h || c == 0 || c + 1 == w;
      (edge ? ring : inner).push_back(px);
    }
    pixels.resize(n_pes);
    auto deal = [this](const std::vector<uint64_t>& src, uint32_t first,
                       uint32_t count) {
      const size_t base = src.size() / count, rem = src.size() % count;
      size_t cursor = 0;
      for (uint32_t i = 0; i < count; ++i) {
        const size_t take = base + (i < rem ? 1 : 0);
        auto& dst = pixels[first + i];
        dst.insert(dst.end(), src.begin() + cursor,
                   src.begin() + cursor + take);
        cursor += take;
      }
    };
    deal(ring, 0, border_pes);
    deal(inner, inner_pes ? border_pes : 0, inner_pes ? inner_pes : border_pes);

    jobs.resize(n_pes);
    tap_coeff.resize(n_pes);
    tap_value.resize(n_pes);
    for (uint32_t p = 0; p < n_pes; ++p) {
      for (size_t i = 0; i < pixels[p].size(); ++i) {
        const uint64_t px = pixels[p][i];
        const uint32_t r = static_cast<uint32_t>(px / w);
        const uint32_t c = static_cast<uint32_t>(px % w);
        ConvJob job{static_cast<uint32_t>(i),
                    static_cast<uint32_t>(tap_value[p].size()), 0};
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int64_t rr = int64_t(r) + dr, cc = int64_t(c) + dc;
            if (rr < 0 || rr >= height || cc < 0 || cc >= width) continue;
            tap_value[p].push_back(image[rr * w + cc]);
            tap_coeff[p].push_back(
                static_cast<uint32_t>(kConvKernel[dr + 1][dc + 1]));
            ++job.n_taps;
          }
        }
        jobs[p].push_back(job);
      }
    }
    // Idle PEs (a ring smaller than its cohort) still get a placeholder word.
    for (uint32_t p = 0; p < n_pes; ++p) {
      tap_slabs.push_back(layout.alloc_pe_local(
          p, std::max<uint32_t>(1, static_cast<uint32_t>(tap_value[p].size()))));
    }
    for (uint32_t p = 0; p < n_pes; ++p) {
      out_slabs.push_back(layout.alloc_pe_local(
          p, std::max<uint32_t>(1, static_cast<uint32_t>(jobs[p].size()))));
    }
  }
};

Program conv_pe(std::shared_ptr<const ConvState> st, uint32_t pe) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  for (const ConvJob& job : st->jobs[pe]) {
    uint32_t acc = 0;
    for (uint32_t t = job.first_tap; t < job.first_tap + job.n_taps; ++t) {
      const uint32_t v =
          co_yield PEOp::load(st->layout.word(st->tap_slabs[pe], t));
      co_yield PEOp::compute(2);
      acc += v * st->tap_coeff[pe][t];
    }
    co_yield PEOp::store(st->layout.word(st->out_slabs[pe], job.out_index),
                         acc);
  }
  co_yield PEOp::event(EventKind::KernelEnd, 0);
  if (st->has_barrier) co_yield barrier_program(st->plan, pe);
}

// ---------------------------------------------------------------------------
// DCT on 2x2 blocks. A block [a b; c d] stored as four consecutive words
// transforms in place to the four scaled 2D DCT-II coefficients
//   [a+b+c+d, a-b+c-d; a+b-c-d, a-b-c+d].
// Blocks go round-robin over PEs; with word-interleaved addressing block
// p + j*N_PE occupies banks 4p..4p+3, i.e. PE p's own tile, for every j.

struct DctState : KernelState {
  uint64_t blocks_per_pe;
  RowBuffer data;
  std::vector<uint32_t> expect;

  DctState(const Topology& topo, uint64_t len, uint32_t radix, uint64_t seed)
      : KernelState(topo, radix) {
    const uint32_t n_pes = topo.total_pes();
    if (len == 0 || len % (uint64_t(4) * n_pes) != 0) {
      fail(Errc::IndivisibleSize, "dct length " + std::to_string(len) +
                                      " not divisible by 4x" +
                                      std::to_string(n_pes));
    }
    blocks_per_pe = len / 4 / n_pes;
    data = layout.alloc_rows(len);
    (void)seed;
    expect.resize(len);
  }
};

Program dct_pe(std::shared_ptr<const DctState> st, uint32_t pe,
               uint32_t n_pes) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  for (uint64_t j = 0; j < st->blocks_per_pe; ++j) {
    const uint64_t block = pe + j * n_pes;
    const uint32_t a = co_yield PEOp::load(st->data.addr(4 * block + 0));
    const uint32_t b = co_yield PEOp::load(st->data.addr(4 * block + 1));
    const uint32_t c = co_yield PEOp::load(st->data.addr(4 * block + 2));
    const uint32_t d = co_yield PEOp::load(st->data.addr(4 * block + 3));
    co_yield PEOp::compute(8);
    co_yield PEOp::store(st->data.addr(4 * block + 0), a + b + c + d);
    co_yield PEOp::store(st->data.addr(4 * block + 1), a - b + c - d);
    co_yield PEOp::store(st->data.addr(4 * block + 2), a + b - c - d);
    co_yield PEOp::store(st->data.addr(4 * block + 3), a - b - c + d);
  }
  co_yield PEOp::event(EventKind::KernelEnd, 0);
  if (st->has_barrier) co_yield barrier_program(st->plan, pe);
}

// ---------------------------------------------------------------------------
// Beamforming (integer standalone): C(n_beams x n_sc) = A x B with output
// columns distributed round-robin over PEs.

struct BeamState : KernelState {
  uint32_t nb, nrx, nsc;
  RowBuffer a, b, c;
  std::vector<uint32_t> c_expect;

  BeamState(const Topology& topo, uint32_t nb_, uint32_t nrx_, uint32_t nsc_,
            uint32_t radix, uint64_t seed)
      : KernelState(topo, radix), nb(nb_), nrx(nrx_), nsc(nsc_) {
    if (uint64_t(nb) * nsc < topo.total_pes()) {
      fail(Errc::TooFewElements, "beamforming output smaller than PE count");
    }
    if (nb == 0 || nrx == 0 || nsc == 0) fail(Errc::ZeroCount, "empty gemm");
    a = layout.alloc_rows(uint64_t(nb) * nrx);
    b = layout.alloc_rows(uint64_t(nrx) * nsc);
    c = layout.alloc_rows(uint64_t(nb) * nsc);
    (void)seed;
    c_expect.assign(uint64_t(nb) * nsc, 0);
  }
};

Program beam_pe(std::shared_ptr<const BeamState> st, uint32_t pe,
                uint32_t n_pes) {
  co_yield PEOp::event(EventKind::KernelStart, 0);
  for (uint32_t j = pe; j < st->nsc; j += n_pes) {
    for (uint32_t i = 0; i < st->nb; ++i) {
      uint32_t acc = 0;
      for (uint32_t k = 0; k < st->nrx; ++k) {
        const uint32_t av =
            co_yield PEOp::load(st->a.addr(uint64_t(i) * st->nrx + k));
        const uint32_t bv =
            co_yield PEOp::load(st->b.addr(uint64_t(k) * st->nsc + j));
        co_yield PEOp::compute(1);
        acc += av * bv;
      }
      co_yield PEOp::store(st->c.addr(uint64_t(i) * st->nsc + j), acc);
    }
  }
  co_yield PEOp::event(EventKind::KernelEnd, 0);
  if (st->has_barrier) co_yield barrier_program(st->plan, pe);
}

}  // namespace

// ---------------------------------------------------------------------------
// Factories.

Workload random_delay_workload(const DelaySpec& spec, uint32_t barrier_radix) {
  Workload w;
  w.name = "random_delay";
  w.size_label = std::to_string(spec.max_delay);
  w.instantiate = [spec, barrier_radix](Engine& eng) {
    auto st = std::make_shared<DelayState>(eng.topology(), spec, barrier_radix);
    for (uint32_t p = 0; p < eng.topology().total_pes(); ++p) {
      eng.submit(p, delay_pe(st, p));
    }
  };
  w.verify = [](const Engine&) {};  // timing-only workload
  return w;
}

Workload axpy_workload(uint64_t n, uint32_t barrier_radix, uint64_t seed) {
  Workload w;
  w.name = "axpy";
  w.size_label = std::to_string(n);
  auto box = std::make_shared<std::shared_ptr<const AxpyState>>();
  w.instantiate = [=](Engine& eng) {
    const Topology& topo = eng.topology();
    auto st = std::make_shared<AxpyState>(topo, n, barrier_radix, seed);
    SplitMix64 rng(seed + 1);
    for (uint32_t p = 0; p < topo.total_pes(); ++p) {
      for (uint32_t i = 0; i < st->chunk; ++i) {
        const uint32_t x = static_cast<uint32_t>(rng.below(256));
        const uint32_t y = static_cast<uint32_t>(rng.below(256));
        eng.poke(st->xs.addr(st->layout, p, i), x);
        eng.poke(st->ys.addr(st->layout, p, i), y);
        st->y_expect[uint64_t(p) * st->chunk + i] = st->a * x + y;
      }
    }
    for (uint32_t p = 0; p < topo.total_pes(); ++p) eng.submit(p, axpy_pe(st, p));
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("axpy ran without instantiation");
    for (uint32_t p = 0; p < eng.topology().total_pes(); ++p) {
      for (uint32_t i = 0; i < st->chunk; ++i) {
        const uint32_t got = eng.peek(st->ys.addr(st->layout, p, i));
        if (got != st->y_expect[uint64_t(p) * st->chunk + i]) {
          mismatch("axpy y[" + std::to_string(p) + "," + std::to_string(i) +
                   "] = " + std::to_string(got));
        }
      }
    }
  };
  return w;
}

Workload dotp_workload(uint64_t n, uint32_t barrier_radix, uint64_t seed) {
  Workload w;
  w.name = "dotp";
  w.size_label = std::to_string(n);
  auto box = std::make_shared<std::shared_ptr<const DotpState>>();
  w.instantiate = [=](Engine& eng) {
    const Topology& topo = eng.topology();
    auto st = std::make_shared<DotpState>(topo, n, barrier_radix, seed);
    SplitMix64 rng(seed + 1);
    uint32_t expect = 0;
    for (uint32_t p = 0; p < topo.total_pes(); ++p) {
      for (uint32_t i = 0; i < st->chunk; ++i) {
        const uint32_t x = static_cast<uint32_t>(rng.below(256));
        const uint32_t y = static_cast<uint32_t>(rng.below(256));
        eng.poke(st->xs.addr(st->layout, p, i), x);
        eng.poke(st->ys.addr(st->layout, p, i), y);
        expect += x * y;
      }
    }
    st->expect = expect;
    for (uint32_t p = 0; p < topo.total_pes(); ++p) eng.submit(p, dotp_pe(st, p));
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("dotp ran without instantiation");
    const uint32_t got = eng.peek(st->result_addr);
    if (got != st->expect) {
      mismatch("dotp result " + std::to_string(got) + " != " +
               std::to_string(st->expect));
    }
  };
  return w;
}

Workload gemm_workload(uint32_t m, uint32_t n, uint32_t p,
                       uint32_t barrier_radix, uint64_t seed) {
  Workload w;
  w.name = "gemm";
  w.size_label = std::to_string(m) + "x" + std::to_string(n) + "x" +
                 std::to_string(p);
  auto box = std::make_shared<std::shared_ptr<const GemmState>>();
  w.instantiate = [=](Engine& eng) {
    const Topology& topo = eng.topology();
    auto st = std::make_shared<GemmState>(topo, m, n, p, barrier_radix, seed);
    SplitMix64 rng(seed + 1);
    std::vector<uint32_t> a(uint64_t(m) * n), b(uint64_t(n) * p);
    for (auto& v : a) v = static_cast<uint32_t>(rng.below(256));
    for (auto& v : b) v = static_cast<uint32_t>(rng.below(256));
    for (uint64_t i = 0; i < a.size(); ++i) eng.poke(st->a.addr(i), a[i]);
    for (uint64_t i = 0; i < b.size(); ++i) eng.poke(st->b.addr(i), b[i]);
    for (uint32_t i = 0; i < m; ++i) {
      for (uint32_t j = 0; j < p; ++j) {
        uint32_t acc = 0;
        for (uint32_t k = 0; k < n; ++k) {
          acc += a[uint64_t(i) * n + k] * b[uint64_t(k) * p + j];
        }
        st->c_expect[uint64_t(i) * p + j] = acc;
      }
    }
    const uint32_t n_pes = topo.total_pes();
    for (uint32_t q = 0; q < n_pes; ++q) eng.submit(q, gemm_pe(st, q, n_pes));
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("gemm ran without instantiation");
    for (uint64_t o = 0; o < st->c_expect.size(); ++o) {
      const uint32_t got = eng.peek(st->c.addr(o));
      if (got != st->c_expect[o]) {
        mismatch("gemm c[" + std::to_string(o) + "] = " + std::to_string(got) +
                 " != " + std::to_string(st->c_expect[o]));
      }
    }
  };
  return w;
}

Workload conv2d_workload(uint32_t height, uint32_t width,
                         uint32_t barrier_radix, uint64_t seed) {
  Workload w;
  w.name = "conv2d";
  w.size_label = std::to_string(height) + "x" + std::to_string(width);
  auto box = std::make_shared<std::shared_ptr<const ConvState>>();
  w.instantiate = [=](Engine& eng) {
    const Topology& topo = eng.topology();
    auto st =
        std::make_shared<ConvState>(topo, height, width, barrier_radix, seed);
    for (uint32_t p = 0; p < topo.total_pes(); ++p) {
      for (uint32_t t = 0; t < st->tap_value[p].size(); ++t) {
        eng.poke(st->layout.word(st->tap_slabs[p], t), st->tap_value[p][t]);
      }
    }
    for (uint32_t p = 0; p < topo.total_pes(); ++p) eng.submit(p, conv_pe(st, p));
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("conv2d ran without instantiation");
    for (uint32_t p = 0; p < eng.topology().total_pes(); ++p) {
      for (size_t i = 0; i < st->pixels[p].size(); ++i) {
        const uint64_t px = st->pixels[p][i];
        const uint32_t got = eng.peek(
            st->layout.word(st->out_slabs[p], static_cast<uint32_t>(i)));
        if (got != st->out_expect[px]) {
          mismatch("conv2d out[" + std::to_string(px) + "] = " +
                   std::to_string(got) + " != " +
                   std::to_string(st->out_expect[px]));
        }
      }
    }
  };
  return w;
}

Workload dct_workload(uint64_t len, uint32_t barrier_radix, uint64_t seed) {
  Workload w;
  w.name = "dct";
  w.size_label = std::to_string(len);
  auto box = std::make_shared<std::shared_ptr<const DctState>>();
  w.instantiate = [=](Engine& eng) {
    const Topology& topo = eng.topology();
    auto st = std::make_shared<DctState>(topo, len, barrier_radix, seed);
    SplitMix64 rng(seed + 1);
    std::vector<uint32_t> input(len);
    for (auto& v : input) v = static_cast<uint32_t>(rng.below(256));
    for (uint64_t i = 0; i < len; ++i) eng.poke(st->data.addr(i), input[i]);
    for (uint64_t blk = 0; blk < len / 4; ++blk) {
      const uint32_t a = input[4 * blk + 0], b = input[4 * blk + 1];
      const uint32_t c = input[4 * blk + 2], d = input[4 * blk + 3];
      st->expect[4 * blk + 0] = a + b + c + d;
      st->expect[4 * blk + 1] = a - b + c - d;
      st->expect[4 * blk + 2] = a + b - c - d;
      st->expect[4 * blk + 3] = a - b - c + d;
    }
    const uint32_t n_pes = topo.total_pes();
    for (uint32_t p = 0; p < n_pes; ++p) eng.submit(p, dct_pe(st, p, n_pes));
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("dct ran without instantiation");
    for (uint64_t i = 0; i < st->expect.size(); ++i) {
      const uint32_t got = eng.peek(st->data.addr(i));
      if (got != st->expect[i]) {
        mismatch("dct out[" + std::to_string(i) + "] = " +
                 std::to_string(got) + " != " + std::to_string(st->expect[i]));
      }
    }
  };
  return w;
}

Workload beamforming_workload(uint32_t n_beams, uint32_t n_rx, uint32_t n_sc,
                              uint32_t barrier_radix, uint64_t seed) {
  Workload w;
  w.name = "beamforming";
  w.size_label = std::to_string(n_beams) + "x" + std::to_string(n_rx) + "x" +
                 std::to_string(n_sc);
  auto box = std::make_shared<std::shared_ptr<const BeamState>>();
  w.instantiate = [=](Engine& eng) {
    const Topology& topo = eng.topology();
    auto st = std::make_shared<BeamState>(topo, n_beams, n_rx, n_sc,
                                          barrier_radix, seed);
    SplitMix64 rng(seed + 1);
    std::vector<uint32_t> a(uint64_t(n_beams) * n_rx),
        b(uint64_t(n_rx) * n_sc);
    for (auto& v : a) v = static_cast<uint32_t>(rng.below(256));
    for (auto& v : b) v = static_cast<uint32_t>(rng.below(256));
    for (uint64_t i = 0; i < a.size(); ++i) eng.poke(st->a.addr(i), a[i]);
    for (uint64_t i = 0; i < b.size(); ++i) eng.poke(st->b.addr(i), b[i]);
    for (uint32_t i = 0; i < n_beams; ++i) {
      for (uint32_t j = 0; j < n_sc; ++j) {
        uint32_t acc = 0;
        for (uint32_t k = 0; k < n_rx; ++k) {
          acc += a[uint64_t(i) * n_rx + k] * b[uint64_t(k) * n_sc + j];
        }
        st->c_expect[uint64_t(i) * n_sc + j] = acc;
      }
    }
    const uint32_t n_pes = topo.total_pes();
    for (uint32_t q = 0; q < n_pes; ++q) eng.submit(q, beam_pe(st, q, n_pes));
    *box = st;
  };
  w.verify = [box](const Engine& eng) {
    const auto st = *box;
    if (!st) mismatch("beamforming ran without instantiation");
    for (uint64_t o = 0; o < st->c_expect.size(); ++o) {
      const uint32_t got = eng.peek(st->c.addr(o));
      if (got != st->c_expect[o]) {
        mismatch("beamforming c[" + std::to_string(o) + "] = " +
                 std::to_string(got));
      }
    }
  };
  return w;
}

}  // namespace tilesim
