#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tilesim/engine.hpp"

namespace tilesim {

// Uniform per-PE start jitter ahead of a barrier: COMPUTE(sfr) of common
// work, then COMPUTE(delay) with delay ~ U[0, max_delay] drawn per PE.
struct DelaySpec {
  uint64_t sfr = 0;
  uint64_t max_delay = 0;
  uint64_t seed = 1;
};

// Barrier shape for workloads that synchronize internally (FFT stages,
// pipeline phases). radix 0 selects the central counter (k = participants);
// partial runs stage barriers over each 256-PE subset instead of the whole
// cluster.
struct BarrierConfig {
  uint32_t radix = 0;
  bool partial = false;

  std::string label() const;
};

// A self-contained benchmark: instantiate() allocates buffers and counters,
// pokes input data, and submits one program per participating PE into a
// fresh engine; verify() checks the engine's memory image against the
// workload's reference function and raises on any mismatch.
struct Workload {
  std::string name;
  std::string size_label;
  uint32_t min_words_per_bank = 0;  // 0: default capacity suffices
  std::function<void(Engine&)> instantiate;
  std::function<void(const Engine&)> verify;
};

// barrier_radix semantics for the kernel factories below: 0 = no barrier
// after the kernel body; otherwise every participating PE joins one
// arrival-tree barrier of that radix (radix = participant count gives the
// central counter).

Workload random_delay_workload(const DelaySpec& spec, uint32_t barrier_radix);

Workload axpy_workload(uint64_t n, uint32_t barrier_radix, uint64_t seed);
Workload dotp_workload(uint64_t n, uint32_t barrier_radix, uint64_t seed);
Workload gemm_workload(uint32_t m, uint32_t n, uint32_t p,
                       uint32_t barrier_radix, uint64_t seed);
Workload conv2d_workload(uint32_t height, uint32_t width,
                         uint32_t barrier_radix, uint64_t seed);
Workload dct_workload(uint64_t len, uint32_t barrier_radix, uint64_t seed);
Workload beamforming_workload(uint32_t n_beams, uint32_t n_rx, uint32_t n_sc,
                              uint32_t barrier_radix, uint64_t seed);

// FFT batch and the OFDM pipeline live in workloads_fft.cpp.
Workload fft_batch_workload(uint32_t n_ffts, uint32_t n_points,
                            uint32_t pes_per_fft, uint32_t folds,
                            const BarrierConfig& barriers, uint64_t seed);
Workload ofdm_pipeline_workload(uint32_t n_rx, uint32_t n_beams, uint32_t n_sc,
                                const BarrierConfig& barriers, uint32_t folds,
                                uint64_t seed);
// Same pipeline executed entirely by PE 0, for speedup baselines.
Workload ofdm_serial_workload(uint32_t n_rx, uint32_t n_beams, uint32_t n_sc,
                              uint64_t seed);

// In-place forward transform with natural-order output; the reference the
// transform workloads are verified against. Its own correctness is pinned
// against a direct DFT in the tests. Size must be a power of two.
void reference_fft(std::vector<std::complex<double>>& data);

}  // namespace tilesim
