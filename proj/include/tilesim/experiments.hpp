#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tilesim/topology.hpp"
#include "tilesim/workloads.hpp"

namespace tilesim {

// The four table families the runner can produce. Each writes one CSV whose
// schema is fixed (see csv_header); every row carries its full parameter
// tuple so rows are meaningful in isolation.
enum class ExperimentKind { DelaySweep, SfrSweep, KernelBench, OfdmBench };

const char* kind_name(ExperimentKind kind);

// A kernel grid entry, e.g. "gemm:128x32x128" -> {"gemm", {128,32,128}}.
struct KernelSpec {
  std::string name;
  std::vector<uint64_t> dims;

  std::string size_label() const;
};

// Parsed from flat key=value text. Scalar keys: experiment, out, and the
// topology overrides (pes_per_tile, tiles_per_group, groups, banks_per_pe,
// words_per_bank). List keys accumulate one element per line: radix,
// max_delay, sfr, seed, kernel, n_rx, barrier, folds.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::DelaySweep;
  TopologyConfig topo;
  std::vector<uint32_t> radices;
  std::vector<uint64_t> max_delays;
  std::vector<uint64_t> sfrs;
  std::vector<uint64_t> seeds{1};
  std::vector<KernelSpec> kernels;
  std::vector<uint32_t> n_rx_list;
  std::vector<BarrierConfig> barriers;
  std::vector<uint32_t> folds_list{1};
  std::string out_name;  // defaults to "<kind>.csv"

  std::string csv_name() const;
};

// Parses config text / file. Raises ConfigParse with a line diagnostic on
// the first malformed line; load_config raises IoError if unreadable.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Barrier shorthand used in configs and CSV rows: "central", "tree<k>",
// with optional "+partial" suffix; inverse of BarrierConfig::label().
BarrierConfig parse_barrier(const std::string& text);

// Collects every violation (empty grids, non-power-of-two radices, unknown
// kernels, invalid shape combinations) without running anything. Empty
// result means the config is runnable.
std::vector<std::string> validate(const ExperimentConfig& config);

struct RunOptions {
  std::string out_dir = ".";
  unsigned parallel = 1;
  bool trace_dump = false;
};

// Runs the grid and writes "<out_dir>/<csv_name>"; returns the path.
// Deterministic: identical config and seeds produce byte-identical files.
std::string run_experiment(const ExperimentConfig& config,
                           const RunOptions& options);

// Kernel-grid dispatch ("gemm:128x32x128" etc.); raises ConfigParse for
// unknown names. Dimension-count errors surface from the constructors.
Workload make_kernel_workload(const KernelSpec& spec, uint32_t radix,
                              uint64_t seed);

// Human-readable catalogue of the workload constructors and their grid
// syntax, for the CLI.
std::string list_workloads();

}  // namespace tilesim
