// Python surface: topology queries, barrier plan summaries, workload runs
// with timing reports, and the experiment runner. Heavyweight simulation
// state stays on the C++ side; results cross as plain dicts.
#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tilesim/barriers.hpp"
#include "tilesim/engine.hpp"
#include "tilesim/errors.hpp"
#include "tilesim/experiments.hpp"
#include "tilesim/metrics.hpp"
#include "tilesim/topology.hpp"
#include "tilesim/workloads.hpp"

namespace py = pybind11;
using namespace tilesim;

namespace {

MappingMode mode_from(const std::string& name) {
  if (name == "interleaved") return MappingMode::Interleaved;
  if (name == "tile_sequential") return MappingMode::TileSequential;
  fail(Errc::ConfigParse, "mapping mode must be 'interleaved' or "
                          "'tile_sequential', got '" + name + "'");
}

const char* locality_name(LatencyClass c) {
  switch (c) {
    case LatencyClass::TileLocal: return "tile_local";
    case LatencyClass::GroupLocal: return "group_local";
    case LatencyClass::Remote: return "remote";
  }
  return "?";
}

TopologyConfig config_from_kwargs(uint32_t pes_per_tile, uint32_t tiles_per_group,
                                  uint32_t groups, uint32_t banks_per_pe,
                                  uint32_t words_per_bank) {
  TopologyConfig cfg;
  cfg.pes_per_tile = pes_per_tile;
  cfg.tiles_per_group = tiles_per_group;
  cfg.groups = groups;
  cfg.banks_per_pe = banks_per_pe;
  cfg.words_per_bank = words_per_bank;
  return cfg;
}

// Runs a fully-built workload on a machine sized for it and returns the
// timing report as a dict.
py::dict run_and_report(Workload& w, const TopologyConfig& base) {
  TopologyConfig tc = base;
  if (w.min_words_per_bank > tc.words_per_bank) {
    tc.words_per_bank = w.min_words_per_bank;
  }
  Topology topo = build_topology(tc);
  Engine eng(topo);
  w.instantiate(eng);
  eng.run(4'000'000'000ull);
  w.verify(eng);
  const RunReport rep = build_report(eng.trace());
  py::dict out;
  out["name"] = w.name;
  out["size"] = w.size_label;
  out["total_cycles"] = eng.trace().total_cycles;
  out["barrier_fraction"] = rep.barrier_fraction;
  out["mean_barrier_cycles"] = rep.mean_barrier_cycles;
  out["mean_span"] = rep.mean_span;
  py::dict spans;
  for (const auto& [id, stat] : rep.barriers) {
    spans[py::int_(id)] = stat.span;
  }
  out["barrier_spans"] = spans;
  return out;
}

py::dict plan_to_dict(const BarrierPlan& plan) {
  py::dict out;
  out["participants"] = uint32_t(plan.participants.size());
  std::vector<uint32_t> sizes;
  std::vector<size_t> counters;
  for (const auto& step : plan.steps) {
    sizes.push_back(step.group_size);
    counters.push_back(step.counters.size());
  }
  out["step_sizes"] = sizes;
  out["counters_per_step"] = counters;
  out["has_wakeup"] = plan.has_wakeup;
  if (plan.has_wakeup) {
    out["wakeup_reg"] = plan.wakeup.reg;
    out["wakeup_value"] = plan.wakeup.value;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_tilesim, m) {
  m.doc() = "hierarchical many-core barrier simulator";

  py::register_exception<SimError>(m, "SimError");

  py::class_<Topology>(m, "Topology")
      .def_property_readonly("total_pes", &Topology::total_pes)
      .def_property_readonly("total_tiles", &Topology::total_tiles)
      .def_property_readonly("total_banks", &Topology::total_banks)
      .def_property_readonly("total_words", &Topology::total_words)
      .def("bank_of",
           [](const Topology& t, const std::string& mode, uint64_t word) {
             const BankSlot s = t.bank_of(mode_from(mode), word);
             return py::make_tuple(s.bank, s.row);
           },
           py::arg("mode"), py::arg("word"))
      .def("word_of",
           [](const Topology& t, const std::string& mode, uint32_t bank,
              uint32_t row) {
             return t.word_of(mode_from(mode), BankSlot{bank, row});
           },
           py::arg("mode"), py::arg("bank"), py::arg("row"))
      .def("locality",
           [](const Topology& t, uint32_t pe, uint32_t bank) {
             return std::string(locality_name(t.locality(pe, bank)));
           },
           py::arg("pe"), py::arg("bank"))
      .def("base_latency",
           [](const Topology& t, uint32_t pe, uint32_t bank) {
             return t.base_latency(t.locality(pe, bank));
           },
           py::arg("pe"), py::arg("bank"));

  m.def("build_topology",
        [](uint32_t pes_per_tile, uint32_t tiles_per_group, uint32_t groups,
           uint32_t banks_per_pe, uint32_t words_per_bank) {
          return build_topology(config_from_kwargs(pes_per_tile, tiles_per_group,
                                                   groups, banks_per_pe,
                                                   words_per_bank));
        },
        py::arg("pes_per_tile") = 8, py::arg("tiles_per_group") = 16,
        py::arg("groups") = 8, py::arg("banks_per_pe") = 4,
        py::arg("words_per_bank") = 256);

  m.def("plan_summary",
        [](uint32_t participants, uint32_t radix) {
          Topology topo = build_topology({});
          CounterArena arena(topo);
          std::vector<uint32_t> pes(participants);
          for (uint32_t i = 0; i < participants; ++i) pes[i] = i;
          const uint32_t k = radix ? radix : participants;
          return plan_to_dict(plan_tree(topo, pes, k, arena, 1));
        },
        py::arg("participants"), py::arg("radix") = 0,
        "Arrival-tree shape for the first `participants` PEs; radix 0 means "
        "the central counter.");

  m.def("run_delay",
        [](uint64_t sfr, uint64_t max_delay, uint64_t seed, uint32_t radix) {
          Workload w = random_delay_workload(DelaySpec{sfr, max_delay, seed},
                                             radix);
          return run_and_report(w, TopologyConfig{});
        },
        py::arg("sfr"), py::arg("max_delay"), py::arg("seed"),
        py::arg("radix"),
        "Uniform per-PE start jitter into one barrier of the given radix.");

  m.def("run_kernel",
        [](const std::string& name, const std::vector<uint64_t>& dims,
           uint32_t radix, uint64_t seed) {
          Workload w = make_kernel_workload(KernelSpec{name, dims}, radix, seed);
          return run_and_report(w, TopologyConfig{});
        },
        py::arg("name"), py::arg("dims"), py::arg("radix") = 32,
        py::arg("seed") = 1,
        "Run one kernel (axpy, dotp, gemm, conv2d, dct, beamforming) and "
        "verify it against its reference before reporting timings.");

  m.def("run_ofdm",
        [](uint32_t n_rx, const std::string& barrier, uint32_t folds,
           uint64_t seed, bool serial) {
          Workload w = serial
                           ? ofdm_serial_workload(n_rx, 32, 4096, seed)
                           : ofdm_pipeline_workload(n_rx, 32, 4096,
                                                    parse_barrier(barrier),
                                                    folds, seed);
          return run_and_report(w, TopologyConfig{});
        },
        py::arg("n_rx") = 16, py::arg("barrier") = "tree32+partial",
        py::arg("folds") = 1, py::arg("seed") = 1, py::arg("serial") = false,
        "Transform batch plus beamforming pipeline; barrier is 'central' or "
        "'tree<k>' with optional '+partial'.");

  m.def("reference_fft",
        [](std::vector<std::complex<double>> data) {
          reference_fft(data);
          return data;
        },
        py::arg("data"), "Forward transform, natural-order output.");

  m.def("validate_config",
        [](const std::string& text) { return validate(parse_config(text)); },
        py::arg("text"),
        "Parse experiment config text and return the list of problems "
        "(empty means runnable).");

  m.def("run_experiment",
        [](const std::string& text, const std::string& out_dir,
           unsigned parallel) {
          RunOptions opt;
          opt.out_dir = out_dir;
          opt.parallel = parallel;
          return run_experiment(parse_config(text), opt);
        },
        py::arg("text"), py::arg("out_dir") = ".", py::arg("parallel") = 1,
        "Run an experiment grid from config text; returns the CSV path.");
}
