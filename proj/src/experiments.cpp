#include "tilesim/experiments.hpp"

#include <atomic>
#include <cctype>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <map>
#include <sstream>
#include <thread>

#include "tilesim/engine.hpp"
#include "tilesim/errors.hpp"
#include "tilesim/metrics.hpp"
#include "tilesim/trace.hpp"

namespace tilesim {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace((unsigned char)s[a])) ++a;
  while (b > a && std::isspace((unsigned char)s[b - 1])) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void parse_fail(size_t line, const std::string& msg) {
  fail(Errc::ConfigParse, "line " + std::to_string(line) + ": " + msg);
}

uint64_t parse_u64(const std::string& text, size_t line, const char* key) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    parse_fail(line, std::string(key) + " expects a non-negative integer, got '" +
                         text + "'");
  }
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
  if (errno != 0) parse_fail(line, std::string(key) + " out of range");
  return v;
}

std::vector<uint64_t> parse_dims(const std::string& text, size_t line) {
  std::vector<uint64_t> dims;
  std::string cur;
  for (char c : text + "x") {
    if (c == 'x') {
      dims.push_back(parse_u64(cur, line, "kernel dimension"));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return dims;
}

// name -> expected dimension count for the kernel grid.
struct KernelInfo {
  const char* name;
  size_t dims;
  const char* syntax;
};
constexpr KernelInfo kKernels[] = {
    {"axpy", 1, "axpy:<n>"},
    {"dotp", 1, "dotp:<n>"},
    {"gemm", 3, "gemm:<m>x<n>x<p>"},
    {"conv2d", 2, "conv2d:<height>x<width>"},
    {"dct", 1, "dct:<len>"},
    {"beamforming", 3, "beamforming:<beams>x<rx>x<subcarriers>"},
};

const KernelInfo* find_kernel(const std::string& name) {
  for (const auto& k : kKernels) {
    if (name == k.name) return &k;
  }
  return nullptr;
}

struct CellResult {
  uint64_t cycles = 0;
  uint64_t span = 0;
  double fraction = 0.0;
  double avg_barrier_cycles = 0.0;
};

// Builds a fresh machine sized for the workload, runs it to completion, and
// verifies the functional output before reporting any timing.
CellResult run_cell(const TopologyConfig& base, Workload& w, const RunOptions& opt,
                    const std::string& trace_tag) {
  TopologyConfig tc = base;
  if (w.min_words_per_bank > tc.words_per_bank) {
    tc.words_per_bank = w.min_words_per_bank;
  }
  Topology topo = build_topology(tc);
  Engine eng(topo);
  w.instantiate(eng);
  eng.run(4'000'000'000ull);
  w.verify(eng);
  if (opt.trace_dump) {
    std::ofstream os(opt.out_dir + "/" + trace_tag + ".trace.csv");
    if (!os) fail(Errc::IoError, "cannot write trace " + trace_tag);
    dump_trace_csv(eng.trace(), os);
  }
  CellResult r;
  r.cycles = eng.trace().total_cycles;
  const RunReport rep = build_report(eng.trace());
  r.fraction = rep.barrier_fraction;
  r.avg_barrier_cycles = rep.mean_barrier_cycles;
  for (const auto& [id, stat] : rep.barriers) {
    r.span = std::max(r.span, stat.span);
  }
  return r;
}

}  // namespace

Workload make_kernel_workload(const KernelSpec& spec, uint32_t radix,
                              uint64_t seed) {
  const auto& d = spec.dims;
  const KernelInfo* info = find_kernel(spec.name);
  if (!info) fail(Errc::ConfigParse, "unknown kernel '" + spec.name + "'");
  if (d.size() != info->dims) {
    fail(Errc::ConfigParse, "kernel '" + spec.name + "' expects " + info->syntax);
  }
  if (spec.name == "axpy") return axpy_workload(d[0], radix, seed);
  if (spec.name == "dotp") return dotp_workload(d[0], radix, seed);
  if (spec.name == "gemm") {
    return gemm_workload(uint32_t(d[0]), uint32_t(d[1]), uint32_t(d[2]), radix,
                         seed);
  }
  if (spec.name == "conv2d") {
    return conv2d_workload(uint32_t(d[0]), uint32_t(d[1]), radix, seed);
  }
  if (spec.name == "dct") return dct_workload(d[0], radix, seed);
  if (spec.name == "beamforming") {
    return beamforming_workload(uint32_t(d[0]), uint32_t(d[1]), uint32_t(d[2]),
                                radix, seed);
  }
  fail(Errc::ConfigParse, "unknown kernel '" + spec.name + "'");
}

namespace {

// Runs `cells` row jobs, each writing its own slot, across `parallel`
// threads. Row order (and therefore file bytes) is independent of the
// thread count.
void run_rows(std::vector<std::function<void()>>& cells, unsigned parallel) {
  if (parallel <= 1 || cells.size() <= 1) {
    for (auto& c : cells) c();
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  auto worker = [&] {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      try {
        cells[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = std::min<unsigned>(parallel, (unsigned)cells.size());
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt_row(const char* format, ...) {
  char buf[256];
  va_list args;
  va_start(args, format);
  vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

void write_csv(const std::string& path, const char* header,
               const std::vector<std::string>& rows) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(Errc::IoError, "cannot open '" + path + "' for writing");
  os << header << '\n';
  for (const auto& r : rows) os << r << '\n';
  if (!os) fail(Errc::IoError, "short write to '" + path + "'");
}

}  // namespace

const char* kind_name(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::DelaySweep: return "delay_sweep";
    case ExperimentKind::SfrSweep: return "sfr_sweep";
    case ExperimentKind::KernelBench: return "kernel_bench";
    case ExperimentKind::OfdmBench: return "ofdm_bench";
  }
  return "?";
}

std::string KernelSpec::size_label() const {
  std::string s;
  for (size_t i = 0; i < dims.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(dims[i]);
  }
  return s;
}

std::string ExperimentConfig::csv_name() const {
  return out_name.empty() ? std::string(kind_name(kind)) + ".csv" : out_name;
}

BarrierConfig parse_barrier(const std::string& text) {
  std::string body = text;
  BarrierConfig bc;
  const size_t plus = body.find('+');
  if (plus != std::string::npos) {
    const std::string suffix = body.substr(plus + 1);
    if (suffix != "partial") {
      fail(Errc::ConfigParse, "unknown barrier suffix '" + suffix + "'");
    }
    bc.partial = true;
    body = body.substr(0, plus);
  }
  if (body == "central") {
    bc.radix = 0;
  } else if (body.rfind("tree", 0) == 0 && body.size() > 4 &&
             body.find_first_not_of("0123456789", 4) == std::string::npos) {
    bc.radix = uint32_t(std::strtoul(body.c_str() + 4, nullptr, 10));
  } else {
    fail(Errc::ConfigParse,
         "barrier must be 'central' or 'tree<k>', optionally '+partial'; got '" +
             text + "'");
  }
  return bc;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  bool have_kind = false, have_seed = false, have_folds = false;
  std::map<std::string, size_t> scalar_seen;
  std::istringstream is(text);
  std::string raw;
  size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = trim(raw);
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) parse_fail(line_no, "expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) parse_fail(line_no, "empty key");
    if (value.empty()) parse_fail(line_no, "empty value for '" + key + "'");

    auto scalar_once = [&](const char* k) {
      const auto [it, fresh] = scalar_seen.emplace(k, line_no);
      if (!fresh) {
        parse_fail(line_no, std::string("duplicate '") + k +
                                "' (first set on line " +
                                std::to_string(it->second) + ")");
      }
    };

    if (key == "experiment") {
      scalar_once("experiment");
      if (value == "delay_sweep") cfg.kind = ExperimentKind::DelaySweep;
      else if (value == "sfr_sweep") cfg.kind = ExperimentKind::SfrSweep;
      else if (value == "kernel_bench") cfg.kind = ExperimentKind::KernelBench;
      else if (value == "ofdm_bench") cfg.kind = ExperimentKind::OfdmBench;
      else parse_fail(line_no, "unknown experiment '" + value + "'");
      have_kind = true;
    } else if (key == "out") {
      scalar_once("out");
      cfg.out_name = value;
    } else if (key == "pes_per_tile" || key == "tiles_per_group" ||
               key == "groups" || key == "banks_per_pe" ||
               key == "words_per_bank") {
      scalar_once(key.c_str());
      const uint64_t v = parse_u64(value, line_no, key.c_str());
      if (v == 0 || v > UINT32_MAX) parse_fail(line_no, key + " out of range");
      if (key == "pes_per_tile") cfg.topo.pes_per_tile = uint32_t(v);
      else if (key == "tiles_per_group") cfg.topo.tiles_per_group = uint32_t(v);
      else if (key == "groups") cfg.topo.groups = uint32_t(v);
      else if (key == "banks_per_pe") cfg.topo.banks_per_pe = uint32_t(v);
      else cfg.topo.words_per_bank = uint32_t(v);
    } else if (key == "radix") {
      cfg.radices.push_back(uint32_t(parse_u64(value, line_no, "radix")));
    } else if (key == "max_delay") {
      cfg.max_delays.push_back(parse_u64(value, line_no, "max_delay"));
    } else if (key == "sfr") {
      cfg.sfrs.push_back(parse_u64(value, line_no, "sfr"));
    } else if (key == "seed") {
      if (!have_seed) {
        cfg.seeds.clear();
        have_seed = true;
      }
      cfg.seeds.push_back(parse_u64(value, line_no, "seed"));
    } else if (key == "kernel") {
      const size_t colon = value.find(':');
      if (colon == std::string::npos) {
        parse_fail(line_no, "kernel expects '<name>:<dims>', got '" + value + "'");
      }
      KernelSpec spec;
      spec.name = value.substr(0, colon);
      spec.dims = parse_dims(value.substr(colon + 1), line_no);
      cfg.kernels.push_back(std::move(spec));
    } else if (key == "n_rx") {
      cfg.n_rx_list.push_back(uint32_t(parse_u64(value, line_no, "n_rx")));
    } else if (key == "barrier") {
      try {
        cfg.barriers.push_back(parse_barrier(value));
      } catch (const SimError& e) {
        parse_fail(line_no, e.what());
      }
    } else if (key == "folds") {
      if (!have_folds) {
        cfg.folds_list.clear();
        have_folds = true;
      }
      cfg.folds_list.push_back(uint32_t(parse_u64(value, line_no, "folds")));
    } else {
      parse_fail(line_no, "unknown key '" + key + "'");
    }
  }
  if (!have_kind) {
    fail(Errc::ConfigParse, "missing 'experiment = <kind>' line");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Errc::IoError, "cannot read config '" + path + "'");
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_config(buf.str());
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> problems;
  auto need = [&](bool ok, const std::string& msg) {
    if (!ok) problems.push_back(msg);
  };

  try {
    build_topology(cfg.topo);
  } catch (const SimError& e) {
    problems.push_back(std::string("topology: ") + e.what());
  }
  for (uint32_t r : cfg.radices) {
    if (r < 2 || (r & (r - 1)) != 0) {
      problems.push_back("InvalidRadix: radix " + std::to_string(r) +
                         " is not a power of two >= 2");
    }
  }
  need(!cfg.seeds.empty(), "seed grid is empty");

  switch (cfg.kind) {
    case ExperimentKind::DelaySweep:
      need(!cfg.radices.empty(), "delay_sweep needs at least one radix");
      need(!cfg.max_delays.empty(), "delay_sweep needs at least one max_delay");
      break;
    case ExperimentKind::SfrSweep:
      need(!cfg.radices.empty(), "sfr_sweep needs at least one radix");
      need(!cfg.max_delays.empty(), "sfr_sweep needs at least one max_delay");
      need(!cfg.sfrs.empty(), "sfr_sweep needs at least one sfr");
      break;
    case ExperimentKind::KernelBench:
      need(!cfg.kernels.empty(), "kernel_bench needs at least one kernel");
      need(!cfg.radices.empty(), "kernel_bench needs at least one radix");
      for (const auto& k : cfg.kernels) {
        const KernelInfo* info = find_kernel(k.name);
        if (!info) {
          problems.push_back("unknown kernel '" + k.name + "'");
          continue;
        }
        if (k.dims.size() != info->dims) {
          problems.push_back("kernel '" + k.name + "' expects " + info->syntax);
        }
        for (uint64_t d : k.dims) {
          if (d == 0) {
            problems.push_back("kernel '" + k.name + "' has a zero dimension");
            break;
          }
        }
      }
      break;
    case ExperimentKind::OfdmBench:
      need(!cfg.n_rx_list.empty(), "ofdm_bench needs at least one n_rx");
      need(!cfg.barriers.empty(), "ofdm_bench needs at least one barrier");
      need(!cfg.folds_list.empty(), "ofdm_bench needs at least one folds value");
      for (uint32_t n_rx : cfg.n_rx_list) {
        if (n_rx != 16 && n_rx != 32 && n_rx != 64) {
          problems.push_back("n_rx must be one of {16,32,64}, got " +
                             std::to_string(n_rx));
          continue;
        }
        for (uint32_t f : cfg.folds_list) {
          if (f == 0 || n_rx % (4 * f) != 0) {
            problems.push_back(
                "folds " + std::to_string(f) + " does not divide the " +
                std::to_string(n_rx) + " transforms across 4 subsets");
          }
        }
      }
      break;
  }
  return problems;
}

std::string run_experiment(const ExperimentConfig& cfg,
                           const RunOptions& opt) {
  const std::vector<std::string> problems = validate(cfg);
  if (!problems.empty()) {
    std::string joined;
    for (const auto& p : problems) {
      if (!joined.empty()) joined += "; ";
      joined += p;
    }
    fail(Errc::ConfigParse, joined);
  }

  const std::string path = opt.out_dir + "/" + cfg.csv_name();
  std::vector<std::string> rows;
  std::vector<std::function<void()>> cells;
  const char* header = "";

  switch (cfg.kind) {
    case ExperimentKind::DelaySweep: {
      header = "radix,max_delay,seed,span,avg_barrier_cycles";
      size_t i = 0;
      rows.resize(cfg.radices.size() * cfg.max_delays.size() * cfg.seeds.size());
      for (uint32_t radix : cfg.radices) {
        for (uint64_t max_delay : cfg.max_delays) {
          for (uint64_t seed : cfg.seeds) {
            const size_t slot = i++;
            cells.push_back([&, radix, max_delay, seed, slot] {
              Workload w = random_delay_workload(
                  DelaySpec{0, max_delay, seed}, radix);
              const CellResult r = run_cell(cfg.topo, w, opt,
                                            "delay_row" + std::to_string(slot));
              rows[slot] = fmt_row("%u,%llu,%llu,%llu,%.6f", radix,
                                   (unsigned long long)max_delay,
                                   (unsigned long long)seed,
                                   (unsigned long long)r.span,
                                   r.avg_barrier_cycles);
            });
          }
        }
      }
      break;
    }
    case ExperimentKind::SfrSweep: {
      header = "sfr,max_delay,best_radix,fraction";
      size_t i = 0;
      rows.resize(cfg.sfrs.size() * cfg.max_delays.size());
      for (uint64_t sfr : cfg.sfrs) {
        for (uint64_t max_delay : cfg.max_delays) {
          const size_t slot = i++;
          cells.push_back([&, sfr, max_delay, slot] {
            uint32_t best_radix = 0;
            double best = 0.0;
            for (uint32_t radix : cfg.radices) {
              double sum = 0.0;
              for (uint64_t seed : cfg.seeds) {
                Workload w = random_delay_workload(
                    DelaySpec{sfr, max_delay, seed}, radix);
                sum += run_cell(cfg.topo, w, opt,
                                "sfr_row" + std::to_string(slot) + "_k" +
                                    std::to_string(radix) + "_s" +
                                    std::to_string(seed))
                           .fraction;
              }
              const double mean = sum / double(cfg.seeds.size());
              if (best_radix == 0 || mean < best) {
                best_radix = radix;
                best = mean;
              }
            }
            rows[slot] = fmt_row("%llu,%llu,%u,%.6f", (unsigned long long)sfr,
                                 (unsigned long long)max_delay, best_radix,
                                 best);
          });
        }
      }
      break;
    }
    case ExperimentKind::KernelBench: {
      header = "kernel,size,radix,span,fraction,total_cycles";
      size_t i = 0;
      rows.resize(cfg.kernels.size() * cfg.radices.size());
      for (const KernelSpec& spec : cfg.kernels) {
        for (uint32_t radix : cfg.radices) {
          const size_t slot = i++;
          cells.push_back([&, &spec = spec, radix, slot] {
            Workload w = make_kernel_workload(spec, radix, cfg.seeds[0]);
            const CellResult r = run_cell(cfg.topo, w, opt,
                                          "kernel_row" + std::to_string(slot));
            rows[slot] = fmt_row("%s,%s,%u,%llu,%.6f,%llu", spec.name.c_str(),
                                 spec.size_label().c_str(), radix,
                                 (unsigned long long)r.span, r.fraction,
                                 (unsigned long long)r.cycles);
          });
        }
      }
      break;
    }
    case ExperimentKind::OfdmBench: {
      header =
          "n_rx,barrier,folds,total_cycles,sync_fraction,speedup_vs_central,"
          "speedup_vs_serial";
      // Baselines first (sequentially): the central run for every
      // (n_rx, folds) cell and one serial run per n_rx.
      constexpr uint32_t kBeams = 32, kSubcarriers = 4096;
      const uint64_t seed = cfg.seeds[0];
      std::map<std::pair<uint32_t, uint32_t>, CellResult> central;
      std::map<uint32_t, CellResult> serial;
      for (uint32_t n_rx : cfg.n_rx_list) {
        for (uint32_t folds : cfg.folds_list) {
          Workload w = ofdm_pipeline_workload(n_rx, kBeams, kSubcarriers,
                                              BarrierConfig{0, false}, folds,
                                              seed);
          central[{n_rx, folds}] =
              run_cell(cfg.topo, w, opt,
                       "ofdm_central_rx" + std::to_string(n_rx) + "_f" +
                           std::to_string(folds));
        }
        Workload w = ofdm_serial_workload(n_rx, kBeams, kSubcarriers, seed);
        serial[n_rx] = run_cell(cfg.topo, w, opt,
                                "ofdm_serial_rx" + std::to_string(n_rx));
      }
      size_t i = 0;
      rows.resize(cfg.n_rx_list.size() * cfg.barriers.size() *
                  cfg.folds_list.size());
      for (uint32_t n_rx : cfg.n_rx_list) {
        for (const BarrierConfig& bc : cfg.barriers) {
          for (uint32_t folds : cfg.folds_list) {
            const size_t slot = i++;
            cells.push_back([&, &bc = bc, n_rx, folds, slot] {
              CellResult r;
              if (bc.radix == 0 && !bc.partial) {
                r = central.at({n_rx, folds});
              } else {
                Workload w = ofdm_pipeline_workload(n_rx, kBeams, kSubcarriers,
                                                    bc, folds, seed);
                r = run_cell(cfg.topo, w, opt,
                             "ofdm_row" + std::to_string(slot));
              }
              const CellResult& c = central.at({n_rx, folds});
              const CellResult& s = serial.at(n_rx);
              rows[slot] = fmt_row(
                  "%u,%s,%u,%llu,%.6f,%.6f,%.6f", n_rx, bc.label().c_str(),
                  folds, (unsigned long long)r.cycles, r.fraction,
                  double(c.cycles) / double(r.cycles),
                  double(s.cycles) / double(r.cycles));
            });
          }
        }
      }
      run_rows(cells, opt.parallel);
      write_csv(path, header, rows);
      return path;
    }
  }

  run_rows(cells, opt.parallel);
  write_csv(path, header, rows);
  return path;
}

std::string list_workloads() {
  std::ostringstream os;
  os << "kernel grid entries (kernel_bench):\n";
  for (const auto& k : kKernels) {
    os << "  " << k.syntax << "\n";
  }
  os << "synthetic (delay_sweep, sfr_sweep):\n"
     << "  random_delay  per-PE uniform start jitter, one barrier\n"
     << "pipelines (ofdm_bench):\n"
     << "  ofdm          transform batch + beamforming product, barriers per\n"
     << "                stage (n_rx in {16,32,64}; barrier central|tree<k>\n"
     << "                with optional +partial; folds per subset)\n"
     << "  ofdm_serial   same pipeline on one PE (speedup baseline)\n";
  return os.str();
}

}  // namespace tilesim
