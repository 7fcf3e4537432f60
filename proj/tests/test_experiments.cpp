#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tilesim/errors.hpp"
#include "tilesim/experiments.hpp"

using namespace tilesim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path);
  REQUIRE(is.good());
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string fresh_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("tilesim_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::ConfigParse);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("configs are flat key=value lines with comments and lists") {
  ExperimentConfig cfg = parse_config(
      "# sweep shape\n"
      "experiment = delay_sweep\n"
      "\n"
      "radix = 2\n"
      "radix = 8   # list keys accumulate\n"
      "max_delay = 0\n"
      "max_delay = 2048\n"
      "words_per_bank = 512\n"
      "out = mysweep.csv\n");
  CHECK(cfg.kind == ExperimentKind::DelaySweep);
  CHECK(cfg.radices == std::vector<uint32_t>{2, 8});
  CHECK(cfg.max_delays == std::vector<uint64_t>{0, 2048});
  CHECK(cfg.topo.words_per_bank == 512);
  CHECK(cfg.csv_name() == "mysweep.csv");

  SUBCASE("seeds default to {1} until the first explicit seed") {
    CHECK(cfg.seeds == std::vector<uint64_t>{1});
    ExperimentConfig seeded =
        parse_config("experiment=delay_sweep\nseed=5\nseed=9\n");
    CHECK(seeded.seeds == std::vector<uint64_t>{5, 9});
    ExperimentConfig folded =
        parse_config("experiment=ofdm_bench\nfolds=4\nfolds=16\n");
    CHECK(folded.folds_list == std::vector<uint32_t>{4, 16});
  }
  SUBCASE("the output file defaults to the experiment name") {
    CHECK(parse_config("experiment=ofdm_bench\n").csv_name() ==
          "ofdm_bench.csv");
    CHECK(parse_config("experiment=sfr_sweep\n").csv_name() ==
          "sfr_sweep.csv");
  }
  SUBCASE("kernel entries carry name and dimensions") {
    ExperimentConfig kb = parse_config(
        "experiment=kernel_bench\nkernel=gemm:128x32x128\nkernel=axpy:4096\n");
    REQUIRE(kb.kernels.size() == 2);
    CHECK(kb.kernels[0].name == "gemm");
    CHECK(kb.kernels[0].dims == std::vector<uint64_t>{128, 32, 128});
    CHECK(kb.kernels[0].size_label() == "128x32x128");
    CHECK(kb.kernels[1].size_label() == "4096");
  }
}

TEST_CASE("malformed configs fail with the offending line number") {
  CHECK(parse_error("experiment=delay_sweep\nradix 8\n")
            .find("line 2: expected key=value") != std::string::npos);
  CHECK(parse_error("bogus=1\n").find("unknown key 'bogus'") !=
        std::string::npos);
  CHECK(parse_error("experiment=delay_sweep\nradix=abc\n")
            .find("non-negative integer") != std::string::npos);
  CHECK(parse_error("experiment=nope\n").find("unknown experiment") !=
        std::string::npos);
  CHECK(parse_error("radix=\n").find("empty value") != std::string::npos);
  CHECK(parse_error("experiment=kernel_bench\nkernel=gemm128\n")
            .find("kernel expects") != std::string::npos);

  const std::string dup = parse_error(
      "experiment=delay_sweep\nout=a.csv\nout=b.csv\n");
  CHECK(dup.find("line 3") != std::string::npos);
  CHECK(dup.find("duplicate 'out'") != std::string::npos);
  CHECK(dup.find("first set on line 2") != std::string::npos);
}

TEST_CASE("barrier shorthand round-trips through its label") {
  for (const char* text : {"central", "tree2", "tree32", "tree8+partial",
                           "central+partial"}) {
    BarrierConfig bc = parse_barrier(text);
    CHECK(bc.label() == text);
  }
  CHECK(parse_barrier("central").radix == 0);
  CHECK_FALSE(parse_barrier("central").partial);
  CHECK(parse_barrier("tree32").radix == 32);
  CHECK(parse_barrier("tree8+partial").partial);

  for (const char* bad : {"tree", "treex4", "oak8", "", "tree8+partia"}) {
    CHECK_THROWS_AS(parse_barrier(bad), SimError);
  }
}

TEST_CASE("validation collects every violation without running") {
  ExperimentConfig ok = parse_config(
      "experiment=delay_sweep\nradix=8\nmax_delay=64\n");
  CHECK(validate(ok).empty());

  SUBCASE("radices must be powers of two no smaller than 2") {
    ExperimentConfig bad = ok;
    bad.radices = {3, 8, 0};
    const auto problems = validate(bad);
    REQUIRE(problems.size() == 2);
    CHECK(problems[0].find("InvalidRadix:") != std::string::npos);
  }
  SUBCASE("each experiment insists on its own grids") {
    CHECK_FALSE(validate(parse_config("experiment=delay_sweep\nradix=8\n"))
                    .empty());  // no max_delay
    CHECK_FALSE(
        validate(parse_config("experiment=sfr_sweep\nradix=8\nmax_delay=0\n"))
            .empty());  // no sfr
    CHECK_FALSE(validate(parse_config("experiment=kernel_bench\nradix=8\n"))
                    .empty());  // no kernel
    CHECK_FALSE(validate(parse_config("experiment=ofdm_bench\nn_rx=16\n"))
                    .empty());  // no barrier
  }
  SUBCASE("kernels must exist with the right dimension count") {
    ExperimentConfig kb = parse_config(
        "experiment=kernel_bench\nradix=8\nkernel=axpy:4096\n");
    CHECK(validate(kb).empty());
    kb.kernels[0].name = "axpyy";
    CHECK_FALSE(validate(kb).empty());
    kb.kernels[0] = {"gemm", {128, 32}};
    CHECK_FALSE(validate(kb).empty());
    kb.kernels[0] = {"gemm", {128, 0, 128}};
    CHECK_FALSE(validate(kb).empty());
  }
  SUBCASE("pipeline shapes are pinned to the supported antenna counts") {
    ExperimentConfig ob = parse_config(
        "experiment=ofdm_bench\nn_rx=16\nbarrier=tree32\n");
    CHECK(validate(ob).empty());
    ob.n_rx_list = {128};
    CHECK_FALSE(validate(ob).empty());
    ob.n_rx_list = {16};
    ob.folds_list = {3};  // 16/4 folds groups of 4 do not split by 3
    CHECK_FALSE(validate(ob).empty());
  }
  SUBCASE("topology overrides are sanity-checked") {
    ExperimentConfig t = ok;
    t.topo.pes_per_tile = 3;
    CHECK_FALSE(validate(t).empty());
  }
}

TEST_CASE("a one-cell delay sweep writes exactly the expected bytes") {
  ExperimentConfig cfg = parse_config(
      "experiment=delay_sweep\nradix=8\nmax_delay=0\nseed=1\n");
  RunOptions opt;
  opt.out_dir = fresh_dir("golden");
  const std::string path = run_experiment(cfg, opt);
  CHECK(path == opt.out_dir + "/delay_sweep.csv");
  CHECK(slurp(path) ==
        "radix,max_delay,seed,span,avg_barrier_cycles\n"
        "8,0,1,66,66.000000\n");
}

TEST_CASE("a kernel bench row carries its full parameter tuple") {
  ExperimentConfig cfg = parse_config(
      "experiment=kernel_bench\nkernel=axpy:4096\nradix=8\n");
  RunOptions opt;
  opt.out_dir = fresh_dir("kbench");
  const std::string text = slurp(run_experiment(cfg, opt));
  CHECK(text ==
        "kernel,size,radix,span,fraction,total_cycles\n"
        "axpy,4096,8,66,0.804878,82\n");
}

TEST_CASE("grids produce identical bytes on reruns and under parallelism") {
  ExperimentConfig cfg = parse_config(
      "experiment=delay_sweep\n"
      "radix=2\nradix=8\nradix=1024\n"
      "max_delay=0\nmax_delay=64\n"
      "seed=1\nseed=2\n");
  RunOptions a, b, c;
  a.out_dir = fresh_dir("det_a");
  b.out_dir = fresh_dir("det_b");
  c.out_dir = fresh_dir("det_c");
  c.parallel = 4;
  const std::string first = slurp(run_experiment(cfg, a));
  CHECK(first == slurp(run_experiment(cfg, b)));
  CHECK(first == slurp(run_experiment(cfg, c)));
  CHECK(std::count(first.begin(), first.end(), '\n') == 13);  // header + grid
}

TEST_CASE("trace dumps land beside the table when requested") {
  ExperimentConfig cfg = parse_config(
      "experiment=delay_sweep\nradix=8\nmax_delay=0\n");
  RunOptions opt;
  opt.out_dir = fresh_dir("tracedump");
  opt.trace_dump = true;
  run_experiment(cfg, opt);
  bool found = false;
  for (const auto& entry : std::filesystem::directory_iterator(opt.out_dir)) {
    if (entry.path().string().find(".trace.csv") != std::string::npos) {
      found = true;
      const std::string text = slurp(entry.path().string());
      CHECK(text.rfind("cycle,pe,kind,id", 0) == 0);
    }
  }
  CHECK(found);
}

TEST_CASE("unrunnable configs and unwritable outputs raise typed errors") {
  ExperimentConfig cfg = parse_config("experiment=delay_sweep\nradix=3\n");
  RunOptions opt;
  opt.out_dir = fresh_dir("badcfg");
  try {
    run_experiment(cfg, opt);
    FAIL("expected a config error");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::ConfigParse);
  }

  ExperimentConfig good = parse_config(
      "experiment=delay_sweep\nradix=8\nmax_delay=0\n");
  RunOptions nodir;
  nodir.out_dir = "/nonexistent/definitely/missing";
  try {
    run_experiment(good, nodir);
    FAIL("expected an io error");
  } catch (const SimError& e) {
    CHECK(e.code() == Errc::IoError);
  }
}

TEST_CASE("the kernel catalogue drives grid dispatch") {
  const std::string listing = list_workloads();
  for (const char* name :
       {"axpy", "dotp", "gemm", "conv2d", "dct", "beamforming"}) {
    CHECK(listing.find(name) != std::string::npos);
  }
  CHECK_THROWS_AS(make_kernel_workload({"nope", {4096}}, 8, 1), SimError);
  Workload w = make_kernel_workload({"gemm", {64, 32, 64}}, 8, 1);
  CHECK(w.name == "gemm");
  CHECK(w.size_label == "64x32x64");
}
