// Command-line experiment runner.
//
// Exit codes: 0 success; 2 config parse or validation failure; 3 simulation
// failure (deadlock, cycle cap, verification mismatch); 4 I/O failure;
// 1 anything else.
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tilesim/experiments.hpp"
#include "tilesim/errors.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSimulation = 3;
constexpr int kExitIo = 4;

int exit_code_for(const tilesim::SimError& e) {
  switch (e.code()) {
    case tilesim::Errc::ConfigParse:
      return kExitConfig;
    case tilesim::Errc::IoError:
      return kExitIo;
    default:
      return kExitSimulation;
  }
}

// "1,5,9" or "1:8" (inclusive range) -> list of seeds.
std::vector<uint64_t> parse_seeds(const std::string& text) {
  std::vector<uint64_t> seeds;
  const size_t colon = text.find(':');
  if (colon != std::string::npos) {
    const uint64_t lo = std::strtoull(text.c_str(), nullptr, 10);
    const uint64_t hi = std::strtoull(text.c_str() + colon + 1, nullptr, 10);
    if (hi < lo) {
      tilesim::fail(tilesim::Errc::ConfigParse,
                    "--seeds range '" + text + "' is descending");
    }
    for (uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }
  std::string cur;
  for (char c : text + ",") {
    if (c == ',') {
      if (cur.empty() || cur.find_first_not_of("0123456789") != std::string::npos) {
        tilesim::fail(tilesim::Errc::ConfigParse,
                      "--seeds expects integers, got '" + text + "'");
      }
      seeds.push_back(std::strtoull(cur.c_str(), nullptr, 10));
      cur.clear();
    } else {
      cur += c;
    }
  }
  return seeds;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tilesim: hierarchical many-core barrier benchmark runner"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", seeds_text;
  unsigned parallel = 1;
  bool trace_dump = false;

  CLI::App* run = app.add_subcommand("run", "run an experiment grid to CSV");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  run->add_option("--out", out_dir,
                  "output directory (env TILESIM_OUT overrides)");
  run->add_option("--seeds", seeds_text,
                  "replace config seeds: comma list '1,2,3' or range '1:10'");
  run->add_option("--parallel", parallel, "worker threads for grid cells")
      ->check(CLI::Range(1u, 256u));
  run->add_flag("--trace-dump", trace_dump,
                "write a per-run event trace CSV next to the table");

  std::string validate_path;
  CLI::App* validate =
      app.add_subcommand("validate", "check a config without running it");
  validate->add_option("--config", validate_path, "experiment config file")
      ->required();

  CLI::App* list =
      app.add_subcommand("list-workloads", "print the workload catalogue");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help lands here with code 0; real argv mistakes map to the
    // documented usage code.
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (list->parsed()) {
      std::fputs(tilesim::list_workloads().c_str(), stdout);
      return kExitOk;
    }
    if (validate->parsed()) {
      const tilesim::ExperimentConfig cfg = tilesim::load_config(validate_path);
      const std::vector<std::string> problems = tilesim::validate(cfg);
      if (problems.empty()) {
        std::puts("ok");
        return kExitOk;
      }
      for (const auto& p : problems) {
        std::fprintf(stderr, "invalid: %s\n", p.c_str());
      }
      return kExitConfig;
    }
    tilesim::ExperimentConfig cfg = tilesim::load_config(config_path);
    if (!seeds_text.empty()) cfg.seeds = parse_seeds(seeds_text);
    tilesim::RunOptions opt;
    opt.out_dir = out_dir;
    if (const char* env = std::getenv("TILESIM_OUT"); env && *env) {
      opt.out_dir = env;
    }
    opt.parallel = parallel;
    opt.trace_dump = trace_dump;
    const std::string path = tilesim::run_experiment(cfg, opt);
    std::printf("wrote %s\n", path.c_str());
    return kExitOk;
  } catch (const tilesim::SimError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
