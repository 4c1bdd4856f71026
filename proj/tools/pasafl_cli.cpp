// Command-line driver: run | compare | ablate | plotdata

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pasafl/pasafl.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kConfig = 2,
  kIo = 3,
  kInternal = 4,
};

struct RunArgs {
  std::string config;
  std::string output;
  std::int64_t seed_offset = 0;
  bool quiet = false;
};

void add_run_args(CLI::App* cmd, RunArgs& args) {
  cmd->add_option("config", args.config, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", args.output, "Output directory (overrides output_dir in the config)");
  cmd->add_option("--seed-offset", args.seed_offset, "Added to every seed in the config");
  cmd->add_flag("-q,--quiet", args.quiet, "Only print the summary table");
}

int run_verb(const RunArgs& args, const std::vector<std::string>* preset) {
  auto config = pasafl::load_config(args.config);
  if (!args.output.empty()) config.output_dir = args.output;
  pasafl::RunOptions opt;
  opt.seed_offset = args.seed_offset;
  opt.quiet = args.quiet;
  opt.log = &std::cerr;
  const auto summary = preset ? pasafl::run_preset(config, *preset, opt) : pasafl::run_experiment(config, opt);
  std::cout << pasafl::summary_text(summary);
  if (!args.quiet) std::cout << "artifacts written to " << config.output_dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auction-based FL market simulator for data-owner decision policies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pasafl::kVersion);

  RunArgs run_args, compare_args, ablate_args;
  auto* run = app.add_subcommand("run", "Run the config's policy assignment over all seeds");
  add_run_args(run, run_args);
  auto* compare = app.add_subcommand("compare", "Run pas-afl and the six baselines on shared seeds");
  add_run_args(compare, compare_args);
  auto* ablate = app.add_subcommand("ablate", "Run pas-afl and its five ablated variants on shared seeds");
  add_run_args(ablate, ablate_args);

  std::string plot_dir;
  auto* plot = app.add_subcommand("plotdata", "Turn a run directory into plot-ready tables");
  plot->add_option("dir", plot_dir, "Output directory of a previous run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*run) return run_verb(run_args, nullptr);
    if (*compare) {
      const auto preset = pasafl::compare_preset();
      return run_verb(compare_args, &preset);
    }
    if (*ablate) {
      const auto preset = pasafl::ablation_preset();
      return run_verb(ablate_args, &preset);
    }
    if (*plot) {
      const auto series = pasafl::emit_plot_data(plot_dir);
      std::cout << "wrote plot tables for " << series.size() << " policies to " << plot_dir << "/plot\n";
      return kOk;
    }
  } catch (const pasafl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const pasafl::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}
