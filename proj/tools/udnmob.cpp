// udnmob: run mobility-management experiments and the acceptance suite.
//
//   udnmob run --scenario s.json --algo brew --algo "fho:freeze=20" --T 10000
//   udnmob run --preset fig3 --reps 5
//   udnmob verify --filter theorem1

#include <iostream>

#include "CLI11.hpp"
#include "udnmob/app.hpp"
#include "udnmob/presets.hpp"

int main(int argc, char** argv) {
  using namespace udnmob;

  CLI::App app{"Energy-aware SBS selection: learners, baselines and experiment harness"};
  app.require_subcommand(1);

  RunOptions run;
  std::string scenario, preset, out;
  std::uint64_t horizon = 0;
  std::size_t reps = 0;
  auto* run_cmd = app.add_subcommand("run", "run a scenario file or a preset grid");
  run_cmd->add_option("--scenario", scenario, "scenario JSON file");
  std::string presets;
  for (const auto& p : preset_names()) presets += (presets.empty() ? "" : ", ") + p;
  run_cmd->add_option("--preset", preset, "preset grid (" + presets + ")");
  run_cmd->add_option("--algo", run.algos, "policy, e.g. brew or fho:freeze=20 (repeatable)");
  run_cmd->add_option("--T", horizon, "horizon override")->check(CLI::PositiveNumber);
  run_cmd->add_option("--reps", reps, "repetitions (default 20)")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", run.seed, "base seed")->capture_default_str();
  run_cmd->add_option("--out", out, std::string("output directory (default $") + kOutputDirEnv +
                                        " or ./out)");
  run_cmd->add_option("--stride", run.stride, "trace row every k slots")->capture_default_str();
  run_cmd->add_option("--threads", run.threads, "worker threads (0: all cores)");

  std::string filter;
  std::size_t verify_threads = 0;
  auto* verify_cmd = app.add_subcommand("verify", "run the acceptance suite");
  verify_cmd->add_option("--filter", filter, "criterion ids or name fragments, comma-separated");
  verify_cmd->add_option("--threads", verify_threads, "worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (*run_cmd) {
    if (!scenario.empty()) run.scenario = scenario;
    if (!preset.empty()) run.preset = preset;
    if (!out.empty()) run.out = out;
    if (horizon) run.horizon = horizon;
    if (reps) run.repetitions = reps;
    return cmd_run(run, std::cout, std::cerr);
  }
  return cmd_verify(filter, std::cout, verify_threads);
}
