#pragma once

// Command implementations behind the udnmob executable.
//
//   run     scenario file or preset -> <out>/trace.csv and <out>/summary.csv
//   verify  acceptance suite, one line per criterion

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "udnmob/harness.hpp"

namespace udnmob {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAcceptance = 2;

/// Output directory used when --out is absent ("out" if unset).
inline constexpr const char* kOutputDirEnv = "UDNMOB_OUT";
std::string default_output_dir();

struct RunOptions {
  std::optional<std::string> scenario;  // path to a scenario JSON file
  std::optional<std::string> preset;
  std::vector<std::string> algos;       // "name" or "name:key=value,..."
  std::optional<std::uint64_t> horizon;
  std::optional<std::size_t> repetitions;
  std::uint64_t seed = 1;
  std::optional<std::string> out;
  std::size_t stride = 100;
  std::size_t threads = 0;
};

/// Resolves options into experiments; throws ConfigError.
std::vector<ExperimentSpec> build_experiments(const RunOptions& opts);

int cmd_run(const RunOptions& opts, std::ostream& log, std::ostream& err);
int cmd_verify(const std::string& filter, std::ostream& out, std::size_t threads = 0);

}  // namespace udnmob
