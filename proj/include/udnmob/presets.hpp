#pragma once

// Figure presets: experiment grids on the UDN simulator.
//
//   fig3  N = 6, BREW batch-length sweep against 3GPP-macro and 3GPP-FHO
//   fig4  the same with N = 12
//   fig5  delayed feedback, d in {0, 2, 5}, N in {6, 12}
//   fig6  missing feedback, P_m in {0, 0.1, 0.3}, N in {6, 12}
//   fig7  SBS on/off, CRE against the extended macro, P_off in {0.1, 0.3}
//
// Every grid point is run for E_s in {0.2, 0.4}. Defaults are T = 1e5 and
// 20 repetitions.

#include <optional>
#include <string>
#include <vector>

#include "udnmob/harness.hpp"

namespace udnmob {

struct PresetOptions {
  std::optional<std::uint64_t> horizon;
  std::optional<std::size_t> repetitions;
  std::uint64_t seed = 1;
  std::size_t stride = 100;
  std::size_t threads = 0;
};

std::vector<std::string> preset_names();

/// ConfigError for unknown names.
std::vector<ExperimentSpec> make_preset(const std::string& name, const PresetOptions& opts);

}  // namespace udnmob
