#pragma once

// Acceptance suite: ten end-to-end checks over the learners, baselines,
// simulator and harness. Tolerances are fixed here, not configurable.

#include <iosfwd>
#include <string>
#include <vector>

namespace udnmob {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

/// filter: empty for all, else comma-separated ids or name fragments
/// ("1,7", "theorem1", "sanity").
bool criterion_selected(const std::string& filter, int id, const std::string& name);

/// Runs the selected criteria in order; writes one line per criterion to
/// `progress` as it finishes, if given.
std::vector<CriterionResult> run_acceptance(const std::string& filter, std::size_t threads = 0,
                                            std::ostream* progress = nullptr);

std::string format_criterion(const CriterionResult& r);

}  // namespace udnmob
