#pragma once

// Named policy construction: "brew", "brew:tau=12", "fho:freeze=20,window=20".
//
//   brew          tau (int | auto), gamma (constant rate; default anytime)
//   exp3          brew with tau = 1
//   brew_missing  tau, gamma, p (default: the scenario's p_miss)
//   re            variant = factored | naive
//   cre
//   macro         threshold
//   fho           threshold, window, max_handover, freeze (default: BREW's auto tau)
//   macro_ext
//   fixed         arm
//
// Every spec also accepts "label" (CSV name) and "regret_pool" (basic | full),
// which the harness consumes.

#include <map>
#include <memory>
#include <string>

#include "udnmob/policy.hpp"
#include "udnmob/scenario.hpp"

namespace udnmob {

struct PolicySpec {
  std::string algo;
  std::map<std::string, std::string> params;

  /// params["label"] if given, else algo plus "/key=value" per parameter.
  std::string label() const;
  bool has(const std::string& key) const { return params.count(key) != 0; }
};

PolicySpec parse_policy_spec(const std::string& text);

/// Throws ConfigError on unknown algorithms or parameters and on module guards
/// (naive RE needs N <= 4, RE/CRE need N <= 7, BREW needs T >= 1, ...).
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Scenario& scenario,
                                    RngStream rng);

/// Batch length BREW would use for this spec (1 for non-batched policies).
std::size_t policy_batch_length(const PolicySpec& spec, const Scenario& scenario);

}  // namespace udnmob
