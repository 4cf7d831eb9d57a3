#pragma once

// Scenario files: a JSON document describing the loss generator, the
// feedback channel and the availability process of an experiment.
//
//   {
//     "name": "two_arm_gap",
//     "N": 2, "T": 10000, "E_s": 0.1,
//     "generator": {"type": "constant", "means": [0.1, 0.9]},
//     "channel": {"delay": 0, "p_miss": 0.0},
//     "availability": {"mode": "always_on"}
//   }
//
// Generator types:
//   constant      means[N]
//   uniform_iid   low[N], high[N]             (drawn from the scenario seed)
//   matrix        rows[T][N]
//   threshold_trap  threshold, e_max          (see appendix_c_sequence)
//   adversarial   family (0..9), e_max        (see adversarial_family)
//   udn           UDN simulator keys (see udn_config_from_json)
// Availability modes: always_on | iid (p_on[N] or p_off) | adaptive |
// scripted (sets: list of active-id lists, cycled).
// "units": "raw" marks a scenario whose energies are not normalized; it then
// needs "feedback_scale" so that learners still see losses in [0,1].

#include <cstdint>
#include <memory>
#include <string>

#include "json.hpp"
#include "udnmob/energy_matrix.hpp"
#include "udnmob/environments.hpp"
#include "udnmob/udn_sim.hpp"

namespace udnmob {

struct Scenario {
  std::string name = "scenario";
  std::size_t n = 2;
  std::uint64_t horizon = 1000;
  double handover_cost = 0.0;
  bool raw_units = false;
  double feedback_scale = 1.0;
  nlohmann::json generator = {{"type", "constant"}};
  std::size_t delay = 0;
  double p_miss = 0.0;
  AvailabilityConfig availability;

  /// Largest admissible service energy (1 - E_s for normalized scenarios).
  double e_max() const;
  EnvironmentOptions environment_options() const;
  void validate() const;
};

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::string& path);
nlohmann::json to_json(const Scenario& s);

struct Realization {
  std::shared_ptr<const EnergyMatrix> energy;
  std::shared_ptr<const EnergyMatrix> measurement;  // may equal energy
};

/// Builds the (oblivious) matrices for the scenario's horizon. Stochastic
/// generators draw from `seed`; the result does not depend on any policy.
Realization realize(const Scenario& s, std::uint64_t seed);

/// Ten oblivious loss families used for bound regression; values in [0, e_max].
///   0 staircase      constant, evenly spaced means
///   1 noisy          staircase plus uniform noise
///   2 switching      leader changes at T/2; the late leader is best overall
///   3 periodic       phase-shifted sinusoids, arm 0 slightly favoured
///   4 bernoulli      {0, e_max} losses with arm-dependent rates
///   5 deceptive      best arm is the worst one for the first fifth
///   6 blocks         piecewise-constant random levels, blocks of 1000
///   7 near_tie       i.i.d. uniform, last arm marginally better
///   8 alternating    on/off square waves of period 14, shifted per arm
///   9 single_good    one random good arm among uniformly bad ones
EnergyMatrix adversarial_family(int family, std::size_t n, std::size_t horizon, double e_max,
                                std::uint64_t seed);
inline constexpr int kAdversarialFamilies = 10;

UdnConfig udn_config_from_json(const nlohmann::json& g, std::size_t n, std::uint64_t horizon,
                               double handover_cost);

/// Availability adversary that removes the UE's last SBS every slot, run in
/// raw units: E_max and E_s are raw values with E_s >= E_max + 1/(N-1);
/// losses are i.i.d. uniform on [0, E_max] and learners receive totals
/// divided by E_max + E_s.
Scenario theorem3_scenario(std::size_t n, std::uint64_t horizon, double handover_cost,
                           double e_max);

}  // namespace udnmob
