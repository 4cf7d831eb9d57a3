#pragma once

// Batched randomization with exponential weighting (BREW).
//
// Slots are grouped into batches of tau. At each batch boundary one SBS is
// drawn from the exponential-weights distribution and held for the whole
// batch, so at most ceil(T/tau) - 1 handovers occur. At the end of a batch
// the mean observed energy (with the one-time handover charge folded into
// the first slot) is importance-weighted into the cumulative loss of the
// held SBS only.
//
// The missing-feedback variant averages over the observed slots only and
// additionally divides the estimate by the Binomial(tau, 1-p) probability of
// the realized number of observations.

#include <cstdint>
#include <optional>
#include <vector>

#include "udnmob/core.hpp"
#include "udnmob/ew_core.hpp"
#include "udnmob/policy.hpp"

namespace udnmob {

/// ceil((4.5 N ln N)^(-1/3) T^(1/3)), at least 1.
std::size_t brew_batch_length(std::size_t n, std::uint64_t horizon);

/// (4.5 N ln N)^(-1/3).
double brew_b_n(std::size_t n);

struct BrewConfig {
  std::size_t n = 2;
  std::uint64_t horizon = 1;
  std::size_t tau = 1;
  GammaSchedule gamma = GammaSchedule::anytime(2);
  double handover_cost = 0.0;

  /// tau from brew_batch_length, anytime gamma.
  static BrewConfig with_auto_tau(std::size_t n, std::uint64_t horizon, double handover_cost);
  void validate() const;
};

struct MissingFeedbackConfig {
  double p_miss = 0.0;
  void validate() const;
};

class BatchAccumulator {
 public:
  BatchAccumulator(std::size_t batch_index, SbsId chosen, std::size_t length)
      : batch_index_(batch_index), chosen_(chosen), length_(length) {}

  /// One observed slot; a handover charge is folded into the slot's value.
  void add(double service, double handover_charge = 0.0) {
    values_.push_back(service + handover_charge);
  }

  std::size_t batch_index() const noexcept { return batch_index_; }
  SbsId chosen() const noexcept { return chosen_; }
  /// Slots in the batch (tau, or less for a trailing batch).
  std::size_t length() const noexcept { return length_; }
  std::size_t observed_count() const noexcept { return values_.size(); }
  double mean() const;

 private:
  std::size_t batch_index_;
  SbsId chosen_;
  std::size_t length_;
  std::vector<double> values_;
};

struct BrewState {
  WeightState weights;
  std::vector<double> probabilities;  // p(l), used for the draw of the current batch
  std::size_t batch = 1;              // l

  BrewState(std::size_t n, GammaSchedule schedule);
};

/// Draws a(l) at a batch boundary; otherwise returns the held action and consumes no randomness.
SbsId brew_select(const BrewState& state, bool batch_boundary, std::optional<SbsId> held,
                  RngStream& rng);

void brew_end_batch(const BatchAccumulator& acc, BrewState& state);

/// C(n,k) q^k (1-q)^(n-k).
double binomial_pmf(std::size_t n, std::size_t k, double q);

void brew_missing_end_batch(const BatchAccumulator& acc, const MissingFeedbackConfig& cfg,
                            BrewState& state);

class BrewPolicy final : public Policy {
 public:
  BrewPolicy(BrewConfig cfg, std::optional<MissingFeedbackConfig> missing, RngStream rng);

  std::string name() const override { return missing_ ? "brew_missing" : "brew"; }
  SbsId select(const SlotContext& ctx) override;
  void observe(std::span<const FeedbackEvent> events) override;
  void finish() override;

  const BrewState& state() const noexcept { return state_; }
  const BrewConfig& config() const noexcept { return cfg_; }

 private:
  void close_batch();

  BrewConfig cfg_;
  std::optional<MissingFeedbackConfig> missing_;
  RngStream rng_;
  BrewState state_;
  std::optional<BatchAccumulator> acc_;
  std::optional<SbsId> held_;
};

}  // namespace udnmob
