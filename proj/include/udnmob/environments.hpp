#pragma once

// Loss, feedback and availability processes behind the slot protocol.

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "udnmob/core.hpp"
#include "udnmob/energy_matrix.hpp"
#include "udnmob/policy.hpp"

namespace udnmob {

/// Feedback generated at slot s is delivered at slot s + d (d = 0: same slot).
class DelayChannel {
 public:
  explicit DelayChannel(std::size_t delay) : delay_(delay) {}

  std::size_t delay() const noexcept { return delay_; }
  void push(const FeedbackEvent& ev) { pending_.push_back(ev); }
  /// Events due at slot t, in generation order.
  std::vector<FeedbackEvent> deliver(std::uint64_t t);
  std::size_t pending() const noexcept { return pending_.size(); }

 private:
  std::size_t delay_;
  std::deque<FeedbackEvent> pending_;
};

/// Drops each slot's feedback independently with probability p_miss.
class MissChannel {
 public:
  MissChannel(double p_miss, RngStream rng);
  bool delivered() { return p_miss_ <= 0.0 || !rng_.bernoulli(p_miss_); }
  double p_miss() const noexcept { return p_miss_; }

 private:
  double p_miss_;
  RngStream rng_;
};

enum class AvailabilityMode { kAlwaysOn, kIid, kAdaptive, kScripted };

struct AvailabilityConfig {
  AvailabilityMode mode = AvailabilityMode::kAlwaysOn;
  std::vector<double> p_on;      // iid: per-SBS presence probability
  std::vector<SbsSet> script;    // scripted: N_1, N_2, ... (cycled)

  void validate(std::size_t n) const;
};

/// Generates N_1, N_2, ...
///
/// iid draws are conditioned on a non-empty set (an all-off draw is redrawn).
/// The adaptive adversary sets N_{t+1} = all SBSs except a_t.
class AvailabilityProcess {
 public:
  AvailabilityProcess(std::size_t n, AvailabilityConfig cfg, RngStream rng);

  SbsSet current() const noexcept { return current_; }
  /// Moves to the next slot given the action just played.
  void advance(SbsId action);
  AvailabilityMode mode() const noexcept { return cfg_.mode; }

 private:
  SbsSet draw_iid();

  std::size_t n_;
  AvailabilityConfig cfg_;
  RngStream rng_;
  std::uint64_t t_ = 1;
  SbsSet current_;
};

struct EnvironmentOptions {
  double handover_cost = 0.0;
  /// Multiplies slot totals before they are reported to learners.
  double feedback_scale = 1.0;
  std::size_t delay = 0;
  double p_miss = 0.0;
  AvailabilityConfig availability;
};

struct StepResult {
  SlotCost cost;
  std::vector<FeedbackEvent> feedback;
  SbsSet next_available;
};

/// One repetition's environment: a fixed (oblivious) energy matrix, an
/// optional measurement matrix for baselines, the feedback channel and the
/// availability process. Randomness comes from streams keyed by (seed, rep).
class Environment {
 public:
  Environment(std::shared_ptr<const EnergyMatrix> energy,
              std::shared_ptr<const EnergyMatrix> measurement, EnvironmentOptions opts,
              std::uint64_t seed, std::uint64_t repetition);

  std::size_t arms() const noexcept { return energy_->arms(); }
  std::uint64_t horizon() const noexcept { return energy_->slots(); }
  /// Next slot to be played (1-based).
  std::uint64_t t() const noexcept { return t_; }
  SbsSet available() const noexcept { return availability_.current(); }
  /// Latest measurement vector delivered to the UE (delayed/missing like feedback).
  std::span<const double> measurements() const;
  std::optional<SbsId> previous() const noexcept { return previous_; }
  const EnvironmentOptions& options() const noexcept { return opts_; }
  const EnergyMatrix& energy() const noexcept { return *energy_; }

  StepResult step(SbsId action);
  /// Events still in the delay line at horizon end.
  std::size_t pending_feedback() const noexcept { return delay_.pending(); }

 private:
  void refresh_measurement();

  std::shared_ptr<const EnergyMatrix> energy_;
  std::shared_ptr<const EnergyMatrix> measurement_;
  EnvironmentOptions opts_;
  DelayChannel delay_;
  MissChannel miss_;
  MissChannel measurement_miss_;
  AvailabilityProcess availability_;
  std::uint64_t t_ = 1;
  std::optional<SbsId> previous_;
  std::optional<std::size_t> measurement_row_;
  std::vector<double> no_measurement_;
};

}  // namespace udnmob
